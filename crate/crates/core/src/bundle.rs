//! A moduli system plus the facts needed to reproduce it, as one JSON
//! document.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::primes::PrimeMode;
use crate::residue::{ModuliSystem, SystemError};
use crate::tournament::{smallest_inbound_covering, TournamentError};

pub const BUNDLE_FORMAT: &str = "ufa-instance/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub prime_mode: PrimeMode,
    /// Desk mode: primes are the smallest ones above this floor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime_floor: Option<u64>,
    /// Seed of the orientation search that produced the tournament, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tournament_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tournament_tries: Option<u64>,
    /// No set of at most this many vertices is inbound-covering.
    pub certified_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceBundle {
    pub format: String,
    pub system: ModuliSystem,
    pub provenance: Provenance,
}

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed bundle: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported bundle format {0:?}")]
    Format(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error("certified_k = {k} is wrong: {cover:?} is inbound-covering")]
    NotCertified { k: usize, cover: Vec<usize> },
}

impl InstanceBundle {
    /// Wraps a system after checking the tournament certificate.
    pub fn new(system: ModuliSystem, provenance: Provenance) -> Result<Self, BundleError> {
        let system = system.with_prime_mode(provenance.prime_mode)?;
        let k = provenance.certified_k;
        let cover = if k == 0 {
            None
        } else {
            smallest_inbound_covering(system.tournament(), k)?
        };
        if let Some(cover) = cover {
            return Err(BundleError::NotCertified {
                k: provenance.certified_k,
                cover,
            });
        }
        Ok(InstanceBundle {
            format: BUNDLE_FORMAT.to_string(),
            system,
            provenance,
        })
    }

    /// Parses and fully re-validates a bundle.
    pub fn from_json(text: &str) -> Result<Self, BundleError> {
        let raw: InstanceBundle = serde_json::from_str(text)?;
        if raw.format != BUNDLE_FORMAT {
            return Err(BundleError::Format(raw.format));
        }
        InstanceBundle::new(raw.system, raw.provenance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundles serialize")
    }

    pub fn load(path: &Path) -> Result<Self, BundleError> {
        let text = std::fs::read_to_string(path).map_err(|source| BundleError::Io {
            path: path.display().to_string(),
            source,
        })?;
        InstanceBundle::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), BundleError> {
        std::fs::write(path, self.to_json() + "\n").map_err(|source| BundleError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}
