//! Checkers that turn the construction's claims into machine-readable
//! verdicts. Every checker is deterministic: sampling uses seeded ChaCha8
//! and JSON objects have sorted keys.

mod cycle;
mod lemmas;
mod suite;
pub mod theorem10;

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::automata::period::PeriodError;
use crate::automata::AutomatonError;
use crate::residue::{ModuliSystem, SystemError};
use crate::tournament::TournamentError;

pub use cycle::check_cycle_argument;
pub use lemmas::{
    check_independent_edge_extraction, check_lemma8, check_lemma9, Lemma8Options, Lemma9Options,
};
pub use suite::{
    check_automata, check_equivalence, check_evaluator_agreement, check_minimal_period,
    check_ufa_unambiguity, AutomataOptions,
};
pub use theorem10::{check_theorem10, theorem10_verdict, SizeReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerificationError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error(transparent)]
    Period(#[from] PeriodError),
    #[error("tournament is not certified for k = {k}: {cover:?} is inbound-covering")]
    NotCertified { k: usize, cover: Vec<usize> },
    #[error("the candidate cycle length is not blocking")]
    NotBlocking,
    #[error("edge extraction stuck after picking {picked:?}; the tournament certificate is wrong")]
    ExtractionStuck { picked: Vec<(usize, usize)> },
}

/// One checker's outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub instance: Value,
    pub pass: bool,
    pub witness: Value,
    pub census: Value,
}

impl Verdict {
    pub fn new(check: &str, instance: Value, pass: bool, witness: Value, census: Value) -> Self {
        Verdict {
            check: check.to_string(),
            instance,
            pass,
            witness,
            census,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }
}

/// Compact description of an instance for verdicts.
pub fn instance_json(ms: &ModuliSystem) -> Value {
    json!({
        "b": ms.base(),
        "n": ms.n(),
        "N": ms.prime_count(),
        "prime_mode": ms.primes().mode(),
        "primes": ms.primes().primes(),
        "edges": ms.tournament().edges(),
    })
}

pub(crate) fn decimal(x: &BigUint) -> Value {
    Value::String(x.to_string())
}

pub(crate) fn prime_values(ms: &ModuliSystem, indices: &[usize]) -> Vec<u64> {
    indices.iter().map(|&j| ms.prime(j)).collect()
}
