//! `ufa`: generate instances, run the checkers, query membership and export
//! automata.
//!
//! Exit codes: 0 when everything asked for passed, 1 when a check failed or
//! a search came up empty, 2 for bad flags, unreadable files, invalid
//! instances and refused exports.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use ufa_core::automata::{build_swdfa, build_ufa, AutomatonError};
use ufa_core::bundle::{InstanceBundle, Provenance};
use ufa_core::primes::{select_cluster, select_desk, PrimeMode};
use ufa_core::residue::{ModuliSystem, ResidueVector};
use ufa_core::tournament::{certified_threshold, find_orientation, Tournament};
use ufa_core::verification::{
    check_automata, check_lemma8, check_lemma9, theorem10_verdict, AutomataOptions, Lemma8Options,
    Lemma9Options, Verdict,
};

#[derive(Parser)]
#[command(
    name = "ufa",
    version,
    about = "Unambiguous unary automata from tournaments and prime residues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a tournament with no inbound-covering set of size <= k.
    Orient {
        #[arg(long)]
        k: usize,
        /// Vertex count; defaults to 3 k^2 2^k.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_tries: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble an instance bundle from a tournament and a prime mode.
    Build {
        #[arg(long)]
        b: u32,
        /// Output of `orient`, or a bare tournament document.
        #[arg(long)]
        tournament: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Desk)]
        prime_mode: Mode,
        /// Desk mode: primes start above this value (default: vertex count).
        #[arg(long)]
        prime_floor: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites and emit JSON verdicts.
    Check {
        /// Required by every suite except theorem10.
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        d: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1 << 20)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Membership of one length in the language and its complement.
    Member {
        #[arg(long)]
        bundle: PathBuf,
        /// Decimal integer, `product-of-all-primes`, or `residues:r0,r1,...`.
        #[arg(long)]
        length: String,
    },
    /// Write an explicit automaton or the tournament.
    Export {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, value_enum)]
        what: Export,
        /// Largest automaton that may be materialized.
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Cluster,
    Desk,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lemma8,
    Lemma9,
    Theorem10,
    Automata,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Export {
    UfaDot,
    UfaJson,
    SwdfaJson,
    SwdfaComplementJson,
    TournamentDot,
}

/// What `orient` writes.
#[derive(Serialize, Deserialize)]
struct OrientationFile {
    tournament: Tournament,
    certified_k: usize,
    seed: u64,
    tries: u64,
}

enum Failure {
    Check(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").context("writing to stdout")
        }
    }
}

fn load_bundle(path: &Path) -> anyhow::Result<InstanceBundle> {
    InstanceBundle::load(path).with_context(|| format!("loading bundle {}", path.display()))
}

fn orient(
    k: usize,
    n: Option<usize>,
    seed: u64,
    max_tries: u64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let found = find_orientation(k, n, max_tries, seed).map_err(|e| match e {
        ufa_core::tournament::TournamentError::NotFound { .. } => Failure::Check(anyhow!(e)),
        other => Failure::Usage(anyhow!(other)),
    })?;
    let file = OrientationFile {
        tournament: found.tournament,
        certified_k: found.k,
        seed: found.seed,
        tries: found.tries,
    };
    emit(
        out,
        &serde_json::to_string_pretty(&file).expect("serializable"),
    )?;
    Ok(())
}

fn read_tournament(path: &Path) -> anyhow::Result<(Tournament, usize, Option<u64>, Option<u64>)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(file) = serde_json::from_str::<OrientationFile>(&text) {
        return Ok((
            file.tournament,
            file.certified_k,
            Some(file.seed),
            Some(file.tries),
        ));
    }
    let t: Tournament =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let k = certified_threshold(&t);
    Ok((t, k, None, None))
}

fn build(
    b: u32,
    tournament: &Path,
    mode: Mode,
    floor: Option<u64>,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let (t, certified_k, seed, tries) = read_tournament(tournament)?;
    if b < 2 {
        bail!("base must be at least 2, got {b}");
    }
    let count = (b as u64)
        .checked_pow(t.n() as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| anyhow!("b^n = {b}^{} primes is too many to list", t.n()))?
        as usize;
    let (primes, prime_mode, prime_floor) = match mode {
        Mode::Cluster => (select_cluster(count)?, PrimeMode::Cluster, None),
        Mode::Desk => {
            let floor = floor.unwrap_or(t.n() as u64);
            (select_desk(count, floor), PrimeMode::Desk, Some(floor))
        }
    };
    let system = ModuliSystem::new(b, primes, t).context("instance violates the construction")?;
    let bundle = InstanceBundle::new(
        system,
        Provenance {
            prime_mode,
            prime_floor,
            tournament_seed: seed,
            tournament_tries: tries,
            certified_k,
        },
    )?;
    emit(out, &bundle.to_json())
}

fn check(
    bundle: Option<&Path>,
    suite: Suite,
    d: u64,
    seed: u64,
    cap: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut verdicts: Vec<Verdict> = Vec::new();
    if suite != Suite::Theorem10 {
        let path = bundle.ok_or_else(|| anyhow!("--bundle is required for this suite"))?;
        let bundle = load_bundle(path)?;
        let ms = &bundle.system;
        let k = bundle.provenance.certified_k;
        if matches!(suite, Suite::Lemma8 | Suite::All) {
            verdicts.push(check_lemma8(
                ms,
                &Lemma8Options {
                    seed,
                    ..Lemma8Options::default()
                },
            ));
        }
        if matches!(suite, Suite::Lemma9 | Suite::All) {
            let opts = Lemma9Options {
                seed,
                ..Lemma9Options::default()
            };
            verdicts.push(check_lemma9(ms, k, &opts).map_err(|e| Failure::Check(anyhow!(e)))?);
        }
        if matches!(suite, Suite::Automata | Suite::All) {
            let opts = AutomataOptions {
                state_cap: cap,
                seed,
                ..AutomataOptions::default()
            };
            match check_automata(ms, &opts) {
                Ok(v) => verdicts.extend(v),
                Err(ufa_core::verification::VerificationError::Automaton(
                    AutomatonError::CapExceeded { required, cap },
                )) if suite == Suite::All => {
                    eprintln!("automata suite skipped: explicit automata need {required} states, cap is {cap}");
                }
                Err(e) => return Err(Failure::Check(anyhow!(e))),
            }
        }
    }
    if matches!(suite, Suite::Theorem10 | Suite::All) {
        verdicts.push(theorem10_verdict(d));
    }

    emit(
        out,
        &serde_json::to_string_pretty(&verdicts).expect("serializable"),
    )?;
    eprintln!("{:<28} result", "check");
    for v in &verdicts {
        eprintln!("{:<28} {}", v.check, if v.pass { "pass" } else { "FAIL" });
    }
    match verdicts.iter().find(|v| !v.pass) {
        Some(v) => Err(Failure::Check(anyhow!("check {} failed", v.check))),
        None => Ok(()),
    }
}

fn parse_length(ms: &ModuliSystem, spec: &str) -> anyhow::Result<BigUint> {
    if spec == "product-of-all-primes" {
        return Ok(ms.primes_product().clone());
    }
    if let Some(list) = spec.strip_prefix("residues:") {
        let residues = list
            .split(',')
            .map(|r| r.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("malformed residue list {list:?}"))?;
        return Ok(ms.crt_reconstruct(&ResidueVector(residues))?);
    }
    BigUint::from_str(spec).map_err(|_| anyhow!("malformed length {spec:?}: expected a decimal integer, product-of-all-primes or residues:r0,r1,..."))
}

fn member(bundle: &Path, spec: &str) -> anyhow::Result<()> {
    let bundle = load_bundle(bundle)?;
    let ms = &bundle.system;
    let length = parse_length(ms, spec)?;
    let residues = ms.residues_of(&length);
    let vertex = if length == BigUint::default() {
        None
    } else {
        ms.accepted_by(&residues)?
    };
    let report = serde_json::json!({
        "length": length.to_string(),
        "residues": residues,
        "in_language": vertex.is_some(),
        "in_complement": vertex.is_none(),
        "vertex": vertex,
    });
    emit(
        None,
        &serde_json::to_string_pretty(&report).expect("serializable"),
    )
}

fn export(bundle: &Path, what: Export, cap: usize, out: Option<&Path>) -> anyhow::Result<()> {
    let bundle = load_bundle(bundle)?;
    let ms = &bundle.system;
    let text = match what {
        Export::TournamentDot => ms.tournament().to_dot(),
        Export::UfaDot => build_ufa(ms, cap)?.nfa.to_dot(cap)?,
        Export::UfaJson => serde_json::to_string(&build_ufa(ms, cap)?.nfa).expect("serializable"),
        Export::SwdfaJson => {
            serde_json::to_string(&build_swdfa(ms, false, cap)?).expect("serializable")
        }
        Export::SwdfaComplementJson => {
            serde_json::to_string(&build_swdfa(ms, true, cap)?).expect("serializable")
        }
    };
    emit(out, text.trim_end())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Orient {
            k,
            n,
            seed,
            max_tries,
            out,
        } => orient(k, n, seed, max_tries, out.as_deref()),
        Command::Build {
            b,
            tournament,
            prime_mode,
            prime_floor,
            out,
        } => Ok(build(
            b,
            &tournament,
            prime_mode,
            prime_floor,
            out.as_deref(),
        )?),
        Command::Check {
            bundle,
            suite,
            d,
            seed,
            cap,
            out,
        } => check(bundle.as_deref(), suite, d, seed, cap, out.as_deref()),
        Command::Member { bundle, length } => Ok(member(&bundle, &length)?),
        Command::Export {
            bundle,
            what,
            cap,
            out,
        } => Ok(export(&bundle, what, cap, out.as_deref())?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
