//! Verification engine for a family of unary unambiguous automata built
//! from tournaments and sets of primes, whose complements need many states
//! in any sweeping two-way DFA.
//!
//! The pipeline runs tournament search ([`tournament`]), prime selection
//! ([`primes`]), the moduli system and acceptability predicate
//! ([`residue`]), explicit automata ([`automata`]) and the checkers that
//! produce JSON verdicts ([`verification`]).

pub mod automata;
pub mod bundle;
pub mod logspace;
pub mod primes;
pub mod residue;
pub mod tournament;
pub mod verification;

pub use automata::{build_swdfa, build_ufa, AutomatonError, CycleUfa, SweepingDfa, UnaryNfa};
pub use bundle::{InstanceBundle, Provenance};
pub use primes::{PrimeMode, PrimeSet};
pub use residue::{ModuliSystem, PrimeSubset, ResidueVector, SystemError};
pub use tournament::Tournament;
pub use verification::Verdict;
