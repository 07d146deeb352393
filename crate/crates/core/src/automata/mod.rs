//! Explicit automata for the residue language: the cycle-choosing 1UFA,
//! the pass-per-modulus sweeping DFA, and their evaluators.

pub mod matrix;
pub mod nfa;
pub mod period;
pub mod sweeping;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::residue::ModuliSystem;

pub use matrix::RunCount;
pub use nfa::{Ambiguity, NfaEvaluator, UnaryNfa};
pub use period::{minimal_period, PeriodReport, ResidueLanguage, UfaLanguage};
pub use sweeping::{
    Direction, Move, SweepOutcome, SweepRunner, SweepState, SweepingDfa, Symbol, Transition,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("state {state} is outside 0..{states}")]
    StateOutOfRange { state: usize, states: usize },
    #[error("explicit construction needs {required} states, cap is {cap}")]
    CapExceeded { required: BigUint, cap: usize },
    #[error("complementing by flipping accepting states needs a deterministic automaton")]
    Nondeterministic,
    #[error("complementing by flipping accepting states needs a complete automaton")]
    Incomplete,
    #[error("malformed sweeping automaton: {0}")]
    Malformed(String),
}

/// Which residues modulo `m_vertex` are acceptable, indexed by residue.
pub fn cycle_acceptance(ms: &ModuliSystem, vertex: usize, modulus: usize) -> Vec<bool> {
    let owned = ms.owned(vertex);
    let mut residues = vec![0u64; ms.prime_count()];
    let mut out = Vec::with_capacity(modulus);
    for _ in 0..modulus {
        out.push(ms.acceptable_raw(&residues, vertex));
        for &j in owned {
            residues[j] += 1;
            if residues[j] == ms.prime(j) {
                residues[j] = 0;
            }
        }
    }
    out
}

fn explicit_moduli(
    ms: &ModuliSystem,
    overhead: usize,
    cap: usize,
) -> Result<Vec<usize>, AutomatonError> {
    let moduli: Vec<BigUint> = (1..=ms.n())
        .map(|i| ms.modulus_value(i).expect("vertex in range"))
        .collect();
    let required = moduli.iter().sum::<BigUint>() + overhead;
    if required > BigUint::from(cap) {
        return Err(AutomatonError::CapExceeded { required, cap });
    }
    Ok(moduli
        .iter()
        .map(|m| m.to_usize().expect("below cap"))
        .collect())
}

/// The 1UFA: an initial state `(0)` that picks a cycle, then one cycle of
/// length `m_i` per vertex.
#[derive(Debug, Clone)]
pub struct CycleUfa {
    pub nfa: UnaryNfa,
    offsets: Vec<usize>,
    moduli: Vec<usize>,
}

impl CycleUfa {
    /// State index of `(vertex, residue)`.
    pub fn state_of(&self, vertex: usize, residue: usize) -> usize {
        self.offsets[vertex - 1] + residue
    }

    pub fn cycle_lengths(&self) -> &[usize] {
        &self.moduli
    }
}

/// States `(0)` and `(i, r)` for `0 <= r < m_i`. Reading the first letter
/// enters cycle `i` at residue 1, so after `L >= 1` letters the state is
/// `(i, L mod m_i)`. `(i, r)` accepts iff `r` is acceptable for `i`.
pub fn build_ufa(ms: &ModuliSystem, state_cap: usize) -> Result<CycleUfa, AutomatonError> {
    let moduli = explicit_moduli(ms, 1, state_cap)?;
    let total = 1 + moduli.iter().sum::<usize>();
    let mut offsets = Vec::with_capacity(moduli.len());
    let mut accepting = vec![false; total];
    let mut successors = vec![Vec::new(); total];
    let mut next = 1;
    for (idx, &m) in moduli.iter().enumerate() {
        let vertex = idx + 1;
        offsets.push(next);
        successors[0].push(next + 1 % m);
        for (r, ok) in cycle_acceptance(ms, vertex, m).into_iter().enumerate() {
            accepting[next + r] = ok;
            successors[next + r].push(next + (r + 1) % m);
        }
        next += m;
    }
    successors[0].sort_unstable();
    Ok(CycleUfa {
        nfa: UnaryNfa::from_parts(0, accepting, successors),
        offsets,
        moduli,
    })
}

/// Sweeping DFA with one left-to-right pass per vertex. Pass `i` counts the
/// length modulo `m_i`; at the right marker it halts if the residue is
/// acceptable for `i`, otherwise a single return state walks back to the
/// left marker and pass `i + 1` begins. After pass `n` it halts.
/// `complement` selects which halting state accepts.
///
/// State layout: counters of pass 1..n, then return states of passes
/// 2..n, then the "found" and "exhausted" halting states, for
/// `sum m_i + n + 1` states. Transitions that no run reaches are filled in
/// so the machine is complete.
pub fn build_swdfa(
    ms: &ModuliSystem,
    complement: bool,
    state_cap: usize,
) -> Result<SweepingDfa, AutomatonError> {
    let n = ms.n();
    let moduli = explicit_moduli(ms, n + 1, state_cap)?;
    let mut offsets = Vec::with_capacity(n);
    let mut states = Vec::new();
    for (idx, &m) in moduli.iter().enumerate() {
        offsets.push(states.len());
        states.extend((0..m as u64).map(|r| SweepState {
            pass: idx + 1,
            direction: Direction::Right,
            counter: Some(r),
        }));
    }
    let return_state = |pass: usize| offsets[n - 1] + moduli[n - 1] + (pass - 2);
    for pass in 2..=n {
        states.push(SweepState {
            pass,
            direction: Direction::Left,
            counter: None,
        });
    }
    let found = states.len();
    let exhausted = found + 1;
    for _ in 0..2 {
        states.push(SweepState {
            pass: 0,
            direction: Direction::Halt,
            counter: None,
        });
    }

    let go = |target, movement| Transition { target, movement };
    let mut transitions = Vec::new();
    for (idx, &m) in moduli.iter().enumerate() {
        let pass = idx + 1;
        let base = offsets[idx];
        for (r, ok) in cycle_acceptance(ms, pass, m).into_iter().enumerate() {
            let q = base + r;
            transitions.push((q, Symbol::Letter, go(base + (r + 1) % m, Move::Right)));
            transitions.push((q, Symbol::LeftEnd, go(q, Move::Right)));
            let at_end = if ok {
                go(found, Move::Stay)
            } else if pass < n {
                go(return_state(pass + 1), Move::Left)
            } else {
                go(exhausted, Move::Stay)
            };
            transitions.push((q, Symbol::RightEnd, at_end));
        }
    }
    for pass in 2..=n {
        let q = return_state(pass);
        transitions.push((q, Symbol::Letter, go(q, Move::Left)));
        transitions.push((q, Symbol::RightEnd, go(q, Move::Left)));
        transitions.push((q, Symbol::LeftEnd, go(offsets[pass - 1], Move::Right)));
    }
    let accepting = if complement { exhausted } else { found };
    SweepingDfa::new(states, transitions, offsets[0], [accepting])
}
