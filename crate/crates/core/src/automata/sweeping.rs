//! Sweeping deterministic two-way automata over a single letter, with the
//! endpoint markers `|-` (left) and `-|` (right).
//!
//! Positions run from 0 (`|-`) to `L + 1` (`-|`); a run starts at position
//! 1 and ends with the first non-moving transition. Each state has one
//! direction of movement on letters.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::AutomatonError;

/// Direct simulation is used for lengths up to this bound in [`SweepRunner::run`].
pub const DIRECT_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    #[serde(rename = "a")]
    Letter,
    #[serde(rename = "|-")]
    LeftEnd,
    #[serde(rename = "-|")]
    RightEnd,
}

impl Symbol {
    fn slot(self) -> usize {
        match self {
            Symbol::Letter => 0,
            Symbol::LeftEnd => 1,
            Symbol::RightEnd => 2,
        }
    }

    const ALL: [Symbol; 3] = [Symbol::Letter, Symbol::LeftEnd, Symbol::RightEnd];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
    /// Terminal state, entered only by a non-moving transition.
    Halt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    fn delta(self) -> i8 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }

    fn from_delta(d: i8) -> Option<Move> {
        match d {
            -1 => Some(Move::Left),
            0 => Some(Move::Stay),
            1 => Some(Move::Right),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepState {
    /// 1-based pass this state belongs to; 0 for halting states.
    pub pass: usize,
    pub direction: Direction,
    /// Residue tracked by a counting state.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counter: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub target: usize,
    pub movement: Move,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepingDfa {
    states: Vec<SweepState>,
    table: Vec<[Option<Transition>; 3]>,
    initial: usize,
    accepting: Vec<bool>,
}

impl SweepingDfa {
    /// Validates indices and the sweeping discipline: letter moves follow
    /// the state's direction (or stop), marker moves stay on the tape,
    /// non-moving transitions enter halting states, and halting states have
    /// no transitions. Determinism holds by construction (one slot per
    /// state and symbol).
    pub fn new(
        states: Vec<SweepState>,
        transitions: impl IntoIterator<Item = (usize, Symbol, Transition)>,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
    ) -> Result<Self, AutomatonError> {
        let count = states.len();
        let in_range = |q: usize| {
            if q < count {
                Ok(())
            } else {
                Err(AutomatonError::StateOutOfRange {
                    state: q,
                    states: count,
                })
            }
        };
        in_range(initial)?;
        let mut table = vec![[None; 3]; count];
        for (source, symbol, tr) in transitions {
            in_range(source)?;
            in_range(tr.target)?;
            let slot = &mut table[source][symbol.slot()];
            if slot.is_some() {
                return Err(AutomatonError::Malformed(format!(
                    "state {source} has two transitions on {symbol:?}"
                )));
            }
            *slot = Some(tr);
        }
        let mut acc = vec![false; count];
        for q in accepting {
            in_range(q)?;
            acc[q] = true;
        }
        let dfa = SweepingDfa {
            states,
            table,
            initial,
            accepting: acc,
        };
        dfa.check_discipline()?;
        Ok(dfa)
    }

    fn check_discipline(&self) -> Result<(), AutomatonError> {
        for (q, state) in self.states.iter().enumerate() {
            for symbol in Symbol::ALL {
                let Some(tr) = self.table[q][symbol.slot()] else {
                    continue;
                };
                let bad = |why: &str| {
                    Err(AutomatonError::Malformed(format!(
                        "state {q} on {symbol:?}: {why}"
                    )))
                };
                if state.direction == Direction::Halt {
                    return bad("halting state has a transition");
                }
                if tr.movement == Move::Stay {
                    if self.states[tr.target].direction != Direction::Halt {
                        return bad("non-moving transition into a non-halting state");
                    }
                    continue;
                }
                match symbol {
                    Symbol::Letter => {
                        let expected = if state.direction == Direction::Right {
                            Move::Right
                        } else {
                            Move::Left
                        };
                        if tr.movement != expected {
                            return bad("moves against the state's sweep direction");
                        }
                    }
                    Symbol::LeftEnd if tr.movement == Move::Left => {
                        return bad("falls off the left marker")
                    }
                    Symbol::RightEnd if tr.movement == Move::Right => {
                        return bad("falls off the right marker")
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn states(&self) -> &[SweepState] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn transition(&self, q: usize, symbol: Symbol) -> Option<Transition> {
        self.table[q][symbol.slot()]
    }

    /// Every non-halting state has a transition on every symbol.
    pub fn is_complete(&self) -> bool {
        self.states
            .iter()
            .zip(&self.table)
            .all(|(s, row)| s.direction == Direction::Halt || row.iter().all(Option::is_some))
    }

    /// Swaps accepting and rejecting states. Refused unless every reachable
    /// configuration has a transition, which completeness guarantees.
    pub fn complement_accepting_flip(&self) -> Result<SweepingDfa, AutomatonError> {
        if !self.is_complete() {
            return Err(AutomatonError::Incomplete);
        }
        let mut flipped = self.clone();
        flipped.accepting.iter_mut().for_each(|a| *a = !*a);
        Ok(flipped)
    }
}

/// One arrival at the right marker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PassRecord {
    pub pass: usize,
    pub state: usize,
    pub residue: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepOutcome {
    pub accepted: bool,
    pub final_state: usize,
    pub passes: Vec<PassRecord>,
}

/// Where a sweep of `L` letters started in a given state ends up.
#[derive(Debug, Clone)]
struct Orbit {
    // states visited before each letter step: path[0] is the start state
    path: Vec<usize>,
    // index in path where the orbit becomes periodic, if it does
    cycle_start: Option<usize>,
    // state entered by the last letter step when the next state would
    // leave the sweep direction
    exit: Option<usize>,
}

impl Orbit {
    /// State after `steps` letter moves, or `None` if the sweep leaves the
    /// letter-following regime before that.
    fn state_after(&self, steps: &BigUint) -> Option<usize> {
        if let Some(s) = steps.to_usize().filter(|&s| s < self.path.len()) {
            return Some(self.path[s]);
        }
        if steps.to_usize() == Some(self.path.len()) && self.exit.is_some() {
            return self.exit;
        }
        let start = self.cycle_start?;
        let period = self.path.len() - start;
        let offset = ((steps - start) % period).to_usize().expect("below period");
        Some(self.path[start + offset])
    }
}

/// Simulator with two evaluators: position-by-position, and a residue mode
/// that jumps across whole sweeps using the cycle structure of the letter
/// transitions.
pub struct SweepRunner<'a> {
    dfa: &'a SweepingDfa,
    orbits: FxHashMap<usize, Orbit>,
}

enum End {
    Left,
    Right,
}

impl<'a> SweepRunner<'a> {
    pub fn new(dfa: &'a SweepingDfa) -> Self {
        SweepRunner {
            dfa,
            orbits: FxHashMap::default(),
        }
    }

    fn record(&self, q: usize, passes: &mut Vec<PassRecord>) {
        let s = &self.dfa.states[q];
        passes.push(PassRecord {
            pass: s.pass,
            state: q,
            residue: s.counter,
        });
    }

    fn finish(&self, q: usize, passes: Vec<PassRecord>) -> SweepOutcome {
        SweepOutcome {
            accepted: self.dfa.accepting[q],
            final_state: q,
            passes,
        }
    }

    fn stuck(q: usize, symbol: Symbol) -> AutomatonError {
        AutomatonError::Malformed(format!("run stuck in state {q} on {symbol:?}"))
    }

    /// Position-by-position simulation.
    pub fn run_direct(&self, length: u64) -> Result<SweepOutcome, AutomatonError> {
        let dfa = self.dfa;
        let last = length + 1;
        let budget = (length + 2) * (2 * dfa.state_count() as u64 + 2);
        let (mut pos, mut q) = (1u64, dfa.initial);
        let mut passes = Vec::new();
        for _ in 0..budget {
            let symbol = match pos {
                0 => Symbol::LeftEnd,
                p if p == last => Symbol::RightEnd,
                _ => Symbol::Letter,
            };
            if symbol == Symbol::RightEnd {
                self.record(q, &mut passes);
            }
            let tr = dfa
                .transition(q, symbol)
                .ok_or_else(|| Self::stuck(q, symbol))?;
            if tr.movement == Move::Stay {
                return Ok(self.finish(tr.target, passes));
            }
            pos = pos
                .checked_add_signed(tr.movement.delta() as i64)
                .filter(|&p| p <= last)
                .ok_or_else(|| AutomatonError::Malformed(format!("state {q} leaves the tape")))?;
            q = tr.target;
        }
        Err(AutomatonError::Malformed("run does not terminate".into()))
    }

    fn orbit(&mut self, start: usize) -> &Orbit {
        let dfa = self.dfa;
        self.orbits.entry(start).or_insert_with(|| {
            let dir = dfa.states[start].direction;
            let mut path = vec![start];
            let mut index: FxHashMap<usize, usize> = FxHashMap::default();
            index.insert(start, 0);
            let mut q = start;
            loop {
                let Some(tr) = dfa.transition(q, Symbol::Letter) else {
                    return Orbit {
                        path,
                        cycle_start: None,
                        exit: None,
                    };
                };
                if tr.movement == Move::Stay {
                    return Orbit {
                        path,
                        cycle_start: None,
                        exit: None,
                    };
                }
                if dfa.states[tr.target].direction != dir {
                    return Orbit {
                        path,
                        cycle_start: None,
                        exit: Some(tr.target),
                    };
                }
                q = tr.target;
                if let Some(&i) = index.get(&q) {
                    return Orbit {
                        path,
                        cycle_start: Some(i),
                        exit: None,
                    };
                }
                index.insert(q, path.len());
                path.push(q);
            }
        })
    }

    /// Residue-mode simulation: each full sweep is resolved by indexing the
    /// orbit of its starting state, so arbitrarily long words cost
    /// `O(states)` per pass. Falls back to direct simulation when a sweep
    /// turns around mid-word and the length is small.
    pub fn run_by_residues(&mut self, length: &BigUint) -> Result<SweepOutcome, AutomatonError> {
        let dfa = self.dfa;
        let mut passes = Vec::new();
        let mut seen = rustc_hash::FxHashSet::default();
        // The run starts at position 1 with the initial state: a rightward
        // sweep over all letters unless the word is empty.
        let mut q = dfa.initial;
        if !length.is_zero() {
            q = self.sweep(q, length, Move::Right)?;
        }
        let mut at = End::Right;
        loop {
            let symbol = match at {
                End::Left => Symbol::LeftEnd,
                End::Right => Symbol::RightEnd,
            };
            if !seen.insert((q, symbol)) {
                return Err(AutomatonError::Malformed("run does not terminate".into()));
            }
            if symbol == Symbol::RightEnd {
                self.record(q, &mut passes);
            }
            let tr = dfa
                .transition(q, symbol)
                .ok_or_else(|| Self::stuck(q, symbol))?;
            match (tr.movement, symbol) {
                (Move::Stay, _) => return Ok(self.finish(tr.target, passes)),
                (Move::Left, Symbol::RightEnd) | (Move::Right, Symbol::LeftEnd) => {
                    if length.is_zero() {
                        // the other marker is adjacent
                        q = tr.target;
                        at = if symbol == Symbol::RightEnd {
                            End::Left
                        } else {
                            End::Right
                        };
                    } else {
                        q = self.sweep(tr.target, length, tr.movement)?;
                        at = if symbol == Symbol::RightEnd {
                            End::Left
                        } else {
                            End::Right
                        };
                    }
                }
                _ => unreachable!("validated: markers never push off the tape"),
            }
        }
    }

    /// State reached after crossing all `length` letters in the given
    /// direction, starting on the first letter of the sweep.
    fn sweep(
        &mut self,
        start: usize,
        length: &BigUint,
        way: Move,
    ) -> Result<usize, AutomatonError> {
        let dir = self.dfa.states[start].direction;
        let expected = if way == Move::Right {
            Direction::Right
        } else {
            Direction::Left
        };
        if dir == expected {
            if let Some(q) = self.orbit(start).state_after(length) {
                return Ok(q);
            }
        }
        Err(AutomatonError::Malformed(format!(
            "sweep from state {start} does not cross the word in one direction"
        )))
    }

    /// Direct simulation up to [`DIRECT_LIMIT`], residue mode beyond.
    pub fn run(&mut self, length: &BigUint) -> Result<SweepOutcome, AutomatonError> {
        match length.to_u64().filter(|&l| l <= DIRECT_LIMIT) {
            Some(l) => self.run_direct(l),
            None => self.run_by_residues(length),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SweepWire {
    states: Vec<SweepState>,
    initial: usize,
    accepting: Vec<usize>,
    transitions: Vec<(usize, Symbol, usize, i8)>,
}

impl Serialize for SweepingDfa {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut transitions = Vec::new();
        for (q, row) in self.table.iter().enumerate() {
            for symbol in Symbol::ALL {
                if let Some(tr) = row[symbol.slot()] {
                    transitions.push((q, symbol, tr.target, tr.movement.delta()));
                }
            }
        }
        SweepWire {
            states: self.states.clone(),
            initial: self.initial,
            accepting: (0..self.states.len())
                .filter(|&q| self.accepting[q])
                .collect(),
            transitions,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SweepingDfa {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = SweepWire::deserialize(deserializer)?;
        let mut transitions = Vec::with_capacity(w.transitions.len());
        for (q, symbol, target, delta) in w.transitions {
            let movement = Move::from_delta(delta)
                .ok_or_else(|| D::Error::custom(format!("bad move {delta}")))?;
            transitions.push((q, symbol, Transition { target, movement }));
        }
        SweepingDfa::new(w.states, transitions, w.initial, w.accepting).map_err(D::Error::custom)
    }
}
