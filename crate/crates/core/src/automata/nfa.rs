//! One-way automata over a single letter.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use super::matrix::{BitLadder, BitMatrix, PowerLadder, RunCount, Semiring, SparseMatrix};
use super::AutomatonError;

/// Lengths up to this bound are evaluated by stepping successor sets.
pub const STEPPING_LIMIT: u64 = 1_000_000;

/// Automata with at most this many states use dense bitset matrices.
const DENSE_LIMIT: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryNfa {
    initial: usize,
    accepting: Vec<bool>,
    successors: Vec<Vec<usize>>,
}

impl UnaryNfa {
    /// Transitions are a set: duplicates collapse.
    pub fn new(
        states: usize,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, AutomatonError> {
        if initial >= states {
            return Err(AutomatonError::StateOutOfRange {
                state: initial,
                states,
            });
        }
        let mut acc = vec![false; states];
        for q in accepting {
            if q >= states {
                return Err(AutomatonError::StateOutOfRange { state: q, states });
            }
            acc[q] = true;
        }
        let mut successors = vec![Vec::new(); states];
        for (s, t) in transitions {
            for q in [s, t] {
                if q >= states {
                    return Err(AutomatonError::StateOutOfRange { state: q, states });
                }
            }
            successors[s].push(t);
        }
        for row in &mut successors {
            row.sort_unstable();
            row.dedup();
        }
        Ok(UnaryNfa {
            initial,
            accepting: acc,
            successors,
        })
    }

    pub(crate) fn from_parts(
        initial: usize,
        accepting: Vec<bool>,
        successors: Vec<Vec<usize>>,
    ) -> Self {
        UnaryNfa {
            initial,
            accepting,
            successors,
        }
    }

    pub fn states(&self) -> usize {
        self.successors.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.states()).filter(|&q| self.accepting[q]).collect()
    }

    pub fn successors(&self, q: usize) -> &[usize] {
        &self.successors[q]
    }

    pub fn transitions(&self) -> Vec<(usize, usize)> {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().map(move |&t| (s, t)))
            .collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.successors.iter().all(|row| row.len() <= 1)
    }

    pub fn is_complete(&self) -> bool {
        self.successors.iter().all(|row| !row.is_empty())
    }

    /// Membership by iterating successor sets, one letter at a time.
    pub fn accepts_by_stepping(&self, length: u64) -> bool {
        self.states_after_stepping(length)
            .iter()
            .any(|&q| self.accepting[q])
    }

    fn states_after_stepping(&self, length: u64) -> Vec<usize> {
        let mut current = vec![self.initial];
        let mut seen = vec![false; self.states()];
        for _ in 0..length {
            let mut next = Vec::new();
            for &q in &current {
                for &t in &self.successors[q] {
                    if !seen[t] {
                        seen[t] = true;
                        next.push(t);
                    }
                }
            }
            for &t in &next {
                seen[t] = false;
            }
            if next.is_empty() {
                return next;
            }
            current = next;
        }
        current
    }

    /// Membership of the word of the given length.
    pub fn accepts(&self, length: &BigUint) -> bool {
        match length.to_u64().filter(|&l| l <= STEPPING_LIMIT) {
            Some(l) => self.accepts_by_stepping(l),
            None => NfaEvaluator::new(self).accepts_by_matrix_power(length),
        }
    }

    /// Accepting runs of the given length, saturated at two.
    pub fn count_accepting_runs(&self, length: &BigUint) -> RunCount {
        NfaEvaluator::new(self).count_accepting_runs(length)
    }

    /// Exact number of accepting runs; only for small instances.
    pub fn count_accepting_runs_exact(&self, length: &BigUint) -> BigUint {
        let mut ladder =
            PowerLadder::<BigUint>::new(SparseMatrix::from_successors(&self.successors));
        ladder
            .apply_power(vec![(self.initial, BigUint::one())], length)
            .into_iter()
            .filter(|(q, _)| self.accepting[*q])
            .map(|(_, c)| c)
            .sum()
    }

    /// Decides unambiguity on the self-product. Pairs are kept unordered and
    /// tagged with whether the two runs have ever differed; the automaton is
    /// ambiguous iff a tagged pair of accepting states is reachable. The
    /// witness is the shortest such length.
    pub fn is_unambiguous(&self) -> Ambiguity {
        let states = self.states() as u64;
        let key = |p: usize, q: usize, diverged: bool| {
            let (a, b) = if p <= q { (p, q) } else { (q, p) };
            ((a as u64 * states + b as u64) << 1) | diverged as u64
        };
        let mut seen = FxHashSet::default();
        let mut frontier = vec![(self.initial, self.initial, false)];
        seen.insert(key(self.initial, self.initial, false));
        let mut depth = 0u64;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for (p, q, diverged) in frontier {
                let ps = &self.successors[p];
                let qs = &self.successors[q];
                for (ip, &p2) in ps.iter().enumerate() {
                    // unordered pairs: when p == q, q2 >= p2 suffices
                    let start = if p == q && !diverged { ip } else { 0 };
                    for &q2 in &qs[start.min(qs.len())..] {
                        let d = diverged || p2 != q2;
                        if d && self.accepting[p2] && self.accepting[q2] {
                            return Ambiguity::Ambiguous {
                                witness_length: depth,
                            };
                        }
                        if seen.insert(key(p2, q2, d)) {
                            next.push((p2, q2, d));
                        }
                    }
                }
            }
            frontier = next;
        }
        Ambiguity::Unambiguous {
            product_pairs: seen.len(),
        }
    }

    /// Swaps accepting and rejecting states. Only sound for complete
    /// deterministic automata, so anything else is refused.
    pub fn complement_accepting_flip(&self) -> Result<UnaryNfa, AutomatonError> {
        if !self.is_deterministic() {
            return Err(AutomatonError::Nondeterministic);
        }
        if !self.is_complete() {
            return Err(AutomatonError::Incomplete);
        }
        Ok(UnaryNfa {
            initial: self.initial,
            accepting: self.accepting.iter().map(|a| !a).collect(),
            successors: self.successors.clone(),
        })
    }

    /// Graphviz rendering, refused above `cap` states.
    pub fn to_dot(&self, cap: usize) -> Result<String, AutomatonError> {
        if self.states() > cap {
            return Err(AutomatonError::CapExceeded {
                required: BigUint::from(self.states()),
                cap,
            });
        }
        let mut out = String::from("digraph ufa {\n  rankdir=LR;\n  start [shape=point];\n");
        let _ = writeln!(out, "  start -> q{};", self.initial);
        for q in 0..self.states() {
            let shape = if self.accepting[q] {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  q{q} [shape={shape}];");
        }
        for (s, t) in self.transitions() {
            let _ = writeln!(out, "  q{s} -> q{t};");
        }
        out.push_str("}\n");
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambiguity {
    Unambiguous { product_pairs: usize },
    Ambiguous { witness_length: u64 },
}

impl Ambiguity {
    pub fn is_unambiguous(&self) -> bool {
        matches!(self, Ambiguity::Unambiguous { .. })
    }
}

enum BoolPowers {
    Dense(BitLadder),
    Sparse(PowerLadder<bool>),
}

/// Matrix-power evaluator that keeps its squared matrices between queries.
pub struct NfaEvaluator<'a> {
    nfa: &'a UnaryNfa,
    reach: BoolPowers,
    counts: Option<PowerLadder<RunCount>>,
}

impl<'a> NfaEvaluator<'a> {
    pub fn new(nfa: &'a UnaryNfa) -> Self {
        let reach = if nfa.states() <= DENSE_LIMIT {
            BoolPowers::Dense(BitLadder::new(BitMatrix::from_successors(&nfa.successors)))
        } else {
            BoolPowers::Sparse(PowerLadder::new(SparseMatrix::from_successors(
                &nfa.successors,
            )))
        };
        NfaEvaluator {
            nfa,
            reach,
            counts: None,
        }
    }

    pub fn accepts_by_matrix_power(&mut self, length: &BigUint) -> bool {
        let nfa = self.nfa;
        match &mut self.reach {
            BoolPowers::Dense(ladder) => {
                let mut start = vec![0u64; nfa.states().div_ceil(64).max(1)];
                start[nfa.initial / 64] |= 1 << (nfa.initial % 64);
                let v = ladder.apply_power(start, length);
                (0..nfa.states()).any(|q| nfa.accepting[q] && v[q / 64] >> (q % 64) & 1 == 1)
            }
            BoolPowers::Sparse(ladder) => ladder
                .apply_power(vec![(nfa.initial, true)], length)
                .iter()
                .any(|(q, _)| nfa.accepting[*q]),
        }
    }

    pub fn count_accepting_runs(&mut self, length: &BigUint) -> RunCount {
        let nfa = self.nfa;
        let ladder = self.counts.get_or_insert_with(|| {
            PowerLadder::new(SparseMatrix::from_successors(&nfa.successors))
        });
        ladder
            .apply_power(vec![(nfa.initial, RunCount::One)], length)
            .iter()
            .filter(|(q, _)| nfa.accepting[*q])
            .fold(RunCount::Zero, |acc, (_, c)| acc.add(c))
    }

    /// Saturated run counts for every length in `0..=max_len`, by stepping a
    /// count vector.
    pub fn run_counts_by_stepping(&self, max_len: u64) -> Vec<RunCount> {
        let nfa = self.nfa;
        let mut v: Vec<(usize, RunCount)> = vec![(nfa.initial, RunCount::One)];
        let matrix = SparseMatrix::<RunCount>::from_successors(&nfa.successors);
        let mut out = Vec::with_capacity(max_len as usize + 1);
        for len in 0..=max_len {
            out.push(
                v.iter()
                    .filter(|(q, _)| nfa.accepting[*q])
                    .fold(RunCount::Zero, |acc, (_, c)| acc.add(c)),
            );
            if len < max_len {
                v = matrix.apply(&v);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct NfaWire {
    states: usize,
    initial: usize,
    accepting: Vec<usize>,
    transitions: Vec<[usize; 2]>,
}

impl Serialize for UnaryNfa {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        NfaWire {
            states: self.states(),
            initial: self.initial,
            accepting: self.accepting_states(),
            transitions: self
                .transitions()
                .into_iter()
                .map(|(s, t)| [s, t])
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UnaryNfa {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let w = NfaWire::deserialize(deserializer)?;
        UnaryNfa::new(
            w.states,
            w.initial,
            w.accepting,
            w.transitions.into_iter().map(|[s, t]| (s, t)),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_parallel_cycles() -> UnaryNfa {
        // 0 -> 1 -> 1 and 0 -> 2 -> 2, both loops accepting
        UnaryNfa::new(3, 0, [1, 2], [(0, 1), (1, 1), (0, 2), (2, 2)]).unwrap()
    }

    fn random_nfa(rng: &mut ChaCha8Rng) -> UnaryNfa {
        let states = rng.gen_range(1..=30);
        let edges: Vec<(usize, usize)> = (0..rng.gen_range(0..3 * states))
            .map(|_| (rng.gen_range(0..states), rng.gen_range(0..states)))
            .collect();
        let accepting: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.3)).collect();
        UnaryNfa::new(states, rng.gen_range(0..states), accepting, edges).unwrap()
    }

    #[test]
    fn empty_run_accepts_when_initial_accepts() {
        let nfa = UnaryNfa::new(2, 0, [0], [(0, 1)]).unwrap();
        assert!(nfa.accepts(&BigUint::zero()));
        assert!(!nfa.accepts(&BigUint::one()));
        assert!(!nfa.accepts(&BigUint::from(2u32)));
    }

    #[test]
    fn parallel_cycles_are_ambiguous_at_length_one() {
        let nfa = two_parallel_cycles();
        assert_eq!(nfa.count_accepting_runs(&BigUint::zero()), RunCount::Zero);
        for len in [1u64, 2, 7, 1 << 40] {
            assert_eq!(
                nfa.count_accepting_runs(&BigUint::from(len)),
                RunCount::Many
            );
        }
        assert_eq!(
            nfa.is_unambiguous(),
            Ambiguity::Ambiguous { witness_length: 1 }
        );
        assert_eq!(
            nfa.count_accepting_runs_exact(&BigUint::from(5u32)),
            BigUint::from(2u32)
        );
    }

    #[test]
    fn deterministic_automata_are_unambiguous() {
        let dfa = UnaryNfa::new(4, 0, [2], [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(dfa.is_unambiguous().is_unambiguous());
    }

    #[test]
    fn ambiguity_after_runs_merge() {
        // two runs split at 0 and rejoin at 3, which accepts
        let nfa = UnaryNfa::new(4, 0, [3], [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            nfa.is_unambiguous(),
            Ambiguity::Ambiguous { witness_length: 2 }
        );
        assert_eq!(
            nfa.count_accepting_runs(&BigUint::from(2u32)),
            RunCount::Many
        );
    }

    #[test]
    fn flip_requires_complete_determinism() {
        assert_eq!(
            two_parallel_cycles().complement_accepting_flip(),
            Err(AutomatonError::Nondeterministic)
        );
        let partial = UnaryNfa::new(2, 0, [1], [(0, 1)]).unwrap();
        assert_eq!(
            partial.complement_accepting_flip(),
            Err(AutomatonError::Incomplete)
        );
        let all = UnaryNfa::new(1, 0, [0], [(0, 0)]).unwrap();
        let none = all.complement_accepting_flip().unwrap();
        assert!((0..50u64).all(|l| !none.accepts_by_stepping(l)));
        assert_eq!(none.complement_accepting_flip().unwrap(), all);
    }

    #[test]
    fn stepping_and_matrix_power_agree_on_random_automata() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let nfa = random_nfa(&mut rng);
            let mut eval = NfaEvaluator::new(&nfa);
            for len in 0..300u64 {
                assert_eq!(
                    nfa.accepts_by_stepping(len),
                    eval.accepts_by_matrix_power(&BigUint::from(len))
                );
            }
        }
    }

    #[test]
    fn unambiguity_agrees_with_run_counts_on_random_automata() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let nfa = random_nfa(&mut rng);
            let eval = NfaEvaluator::new(&nfa);
            let counts = eval.run_counts_by_stepping(200);
            match nfa.is_unambiguous() {
                Ambiguity::Unambiguous { .. } => {
                    assert!(counts.iter().all(|&c| c != RunCount::Many))
                }
                Ambiguity::Ambiguous { witness_length } => {
                    assert_eq!(counts[witness_length as usize], RunCount::Many);
                    assert!(counts[..witness_length as usize]
                        .iter()
                        .all(|&c| c != RunCount::Many));
                }
            }
        }
    }

    #[test]
    fn json_schema() {
        let nfa = UnaryNfa::new(2, 0, [1], [(0, 1), (1, 1)]).unwrap();
        let json = serde_json::to_string(&nfa).unwrap();
        assert_eq!(
            json,
            r#"{"states":2,"initial":0,"accepting":[1],"transitions":[[0,1],[1,1]]}"#
        );
        assert_eq!(serde_json::from_str::<UnaryNfa>(&json).unwrap(), nfa);
        assert!(serde_json::from_str::<UnaryNfa>(
            r#"{"states":1,"initial":0,"accepting":[],"transitions":[[0,3]]}"#
        )
        .is_err());
    }

    #[test]
    fn dot_respects_cap() {
        let nfa = two_parallel_cycles();
        assert!(nfa.to_dot(3).unwrap().contains("q0 -> q1;"));
        assert!(matches!(
            nfa.to_dot(2),
            Err(AutomatonError::CapExceeded { .. })
        ));
    }
}
