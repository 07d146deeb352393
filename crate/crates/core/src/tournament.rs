//! Tournaments (complete oriented graphs) and inbound-covering sets.
//!
//! Vertices are labelled `1..=n` at the public surface. A set `S` is
//! inbound-covering when every vertex outside `S` has an edge pointing
//! into `S`. The construction needs tournaments whose smallest such set is
//! larger than a threshold `k`; [`find_orientation`] searches for them and
//! re-verifies every candidate exhaustively, so its output is a certificate.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::logspace::ln_biguint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TournamentError {
    #[error("a tournament needs at least one vertex")]
    InvalidSize,
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("pair {{{0}, {1}}} is oriented in both directions")]
    BothDirections(usize, usize),
    #[error("pair {{{0}, {1}}} has no orientation")]
    MissingPair(usize, usize),
    #[error("covering limit k={k} must lie in 1..={n}")]
    InvalidLimit { k: usize, n: usize },
    #[error("size bound {0} does not fit in memory")]
    BoundTooLarge(BigUint),
    #[error(
        "no orientation of {n} vertices without inbound-covering sets of size <= {k} \
         found in {tries} tries (closest: seed {best_seed} with a covering set of size {best_cover})"
    )]
    NotFound {
        k: usize,
        n: usize,
        tries: u64,
        best_seed: u64,
        best_cover: usize,
    },
}

/// A complete graph on `1..=n` with every edge oriented.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tournament {
    n: usize,
    words: usize,
    // out[u * words ..] is the bitset of targets of vertex u (0-based).
    out: Vec<u64>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tournament")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl Tournament {
    fn blank(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Tournament {
            n,
            words,
            out: vec![0; n * words],
        }
    }

    fn orient0(&mut self, from: usize, to: usize) {
        self.out[from * self.words + to / 64] |= 1 << (to % 64);
    }

    fn beats0(&self, from: usize, to: usize) -> bool {
        self.out[from * self.words + to / 64] >> (to % 64) & 1 == 1
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.out[v * self.words..(v + 1) * self.words]
    }

    /// Builds a tournament by asking `forward(u, v)` for every pair `u < v`
    /// (1-based); `true` orients the edge `u -> v`, `false` orients `v -> u`.
    pub fn from_fn(
        n: usize,
        mut forward: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, TournamentError> {
        if n == 0 {
            return Err(TournamentError::InvalidSize);
        }
        let mut t = Tournament::blank(n);
        for u in 0..n {
            for v in u + 1..n {
                if forward(u + 1, v + 1) {
                    t.orient0(u, v);
                } else {
                    t.orient0(v, u);
                }
            }
        }
        Ok(t)
    }

    /// Builds a tournament from an explicit list of `(source, target)` edges.
    /// Every unordered pair must appear exactly once.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TournamentError> {
        if n == 0 {
            return Err(TournamentError::InvalidSize);
        }
        let mut t = Tournament::blank(n);
        for &(u, v) in edges {
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(TournamentError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(TournamentError::SelfLoop(u));
            }
            let (a, b) = (u - 1, v - 1);
            if t.beats0(a, b) || t.beats0(b, a) {
                return Err(TournamentError::BothDirections(u.min(v), u.max(v)));
            }
            t.orient0(a, b);
        }
        for u in 0..n {
            for v in u + 1..n {
                if !t.beats0(u, v) && !t.beats0(v, u) {
                    return Err(TournamentError::MissingPair(u + 1, v + 1));
                }
            }
        }
        Ok(t)
    }

    /// The cyclic triangle `1 -> 2 -> 3 -> 1`.
    pub fn cyclic_triangle() -> Self {
        Tournament::from_edges(3, &[(1, 2), (2, 3), (3, 1)]).expect("valid triangle")
    }

    /// The transitive tournament where `u -> v` whenever `u < v`.
    pub fn transitive(n: usize) -> Result<Self, TournamentError> {
        Tournament::from_fn(n, |_, _| true)
    }

    /// Every orientation of the complete graph on `n` vertices, in the
    /// order of the bitmask over pairs `(u, v)`, `u < v`, listed
    /// lexicographically. Only sensible for very small `n`.
    pub fn all_orientations(n: usize) -> impl Iterator<Item = Tournament> {
        let pairs = n * n.saturating_sub(1) / 2;
        assert!(pairs < 40, "too many orientations to enumerate");
        (0u64..1 << pairs).map(move |mask| {
            let mut bit = 0;
            Tournament::from_fn(n.max(1), |_, _| {
                let forward = mask >> bit & 1 == 1;
                bit += 1;
                forward
            })
            .expect("n >= 1")
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The relation R: `true` iff the edge between `u` and `v` is oriented
    /// towards `v`. Labels outside `1..=n` never relate.
    pub fn points_to(&self, u: usize, v: usize) -> bool {
        u >= 1 && v >= 1 && u <= self.n && v <= self.n && self.beats0(u - 1, v - 1)
    }

    /// Targets of the edges leaving `u`, ascending.
    pub fn out_neighbors(&self, u: usize) -> Vec<usize> {
        (1..=self.n).filter(|&v| self.points_to(u, v)).collect()
    }

    /// All edges as `(source, target)`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for u in 1..=self.n {
            for v in 1..=self.n {
                if self.points_to(u, v) {
                    edges.push((u, v));
                }
            }
        }
        edges
    }

    pub fn is_cyclic_triangle(&self) -> bool {
        self.n == 3 && (1..=3).all(|v| self.out_neighbors(v).len() == 1)
    }

    fn check_vertices(&self, set: &[usize]) -> Result<Vec<u64>, TournamentError> {
        let mut mask = vec![0u64; self.words];
        for &v in set {
            if v == 0 || v > self.n {
                return Err(TournamentError::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
            mask[(v - 1) / 64] |= 1 << ((v - 1) % 64);
        }
        Ok(mask)
    }

    fn covers_mask(&self, mask: &[u64]) -> bool {
        (0..self.n).all(|v| {
            let inside = mask[v / 64] >> (v % 64) & 1 == 1;
            inside || self.row(v).iter().zip(mask).any(|(r, m)| r & m != 0)
        })
    }

    /// Graphviz rendering of the digraph.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tournament {\n");
        for v in 1..=self.n {
            let _ = writeln!(out, "  {v};");
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {u} -> {v};");
        }
        out.push_str("}\n");
        out
    }
}

/// Draws each of the `n(n-1)/2` orientations from an independent fair coin.
/// The generator is ChaCha8 seeded from `seed`, so output is reproducible
/// across platforms.
pub fn random_orientation(n: usize, seed: u64) -> Result<Tournament, TournamentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Tournament::from_fn(n, |_, _| rng.gen::<bool>())
}

/// `true` iff every vertex outside `set` has an edge into `set`.
pub fn is_inbound_covering(t: &Tournament, set: &[usize]) -> Result<bool, TournamentError> {
    let mask = t.check_vertices(set)?;
    Ok(t.covers_mask(&mask))
}

/// The lexicographically first inbound-covering set of the smallest size
/// not exceeding `k`, or `None` when every set of size `<= k` fails.
pub fn smallest_inbound_covering(
    t: &Tournament,
    k: usize,
) -> Result<Option<Vec<usize>>, TournamentError> {
    if k == 0 || k > t.n {
        return Err(TournamentError::InvalidLimit { k, n: t.n });
    }
    let mut mask = vec![0u64; t.words];
    for size in 1..=k {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            mask.iter_mut().for_each(|w| *w = 0);
            for &v in &combo {
                mask[v / 64] |= 1 << (v % 64);
            }
            if t.covers_mask(&mask) {
                return Ok(Some(combo.iter().map(|v| v + 1).collect()));
            }
            if !next_combination(&mut combo, t.n) {
                break;
            }
        }
    }
    Ok(None)
}

/// Size of the smallest inbound-covering set, if it is at most `k`.
pub fn smallest_inbound_covering_size(
    t: &Tournament,
    k: usize,
) -> Result<Option<usize>, TournamentError> {
    Ok(smallest_inbound_covering(t, k)?.map(|s| s.len()))
}

/// The largest `k` for which `t` has no inbound-covering set of size `<= k`
/// (0 when a single vertex already covers).
pub fn certified_threshold(t: &Tournament) -> usize {
    // The full vertex set always covers, so the search terminates.
    (1..=t.n)
        .find(|&k| {
            smallest_inbound_covering_size(t, k)
                .expect("k in range")
                .is_some()
        })
        .map_or(t.n, |size| size - 1)
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Result of a successful [`find_orientation`] search.
#[derive(Debug, Clone)]
pub struct FoundOrientation {
    pub tournament: Tournament,
    pub k: usize,
    /// Seed that produced the tournament via [`random_orientation`].
    pub seed: u64,
    pub tries: u64,
}

/// Draws random orientations until one has no inbound-covering set of size
/// `<= k`. Attempt `a` uses seed `seed + a` (wrapping). `n` defaults to
/// [`lemma6_bound`].
pub fn find_orientation(
    k: usize,
    n: Option<usize>,
    max_tries: u64,
    seed: u64,
) -> Result<FoundOrientation, TournamentError> {
    let n = match n {
        Some(n) => n,
        None => {
            let bound = lemma6_bound(k as u64);
            bound
                .to_usize()
                .ok_or(TournamentError::BoundTooLarge(bound))?
        }
    };
    if n == 0 {
        return Err(TournamentError::InvalidSize);
    }
    if k == 0 || k > n {
        return Err(TournamentError::InvalidLimit { k, n });
    }
    let mut best = (seed, 0usize);
    for attempt in 0..max_tries {
        let s = seed.wrapping_add(attempt);
        let t = random_orientation(n, s)?;
        match smallest_inbound_covering_size(&t, k)? {
            None => {
                return Ok(FoundOrientation {
                    tournament: t,
                    k,
                    seed: s,
                    tries: attempt + 1,
                })
            }
            Some(size) if size > best.1 => best = (s, size),
            Some(_) => {}
        }
    }
    Err(TournamentError::NotFound {
        k,
        n,
        tries: max_tries,
        best_seed: best.0,
        best_cover: best.1,
    })
}

/// `3 k^2 2^k`, a vertex count at which random orientations work.
pub fn lemma6_bound(k: u64) -> BigUint {
    (BigUint::from(3u32) * BigUint::from(k) * BigUint::from(k)) << k as usize
}

/// Natural log of the union bound `n^k exp(-(n-k)/2^k)` on the probability
/// that a uniformly random orientation has an inbound-covering set of size
/// at most `k`. Negative values mean a good orientation exists.
pub fn union_bound_log_probability(n: &BigUint, k: u64) -> Result<f64, TournamentError> {
    if k == 0 || *n <= BigUint::from(k) {
        return Err(TournamentError::InvalidLimit {
            k: k as usize,
            n: n.to_usize().unwrap_or(usize::MAX),
        });
    }
    let spare = n - BigUint::from(k);
    // (n - k) / 2^k evaluated through logs so astronomically large n stays finite.
    let decay = (ln_biguint(&spare) - k as f64 * std::f64::consts::LN_2).exp();
    Ok(-decay + k as f64 * ln_biguint(n))
}

#[derive(Serialize, Deserialize)]
struct TournamentWire {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Tournament {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TournamentWire {
            n: self.n,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Tournament {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = TournamentWire::deserialize(deserializer)?;
        let edges: Vec<(usize, usize)> = wire.edges.iter().map(|e| (e[0], e[1])).collect();
        Tournament::from_edges(wire.n, &edges).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_covers(t: &Tournament, set: &[usize]) -> bool {
        (1..=t.n())
            .filter(|v| !set.contains(v))
            .all(|v| set.iter().any(|&s| t.points_to(v, s)))
    }

    #[test]
    fn single_vertex_has_no_edges() {
        let t = random_orientation(1, 99).unwrap();
        assert!(t.edges().is_empty());
    }

    #[test]
    fn zero_vertices_rejected() {
        assert_eq!(random_orientation(0, 1), Err(TournamentError::InvalidSize));
    }

    #[test]
    fn same_seed_same_tournament() {
        assert_eq!(
            random_orientation(3, 17).unwrap(),
            random_orientation(3, 17).unwrap()
        );
        assert_eq!(
            random_orientation(40, 5).unwrap(),
            random_orientation(40, 5).unwrap()
        );
    }

    #[test]
    fn exactly_two_of_eight_triangles_are_cyclic() {
        let cyclic = Tournament::all_orientations(3)
            .filter(Tournament::is_cyclic_triangle)
            .count();
        assert_eq!(cyclic, 2);
    }

    #[test]
    fn seed_sweep_hits_cyclic_triangle() {
        assert!((0..64).any(|s| random_orientation(3, s).unwrap().is_cyclic_triangle()));
    }

    #[test]
    fn covering_examples_on_triangle() {
        let t = Tournament::cyclic_triangle();
        assert!(is_inbound_covering(&t, &[1, 2, 3]).unwrap());
        assert!(!is_inbound_covering(&t, &[2]).unwrap());
        assert!(is_inbound_covering(&t, &[1, 2]).unwrap());
        assert_eq!(
            is_inbound_covering(&t, &[4]),
            Err(TournamentError::VertexOutOfRange { vertex: 4, n: 3 })
        );
    }

    #[test]
    fn smallest_covering_examples() {
        let cyc = Tournament::cyclic_triangle();
        assert_eq!(smallest_inbound_covering_size(&cyc, 1).unwrap(), None);
        assert_eq!(smallest_inbound_covering_size(&cyc, 2).unwrap(), Some(2));
        let tr = Tournament::transitive(3).unwrap();
        assert_eq!(smallest_inbound_covering(&tr, 1).unwrap(), Some(vec![3]));
        assert!(smallest_inbound_covering_size(&cyc, 4).is_err());
        assert!(smallest_inbound_covering_size(&cyc, 0).is_err());
    }

    #[test]
    fn certified_threshold_of_small_tournaments() {
        assert_eq!(certified_threshold(&Tournament::cyclic_triangle()), 1);
        assert_eq!(certified_threshold(&Tournament::transitive(5).unwrap()), 0);
    }

    #[test]
    fn k1_n3_finds_cyclic_triangle() {
        let found = find_orientation(1, Some(3), 1000, 0).unwrap();
        assert!(found.tournament.is_cyclic_triangle());
        assert_eq!(random_orientation(3, found.seed).unwrap(), found.tournament);
    }

    #[test]
    fn k2_n3_fails_for_every_orientation() {
        assert!(Tournament::all_orientations(3)
            .all(|t| smallest_inbound_covering_size(&t, 2).unwrap().is_some()));
        assert!(matches!(
            find_orientation(2, Some(3), 200, 0),
            Err(TournamentError::NotFound { best_cover: 2, .. })
        ));
    }

    #[test]
    fn lemma6_bound_values() {
        assert_eq!(lemma6_bound(1), BigUint::from(6u32));
        assert_eq!(lemma6_bound(8), BigUint::from(49152u32));
        let big = lemma6_bound(512);
        assert_eq!(
            big,
            (BigUint::from(3u32) * BigUint::from(512u32 * 512)) << 512usize
        );
    }

    #[test]
    fn union_bound_values() {
        let v = union_bound_log_probability(&BigUint::from(6u32), 1).unwrap();
        assert!((v - (-2.5 + 6f64.ln())).abs() < 1e-12);
        assert!((v + 0.708).abs() < 1e-3);
        let w = union_bound_log_probability(&BigUint::from(49152u32), 8).unwrap();
        assert!((w - (-49144.0 / 256.0 + 8.0 * 49152f64.ln())).abs() < 1e-9);
        assert!((w + 105.6).abs() < 0.1);
        for k in 1..20u64 {
            assert!(union_bound_log_probability(&BigUint::from(k + 1), k).unwrap() > 0.0);
        }
        assert!(union_bound_log_probability(&BigUint::from(3u32), 3).is_err());
    }

    #[test]
    fn union_bound_at_full_scale_is_negative() {
        let n = lemma6_bound(512);
        assert!(union_bound_log_probability(&n, 512).unwrap() < 0.0);
    }

    #[test]
    fn json_lists_sorted_edges() {
        let t = Tournament::cyclic_triangle();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"n":3,"edges":[[1,2],[2,3],[3,1]]}"#);
        let back: Tournament = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn json_rejects_double_orientation() {
        let bad = r#"{"n":3,"edges":[[1,2],[2,1],[2,3],[3,1]]}"#;
        assert!(serde_json::from_str::<Tournament>(bad).is_err());
        let missing = r#"{"n":3,"edges":[[1,2],[2,3]]}"#;
        assert!(serde_json::from_str::<Tournament>(missing).is_err());
    }

    #[test]
    fn dot_lists_all_nodes_and_edges() {
        let dot = Tournament::cyclic_triangle().to_dot();
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("->").count(), 3);
        assert!(dot.contains("3 -> 1;"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn full_set_covers_and_empty_does_not(n in 1usize..12, seed: u64) {
                let t = random_orientation(n, seed).unwrap();
                let all: Vec<usize> = (1..=n).collect();
                prop_assert!(is_inbound_covering(&t, &all).unwrap());
                prop_assert!(!is_inbound_covering(&t, &[]).unwrap());
            }

            #[test]
            fn covering_is_monotone(n in 2usize..10, seed: u64, a in 0u32..1024, b in 0u32..1024) {
                let t = random_orientation(n, seed).unwrap();
                let small: Vec<usize> = (1..=n).filter(|v| a >> (v - 1) & 1 == 1).collect();
                let large: Vec<usize> = (1..=n).filter(|v| (a | b) >> (v - 1) & 1 == 1).collect();
                let small_covers = is_inbound_covering(&t, &small).unwrap();
                prop_assert_eq!(small_covers, brute_force_covers(&t, &small));
                if small_covers {
                    prop_assert!(is_inbound_covering(&t, &large).unwrap());
                }
            }

            #[test]
            fn union_bound_negative_beyond_lemma6(k in 8u64..40, extra in 0u64..1_000_000) {
                let n = lemma6_bound(k) + BigUint::from(extra);
                prop_assert!(union_bound_log_probability(&n, k).unwrap() < 0.0);
            }
        }
    }
}
