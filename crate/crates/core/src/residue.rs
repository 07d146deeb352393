//! Moduli built from a tournament and a prime set, and the acceptability
//! predicate on residue vectors.
//!
//! With `N = b^n` primes, vertex `i` owns the primes `P_j` whose base-`b`
//! digit at position `i - 1` is zero; their product is the cycle length
//! `m_i`. A residue vector (the remainders of a length modulo every prime)
//! is acceptable for `i` when
//!
//! 1. every owned prime sees residue `0` or `i`,
//! 2. some owned prime sees a nonzero residue, and
//! 3. every outgoing edge `i -> v` has a prime shared by `m_i` and `m_v`
//!    with residue `i`.
//!
//! Acceptable classes are never materialized as sets; the predicate is
//! linear in `N`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::primes::{PrimeError, PrimeMode, PrimeSet};
use crate::tournament::{Tournament, TournamentError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SystemError {
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(u32),
    #[error("b^n = {base}^{n} overflows the prime index range")]
    TooManyPrimes { base: u32, n: usize },
    #[error("expected {expected} primes (b^n), got {got}")]
    PrimeCount { expected: usize, got: usize },
    #[error("prime {prime} does not exceed the vertex count {n}")]
    PrimeTooSmall { prime: u64, n: usize },
    #[error("modulus of vertex {vertex} has {got} primes, expected {expected}")]
    ModulusCardinality {
        vertex: usize,
        got: usize,
        expected: usize,
    },
    #[error("vertices {i} and {v} share {got} primes, expected {expected}")]
    SharedCardinality {
        i: usize,
        v: usize,
        got: usize,
        expected: usize,
    },
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("residue vector has {got} entries, expected {expected}")]
    VectorLength { got: usize, expected: usize },
    #[error("residue {residue} at index {index} is not below prime {prime}")]
    ResidueRange {
        index: usize,
        residue: u64,
        prime: u64,
    },
    #[error("construction integrity failure: residue vector accepted by vertices {0} and {1}")]
    Ambiguous(usize, usize),
    #[error("{0} is divisible by the square of a prime in P")]
    NotSquarefree(BigUint),
    #[error("{0} has a prime factor outside P")]
    OutsidePrimeSet(BigUint),
    #[error("prime index {index} is outside 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Primes(#[from] PrimeError),
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

/// Remainders `r_j = t mod P_j` of one integer `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResidueVector(pub Vec<u64>);

impl ResidueVector {
    pub fn constant(len: usize, value: u64) -> Self {
        ResidueVector(vec![value; len])
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A squarefree product of primes from P, stored as membership flags over
/// prime indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeSubset {
    members: Vec<bool>,
}

impl PrimeSubset {
    pub fn empty(len: usize) -> Self {
        PrimeSubset {
            members: vec![false; len],
        }
    }

    pub fn full(len: usize) -> Self {
        PrimeSubset {
            members: vec![true; len],
        }
    }

    /// Subset whose bit `j` of `mask` selects prime index `j`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        PrimeSubset {
            members: (0..len).map(|j| mask >> j & 1 == 1).collect(),
        }
    }

    pub fn from_indices(
        len: usize,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self, SystemError> {
        let mut s = PrimeSubset::empty(len);
        for index in indices {
            if index >= len {
                return Err(SystemError::IndexOutOfRange { index, len });
            }
            s.members[index] = true;
        }
        Ok(s)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members[index]
    }

    pub fn insert(&mut self, index: usize) {
        self.members[index] = true;
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&j| self.members[j])
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The full construction: base, tournament, primes, and derived moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliSystem {
    base: u32,
    primes: PrimeSet,
    tournament: Tournament,
    // owned[i - 1]: prime indices of m_i, ascending
    owned: Vec<Vec<usize>>,
    // shared[(i - 1) * n + (v - 1)]: prime indices of gcd(m_i, m_v)
    shared: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    product: BigUint,
}

impl ModuliSystem {
    /// Assembles and validates the system; every cardinality invariant is
    /// re-checked here.
    pub fn new(base: u32, primes: PrimeSet, tournament: Tournament) -> Result<Self, SystemError> {
        if base < 2 {
            return Err(SystemError::BaseTooSmall(base));
        }
        let n = tournament.n();
        let count = u32::try_from(n)
            .ok()
            .and_then(|e| (base as usize).checked_pow(e))
            .filter(|&c| c <= 1 << 24)
            .ok_or(SystemError::TooManyPrimes { base, n })?;
        if primes.len() != count {
            return Err(SystemError::PrimeCount {
                expected: count,
                got: primes.len(),
            });
        }
        if let Some(&p) = primes.primes().iter().find(|&&p| p <= n as u64) {
            return Err(SystemError::PrimeTooSmall { prime: p, n });
        }
        let b = base as usize;
        let digit_zero = |j: usize, vertex: usize| (j / b.pow(vertex as u32 - 1)).is_multiple_of(b);
        let owned: Vec<Vec<usize>> = (1..=n)
            .map(|i| (0..count).filter(|&j| digit_zero(j, i)).collect())
            .collect();
        let mut shared = Vec::with_capacity(n * n);
        for i in 1..=n {
            for v in 1..=n {
                shared.push(
                    owned[i - 1]
                        .iter()
                        .copied()
                        .filter(|&j| digit_zero(j, v))
                        .collect(),
                );
            }
        }
        let out_edges = (1..=n).map(|i| tournament.out_neighbors(i)).collect();
        let product = primes.primes().iter().map(|&p| BigUint::from(p)).product();
        let ms = ModuliSystem {
            base,
            primes,
            tournament,
            owned,
            shared,
            out_edges,
            product,
        };
        ms.check_cardinalities()?;
        Ok(ms)
    }

    fn check_cardinalities(&self) -> Result<(), SystemError> {
        let count = self.prime_count();
        let b = self.base as usize;
        for i in 1..=self.n() {
            let got = self.owned[i - 1].len();
            if got != count / b {
                return Err(SystemError::ModulusCardinality {
                    vertex: i,
                    got,
                    expected: count / b,
                });
            }
            for v in i + 1..=self.n() {
                let got = self.shared_indices(i, v).len();
                if got != count / (b * b) {
                    return Err(SystemError::SharedCardinality {
                        i,
                        v,
                        got,
                        expected: count / (b * b),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Vertex count of the tournament.
    pub fn n(&self) -> usize {
        self.tournament.n()
    }

    /// `N = b^n`.
    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.primes
    }

    pub fn prime(&self, index: usize) -> u64 {
        self.primes.get(index)
    }

    pub fn tournament(&self) -> &Tournament {
        &self.tournament
    }

    /// Product of every prime in P.
    pub fn primes_product(&self) -> &BigUint {
        &self.product
    }

    /// Same system with the prime set re-validated under `mode`.
    pub fn with_prime_mode(self, mode: PrimeMode) -> Result<Self, SystemError> {
        if self.primes.mode() == mode {
            return Ok(self);
        }
        let primes = PrimeSet::new(mode, self.primes.primes().to_vec())?;
        ModuliSystem::new(self.base, primes, self.tournament)
    }

    fn check_vertex(&self, vertex: usize) -> Result<(), SystemError> {
        if vertex == 0 || vertex > self.n() {
            return Err(SystemError::VertexOutOfRange {
                vertex,
                n: self.n(),
            });
        }
        Ok(())
    }

    /// Prime indices whose digit at position `vertex - 1` is zero.
    pub fn modulus_primes(&self, vertex: usize) -> Result<&[usize], SystemError> {
        self.check_vertex(vertex)?;
        Ok(&self.owned[vertex - 1])
    }

    pub(crate) fn owned(&self, vertex: usize) -> &[usize] {
        &self.owned[vertex - 1]
    }

    pub(crate) fn shared_indices(&self, i: usize, v: usize) -> &[usize] {
        &self.shared[(i - 1) * self.n() + (v - 1)]
    }

    /// Prime indices of `gcd(m_i, m_v)`.
    pub fn shared_primes(&self, i: usize, v: usize) -> Result<&[usize], SystemError> {
        self.check_vertex(i)?;
        self.check_vertex(v)?;
        Ok(self.shared_indices(i, v))
    }

    /// `m_i` exactly.
    pub fn modulus_value(&self, vertex: usize) -> Result<BigUint, SystemError> {
        Ok(self
            .modulus_primes(vertex)?
            .iter()
            .map(|&j| BigUint::from(self.prime(j)))
            .product())
    }

    /// `m_i` as a machine integer, when it fits.
    pub fn modulus_small(&self, vertex: usize) -> Option<u64> {
        self.owned[vertex - 1]
            .iter()
            .try_fold(1u64, |acc, &j| acc.checked_mul(self.prime(j)))
    }

    /// Prime indices with no zero digit: they divide no modulus.
    pub fn unused_primes(&self) -> Vec<usize> {
        (0..self.prime_count())
            .filter(|&j| self.owned.iter().all(|o| o.binary_search(&j).is_err()))
            .collect()
    }

    pub fn validate(&self, rv: &ResidueVector) -> Result<(), SystemError> {
        if rv.len() != self.prime_count() {
            return Err(SystemError::VectorLength {
                got: rv.len(),
                expected: self.prime_count(),
            });
        }
        for (index, (&residue, &prime)) in rv.0.iter().zip(self.primes.primes()).enumerate() {
            if residue >= prime {
                return Err(SystemError::ResidueRange {
                    index,
                    residue,
                    prime,
                });
            }
        }
        Ok(())
    }

    pub fn residues_of(&self, t: &BigUint) -> ResidueVector {
        ResidueVector(
            self.primes
                .primes()
                .iter()
                .map(|&p| (t % p).to_u64().expect("remainder below a u64 prime"))
                .collect(),
        )
    }

    pub fn residues_of_u64(&self, t: u64) -> ResidueVector {
        ResidueVector(self.primes.primes().iter().map(|&p| t % p).collect())
    }

    /// The unique `t` in `[0, prod P)` with the given residues (Garner's
    /// mixed-radix form).
    pub fn crt_reconstruct(&self, rv: &ResidueVector) -> Result<BigUint, SystemError> {
        self.validate(rv)?;
        let mut value = BigUint::zero();
        let mut radix = BigUint::one();
        for (&r, &p) in rv.0.iter().zip(self.primes.primes()) {
            let current = (&value % p).to_u64().expect("below p");
            let radix_mod = (&radix % p).to_u64().expect("below p");
            let delta = (r + p - current) % p;
            let step = mul_mod(delta, inverse_mod(radix_mod, p), p);
            value += &radix * step;
            radix *= p;
        }
        Ok(value)
    }

    /// The three acceptance conditions for `vertex`, reading residues only at primes
    /// owned by `m_vertex`.
    pub(crate) fn acceptable_raw(&self, residues: &[u64], vertex: usize) -> bool {
        let owned = self.owned(vertex);
        let label = vertex as u64;
        let mut any_nonzero = false;
        for &j in owned {
            match residues[j] {
                0 => {}
                r if r == label => any_nonzero = true,
                _ => return false,
            }
        }
        any_nonzero
            && self.out_edges[vertex - 1].iter().all(|&v| {
                self.shared_indices(vertex, v)
                    .iter()
                    .any(|&j| residues[j] == label)
            })
    }

    pub fn acceptable(&self, rv: &ResidueVector, vertex: usize) -> Result<bool, SystemError> {
        self.check_vertex(vertex)?;
        self.validate(rv)?;
        Ok(self.acceptable_raw(&rv.0, vertex))
    }

    /// The unique accepting vertex, if any. Two accepting vertices mean the
    /// system is broken and surface as [`SystemError::Ambiguous`].
    pub fn accepted_by(&self, rv: &ResidueVector) -> Result<Option<usize>, SystemError> {
        self.validate(rv)?;
        let mut found = None;
        for vertex in 1..=self.n() {
            if self.acceptable_raw(&rv.0, vertex) {
                if let Some(first) = found {
                    return Err(SystemError::Ambiguous(first, vertex));
                }
                found = Some(vertex);
            }
        }
        Ok(found)
    }

    /// Membership of a length in the language: length 0 is the initial
    /// state, which never accepts.
    pub fn contains_length(&self, length: &BigUint) -> Result<bool, SystemError> {
        if length.is_zero() {
            return Ok(false);
        }
        Ok(self.accepted_by(&self.residues_of(length))?.is_some())
    }

    /// Factors a squarefree integer over P.
    pub fn subset_of(&self, m: &BigUint) -> Result<PrimeSubset, SystemError> {
        if m.is_zero() {
            return Err(SystemError::OutsidePrimeSet(m.clone()));
        }
        let mut rest = m.clone();
        let mut subset = PrimeSubset::empty(self.prime_count());
        for (j, &p) in self.primes.primes().iter().enumerate() {
            if (&rest % p).is_zero() {
                rest /= p;
                if (&rest % p).is_zero() {
                    return Err(SystemError::NotSquarefree(m.clone()));
                }
                subset.insert(j);
            }
        }
        if !rest.is_one() {
            return Err(SystemError::OutsidePrimeSet(m.clone()));
        }
        Ok(subset)
    }

    pub fn subset_value(&self, subset: &PrimeSubset) -> BigUint {
        subset
            .indices()
            .iter()
            .map(|&j| BigUint::from(self.prime(j)))
            .product()
    }

    /// Residues of `m * L(m, i)`: zero on primes dividing `m`, `i` elsewhere.
    pub fn witness_residues(&self, m: &PrimeSubset, vertex: usize) -> ResidueVector {
        ResidueVector(
            (0..self.prime_count())
                .map(|j| if m.contains(j) { 0 } else { vertex as u64 })
                .collect(),
        )
    }

    /// Oriented edges `(i, j)` whose shared primes all divide `m`.
    pub fn controlled_edges(&self, m: &PrimeSubset) -> Vec<(usize, usize)> {
        self.tournament
            .edges()
            .into_iter()
            .filter(|&(i, v)| self.shared_indices(i, v).iter().all(|&j| m.contains(j)))
            .collect()
    }

    /// `true` iff no multiple of `m` is acceptable for any vertex. Setting
    /// every free residue to `i` is optimal for the acceptance conditions, so one
    /// witness per vertex decides it.
    pub fn is_blocking(&self, m: &PrimeSubset) -> bool {
        (1..=self.n()).all(|i| !self.acceptable_raw(&self.witness_residues(m, i).0, i))
    }

    /// `floor(N (1 - (1 - 1/b^2)^ceil(k/2)))`, computed exactly.
    pub fn lemma9_bound(&self, k: usize) -> usize {
        let edges = k.div_ceil(2) as u32;
        let b2 = BigUint::from(self.base) * self.base;
        let whole = b2.pow(edges);
        let missed = (&b2 - 1u32).pow(edges);
        let bound = BigUint::from(self.prime_count()) * (&whole - missed) / whole;
        bound.to_usize().expect("at most N")
    }

    /// The bound as printed in the lemma statement, `N (1 - (1 - 1/b)^(k/2))`.
    /// Kept for comparison only.
    pub fn lemma9_bound_as_printed(&self, k: usize) -> f64 {
        let b = self.base as f64;
        self.prime_count() as f64 * (1.0 - (1.0 - 1.0 / b).powf(k as f64 / 2.0))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    // extended Euclid over i128
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "{a} not invertible mod {m}");
    old_s.rem_euclid(m as i128) as u64
}

#[derive(Serialize, Deserialize)]
struct SystemWire {
    b: u32,
    n: usize,
    primes: Vec<u64>,
    tournament: Tournament,
}

impl Serialize for ModuliSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SystemWire {
            b: self.base,
            n: self.n(),
            primes: self.primes.primes().to_vec(),
            tournament: self.tournament.clone(),
        }
        .serialize(serializer)
    }
}

/// Deserialized systems carry desk-mode primes; bundles restore the mode.
impl<'de> Deserialize<'de> for ModuliSystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let wire = SystemWire::deserialize(deserializer)?;
        if wire.n != wire.tournament.n() {
            return Err(D::Error::custom(format!(
                "n = {} but the tournament has {} vertices",
                wire.n,
                wire.tournament.n()
            )));
        }
        let primes = PrimeSet::new(PrimeMode::Desk, wire.primes).map_err(D::Error::custom)?;
        ModuliSystem::new(wire.b, primes, wire.tournament).map_err(D::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::primes::select_desk;

    /// b = 2, n = 3, tournament 1 -> 2 -> 3 -> 1, primes 5..29.
    pub(crate) fn triangle_system() -> ModuliSystem {
        ModuliSystem::new(2, select_desk(8, 3), Tournament::cyclic_triangle()).unwrap()
    }

    fn vector(ms: &ModuliSystem, pairs: &[(u64, u64)]) -> ResidueVector {
        let mut rv = ResidueVector::constant(ms.prime_count(), 0);
        for &(p, r) in pairs {
            let j = ms.primes().primes().iter().position(|&q| q == p).unwrap();
            rv.0[j] = r;
        }
        rv
    }

    fn subset(ms: &ModuliSystem, primes: &[u64]) -> PrimeSubset {
        ms.subset_of(&primes.iter().map(|&p| BigUint::from(p)).product())
            .unwrap()
    }

    #[test]
    fn modulus_primes_read_binary_digits() {
        let ms = triangle_system();
        assert_eq!(ms.modulus_primes(1).unwrap(), &[0, 2, 4, 6]);
        assert_eq!(ms.modulus_primes(2).unwrap(), &[0, 1, 4, 5]);
        assert_eq!(ms.modulus_primes(3).unwrap(), &[0, 1, 2, 3]);
        assert!(ms.modulus_primes(4).is_err());
        assert_eq!(ms.unused_primes(), vec![7]);
    }

    #[test]
    fn modulus_values() {
        let ms = triangle_system();
        assert_eq!(ms.modulus_value(1).unwrap(), BigUint::from(21505u32));
        assert_eq!(ms.modulus_value(2).unwrap(), BigUint::from(11305u32));
        assert_eq!(ms.modulus_value(3).unwrap(), BigUint::from(5005u32));
        let single = ModuliSystem::new(
            2,
            PrimeSet::new(PrimeMode::Desk, vec![2, 3]).unwrap(),
            Tournament::from_edges(1, &[]).unwrap(),
        )
        .unwrap();
        assert_eq!(single.modulus_value(1).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn construction_errors() {
        let t = Tournament::cyclic_triangle();
        assert_eq!(
            ModuliSystem::new(1, select_desk(1, 3), t.clone()).unwrap_err(),
            SystemError::BaseTooSmall(1)
        );
        assert!(matches!(
            ModuliSystem::new(2, select_desk(7, 3), t.clone()),
            Err(SystemError::PrimeCount {
                expected: 8,
                got: 7
            })
        ));
        assert!(matches!(
            ModuliSystem::new(2, select_desk(8, 1), t),
            Err(SystemError::PrimeTooSmall { prime: 2, n: 3 })
        ));
    }

    #[test]
    fn residue_examples() {
        let ms = triangle_system();
        assert_eq!(
            ms.residues_of(&BigUint::zero()),
            ResidueVector::constant(8, 0)
        );
        assert_eq!(
            ms.residues_of(&BigUint::one()),
            ResidueVector::constant(8, 1)
        );
        assert_eq!(
            ms.primes_product(),
            &BigUint::from(5u64 * 7 * 11 * 13 * 17 * 19 * 23 * 29)
        );
        assert_eq!(
            ms.residues_of(ms.primes_product()),
            ResidueVector::constant(8, 0)
        );
    }

    #[test]
    fn crt_examples() {
        let ms = triangle_system();
        assert_eq!(
            ms.crt_reconstruct(&ResidueVector::constant(8, 0)).unwrap(),
            BigUint::zero()
        );
        assert_eq!(
            ms.crt_reconstruct(&ResidueVector::constant(8, 1)).unwrap(),
            BigUint::one()
        );
        assert!(ms.crt_reconstruct(&ResidueVector::constant(8, 5)).is_err());
    }

    #[test]
    fn acceptable_examples() {
        let ms = triangle_system();
        let ones = ResidueVector::constant(8, 1);
        assert!(ms.acceptable(&ones, 1).unwrap());
        for i in 1..=3 {
            assert!(!ms.acceptable(&ResidueVector::constant(8, 0), i).unwrap());
        }
        let bad = vector(&ms, &[(5, 1), (17, 2)]);
        assert!(!ms.acceptable(&bad, 1).unwrap());
    }

    #[test]
    fn accepted_by_examples() {
        let ms = triangle_system();
        assert_eq!(
            ms.accepted_by(&ResidueVector::constant(8, 1)).unwrap(),
            Some(1)
        );
        assert_eq!(
            ms.accepted_by(&ResidueVector::constant(8, 0)).unwrap(),
            None
        );
        assert_eq!(ms.accepted_by(&ms.residues_of_u64(2)).unwrap(), Some(2));
        assert_eq!(ms.accepted_by(&ms.residues_of_u64(4)).unwrap(), None);
    }

    #[test]
    fn witness_examples() {
        let ms = triangle_system();
        assert_eq!(
            ms.witness_residues(&PrimeSubset::empty(8), 2),
            ResidueVector::constant(8, 2)
        );
        assert_eq!(
            ms.witness_residues(&PrimeSubset::full(8), 3),
            ResidueVector::constant(8, 0)
        );
        let w = ms.witness_residues(&subset(&ms, &[5, 17]), 2);
        assert_eq!(w.0, vec![0, 2, 2, 2, 0, 2, 2, 2]);
    }

    #[test]
    fn controlled_edge_examples() {
        let ms = triangle_system();
        assert_eq!(ms.shared_primes(1, 2).unwrap(), &[0, 4]);
        assert!(ms
            .controlled_edges(&subset(&ms, &[5, 17]))
            .contains(&(1, 2)));
        assert!(ms.controlled_edges(&PrimeSubset::empty(8)).is_empty());
        assert_eq!(ms.controlled_edges(&PrimeSubset::full(8)).len(), 3);
    }

    #[test]
    fn blocking_examples() {
        let ms = triangle_system();
        assert!(!ms.is_blocking(&PrimeSubset::empty(8)));
        let m = subset(&ms, &[5, 17]);
        assert!(!ms.is_blocking(&m));
        assert!(ms.acceptable(&ms.witness_residues(&m, 2), 2).unwrap());
        assert!(ms.is_blocking(&subset(&ms, &[5, 7, 11, 17])));
        assert!(ms.is_blocking(&PrimeSubset::full(8)));
    }

    #[test]
    fn subset_factoring_rejects_bad_inputs() {
        let ms = triangle_system();
        assert!(matches!(
            ms.subset_of(&BigUint::from(25u32)),
            Err(SystemError::NotSquarefree(_))
        ));
        assert!(matches!(
            ms.subset_of(&BigUint::from(31u32)),
            Err(SystemError::OutsidePrimeSet(_))
        ));
        assert_eq!(
            ms.subset_of(&BigUint::one()).unwrap(),
            PrimeSubset::empty(8)
        );
    }

    #[test]
    fn lemma9_bound_examples() {
        let ms = triangle_system();
        assert_eq!(ms.lemma9_bound(1), 2);
        assert_eq!(ms.lemma9_bound(2), 2);
        let t4 = Tournament::transitive(4).unwrap();
        let ms4 = ModuliSystem::new(2, select_desk(16, 4), t4).unwrap();
        assert_eq!(ms4.lemma9_bound(4), 7);
        assert!((ms.lemma9_bound_as_printed(2) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let ms = triangle_system();
        let json = serde_json::to_string(&ms).unwrap();
        assert!(json.starts_with(r#"{"b":2,"n":3,"primes":[5,7,11,13,17,19,23,29],"tournament":"#));
        let back: ModuliSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn crt_round_trip(t in any::<u128>()) {
                let ms = triangle_system();
                let t = BigUint::from(t);
                let back = ms.crt_reconstruct(&ms.residues_of(&t)).unwrap();
                prop_assert_eq!(back, &t % ms.primes_product());
            }

            #[test]
            fn at_most_one_vertex_accepts(values in proptest::collection::vec(0u64..5, 8)) {
                let ms = triangle_system();
                let rv = ResidueVector(values);
                prop_assert!(ms.accepted_by(&rv).is_ok());
            }
        }
    }
}
