//! Transition matrices over small semirings, and power ladders
//! `M, M^2, M^4, ...` for evaluating `e_init * M^L` at big `L`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub trait Semiring: Clone + PartialEq + std::fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Semiring for bool {
    fn nil() -> Self {
        false
    }
    fn unit() -> Self {
        true
    }
    fn add(&self, other: &Self) -> Self {
        *self || *other
    }
    fn mul(&self, other: &Self) -> Self {
        *self && *other
    }
    fn is_zero(&self) -> bool {
        !*self
    }
}

/// Run counts saturated at two: enough to tell "no run", "exactly one run"
/// and "ambiguous" apart without overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RunCount {
    Zero,
    One,
    Many,
}

impl RunCount {
    fn from_u8(v: u8) -> Self {
        match v {
            0 => RunCount::Zero,
            1 => RunCount::One,
            _ => RunCount::Many,
        }
    }

    fn as_u8(self) -> u8 {
        self as u8
    }
}

impl std::fmt::Display for RunCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RunCount::Zero => "0",
            RunCount::One => "1",
            RunCount::Many => ">=2",
        })
    }
}

impl Semiring for RunCount {
    fn nil() -> Self {
        RunCount::Zero
    }
    fn unit() -> Self {
        RunCount::One
    }
    fn add(&self, other: &Self) -> Self {
        RunCount::from_u8(self.as_u8() + other.as_u8())
    }
    fn mul(&self, other: &Self) -> Self {
        RunCount::from_u8(self.as_u8() * other.as_u8())
    }
    fn is_zero(&self) -> bool {
        *self == RunCount::Zero
    }
}

impl Semiring for BigUint {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

pub type SparseVector<S> = Vec<(usize, S)>;

/// Row-major sparse matrix; each row is sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<S> {
    rows: Vec<SparseVector<S>>,
}

/// Accumulates `sum_k a_k * row_k` without allocating a dense row per product.
struct Accumulator<S> {
    values: Vec<S>,
    touched: Vec<usize>,
}

impl<S: Semiring> Accumulator<S> {
    fn new(dim: usize) -> Self {
        Accumulator {
            values: vec![S::nil(); dim],
            touched: Vec::new(),
        }
    }

    fn add_scaled(&mut self, scale: &S, row: &SparseVector<S>) {
        for (col, v) in row {
            let term = scale.mul(v);
            if term.is_zero() {
                continue;
            }
            if self.values[*col].is_zero() {
                self.touched.push(*col);
            }
            self.values[*col] = self.values[*col].add(&term);
        }
    }

    fn drain(&mut self) -> SparseVector<S> {
        self.touched.sort_unstable();
        let out = self
            .touched
            .iter()
            .map(|&c| (c, std::mem::replace(&mut self.values[c], S::nil())))
            .collect();
        self.touched.clear();
        out
    }
}

impl<S: Semiring> SparseMatrix<S> {
    pub fn from_successors(successors: &[Vec<usize>]) -> Self {
        SparseMatrix {
            rows: successors
                .iter()
                .map(|row| row.iter().map(|&c| (c, S::unit())).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn mul(&self, other: &SparseMatrix<S>) -> SparseMatrix<S> {
        let mut acc = Accumulator::new(other.dim());
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for (k, a) in row {
                    acc.add_scaled(a, &other.rows[*k]);
                }
                acc.drain()
            })
            .collect();
        SparseMatrix { rows }
    }

    /// `v * self`. Costs `O(nnz log nnz)` in the touched entries, not the
    /// dimension, so single-state vectors stay cheap on large matrices.
    pub fn apply(&self, v: &SparseVector<S>) -> SparseVector<S> {
        let mut terms: Vec<(usize, S)> = v
            .iter()
            .flat_map(|(k, a)| self.rows[*k].iter().map(move |(c, x)| (*c, a.mul(x))))
            .filter(|(_, t)| !t.is_zero())
            .collect();
        terms.sort_by_key(|(c, _)| *c);
        let mut out: SparseVector<S> = Vec::with_capacity(terms.len());
        for (c, t) in terms {
            match out.last_mut() {
                Some((last, acc)) if *last == c => *acc = acc.add(&t),
                _ => out.push((c, t)),
            }
        }
        out
    }
}

/// Square boolean matrix with bitset rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    dim: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn from_successors(successors: &[Vec<usize>]) -> Self {
        let dim = successors.len();
        let words = dim.div_ceil(64).max(1);
        let mut bits = vec![0u64; dim * words];
        for (r, row) in successors.iter().enumerate() {
            for &c in row {
                bits[r * words + c / 64] |= 1 << (c % 64);
            }
        }
        BitMatrix { dim, words, bits }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        let mut bits = vec![0u64; self.dim * self.words];
        for r in 0..self.dim {
            let target = r * self.words;
            for k in 0..self.dim {
                if self.row(r)[k / 64] >> (k % 64) & 1 == 1 {
                    for (w, &x) in other.row(k).iter().enumerate() {
                        bits[target + w] |= x;
                    }
                }
            }
        }
        BitMatrix {
            dim: self.dim,
            words: self.words,
            bits,
        }
    }

    /// `v * self` for a bitset vector `v`.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.words];
        for k in 0..self.dim {
            if v[k / 64] >> (k % 64) & 1 == 1 {
                for (o, &x) in out.iter_mut().zip(self.row(k)) {
                    *o |= x;
                }
            }
        }
        out
    }
}

/// Cached powers `M^(2^i)` of a sparse transition matrix.
#[derive(Debug, Clone)]
pub struct PowerLadder<S> {
    powers: Vec<SparseMatrix<S>>,
}

impl<S: Semiring> PowerLadder<S> {
    pub fn new(base: SparseMatrix<S>) -> Self {
        PowerLadder { powers: vec![base] }
    }

    fn ensure(&mut self, levels: usize) {
        while self.powers.len() < levels {
            let last = self.powers.last().expect("nonempty ladder");
            let next = last.mul(last);
            self.powers.push(next);
        }
    }

    /// `start * M^length`, multiplying by one cached square per set bit.
    pub fn apply_power(&mut self, start: SparseVector<S>, length: &BigUint) -> SparseVector<S> {
        let bits = length.bits() as usize;
        self.ensure(bits);
        let mut v = start;
        for i in 0..bits {
            if length.bit(i as u64) {
                v = self.powers[i].apply(&v);
            }
        }
        v
    }
}

/// Cached powers of a dense boolean matrix.
#[derive(Debug, Clone)]
pub struct BitLadder {
    powers: Vec<BitMatrix>,
}

impl BitLadder {
    pub fn new(base: BitMatrix) -> Self {
        BitLadder { powers: vec![base] }
    }

    pub fn apply_power(&mut self, start: Vec<u64>, length: &BigUint) -> Vec<u64> {
        let bits = length.bits() as usize;
        while self.powers.len() < bits {
            let last = self.powers.last().expect("nonempty ladder");
            let next = last.mul(last);
            self.powers.push(next);
        }
        let mut v = start;
        for i in 0..bits {
            if length.bit(i as u64) {
                v = self.powers[i].apply(&v);
            }
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturating_counts() {
        use RunCount::*;
        assert_eq!(One.add(&One), Many);
        assert_eq!(Many.mul(&Zero), Zero);
        assert_eq!(One.mul(&Many), Many);
        assert_eq!(Zero.add(&One), One);
    }

    #[test]
    fn sparse_and_bit_powers_agree_on_a_cycle_with_chord() {
        // 0 -> 1 -> 2 -> 0 and 0 -> 2
        let succ = vec![vec![1, 2], vec![2], vec![0]];
        let mut sparse = PowerLadder::<bool>::new(SparseMatrix::from_successors(&succ));
        let mut dense = BitLadder::new(BitMatrix::from_successors(&succ));
        for len in 0u32..40 {
            let l = BigUint::from(len);
            let s: Vec<usize> = sparse
                .apply_power(vec![(0, true)], &l)
                .into_iter()
                .map(|(c, _)| c)
                .collect();
            let d = dense.apply_power(vec![1], &l);
            let d: Vec<usize> = (0..3).filter(|&c| d[0] >> c & 1 == 1).collect();
            assert_eq!(s, d, "length {len}");
        }
    }

    #[test]
    fn exact_counts_follow_fibonacci() {
        // 0 -> {0, 1}, 1 -> {0}: walks of length L from 0 number F(L + 2).
        let succ = vec![vec![0, 1], vec![0]];
        let mut ladder = PowerLadder::<BigUint>::new(SparseMatrix::from_successors(&succ));
        let v = ladder.apply_power(vec![(0, BigUint::one())], &BigUint::from(10u32));
        let total: BigUint = v.into_iter().map(|(_, c)| c).sum();
        assert_eq!(total, BigUint::from(144u32));
    }
}
