//! Minimal period of a unary language that depends on lengths only through
//! their residues modulo the primes in P.
//!
//! Adding `d = prod_{j in S} P_j` leaves residues at `S` fixed and cycles
//! every other coordinate through all of its values, so membership is
//! invariant under `+d` exactly when it ignores the coordinates outside
//! `S`. The minimal period is the product of the primes whose coordinate
//! matters, and coordinates can be tested one at a time.

use num_bigint::BigUint;

use crate::residue::{ModuliSystem, ResidueVector};

/// A language over residue vectors, together with a finite set of
/// representative values per coordinate: every residue not listed behaves
/// like the last listed one.
pub trait ResidueLanguage {
    fn contains(&self, rv: &ResidueVector) -> bool;
    fn representatives(&self, index: usize) -> Vec<u64>;
}

/// `L(A)` at lengths `>= 1`: some vertex finds the vector acceptable.
/// Residues only ever get compared with `0` and vertex labels, so
/// `0..=n` plus one other value represent every coordinate.
pub struct UfaLanguage<'a> {
    ms: &'a ModuliSystem,
}

impl<'a> UfaLanguage<'a> {
    pub fn new(ms: &'a ModuliSystem) -> Self {
        UfaLanguage { ms }
    }
}

impl ResidueLanguage for UfaLanguage<'_> {
    fn contains(&self, rv: &ResidueVector) -> bool {
        (1..=self.ms.n()).any(|i| self.ms.acceptable_raw(rv.as_slice(), i))
    }

    fn representatives(&self, index: usize) -> Vec<u64> {
        let n = self.ms.n() as u64;
        let p = self.ms.prime(index);
        (0..=n + 1).filter(|&r| r < p).collect()
    }
}

/// Evidence that a coordinate matters: membership differs between
/// `vector` and `vector` with `alternate` at `index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EssentialWitness {
    pub index: usize,
    pub vector: ResidueVector,
    pub alternate: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodReport {
    /// Length 0 is special (the initial state never accepts).
    pub preperiod: u64,
    /// Prime indices whose product is the period.
    pub essential: Vec<usize>,
    pub period: BigUint,
    pub witnesses: Vec<EssentialWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PeriodError {
    #[error("reduced residue domain has {size} points, limit is {limit}")]
    DomainTooLarge { size: u128, limit: u64 },
}

/// Tabulates membership over the reduced domain (products of the
/// representatives) and greedily drops every prime whose coordinate never
/// changes membership.
pub fn minimal_period(
    ms: &ModuliSystem,
    language: &impl ResidueLanguage,
    domain_limit: u64,
) -> Result<PeriodReport, PeriodError> {
    let count = ms.prime_count();
    let reps: Vec<Vec<u64>> = (0..count).map(|j| language.representatives(j)).collect();
    let size = reps
        .iter()
        .try_fold(1u128, |acc, r| acc.checked_mul(r.len() as u128));
    let size = match size {
        Some(s) if s <= domain_limit as u128 => s as usize,
        other => {
            return Err(PeriodError::DomainTooLarge {
                size: other.unwrap_or(u128::MAX),
                limit: domain_limit,
            })
        }
    };
    // Mixed radix with coordinate 0 varying fastest.
    let mut strides = Vec::with_capacity(count);
    let mut stride = 1usize;
    for r in &reps {
        strides.push(stride);
        stride *= r.len();
    }
    let decode = |mut code: usize| -> ResidueVector {
        ResidueVector(
            reps.iter()
                .map(|r| {
                    let v = r[code % r.len()];
                    code /= r.len();
                    v
                })
                .collect(),
        )
    };
    let table: Vec<bool> = (0..size)
        .map(|code| language.contains(&decode(code)))
        .collect();

    let mut essential = Vec::new();
    let mut witnesses = Vec::new();
    'coords: for j in 0..count {
        let radix = reps[j].len();
        for code in 0..size {
            let digit = code / strides[j] % radix;
            if digit != 0 {
                continue;
            }
            for (alt, &value) in reps[j].iter().enumerate().skip(1) {
                let other = code + alt * strides[j];
                if table[code] != table[other] {
                    essential.push(j);
                    witnesses.push(EssentialWitness {
                        index: j,
                        vector: decode(code),
                        alternate: value,
                    });
                    continue 'coords;
                }
            }
        }
    }
    let period = essential
        .iter()
        .map(|&j| BigUint::from(ms.prime(j)))
        .product();
    Ok(PeriodReport {
        preperiod: 1,
        essential,
        period,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::tests::triangle_system;
    use num_traits::One;

    struct Always;

    impl ResidueLanguage for Always {
        fn contains(&self, _: &ResidueVector) -> bool {
            true
        }
        fn representatives(&self, _: usize) -> Vec<u64> {
            vec![0, 1]
        }
    }

    #[test]
    fn constant_language_has_period_one() {
        let ms = triangle_system();
        let report = minimal_period(&ms, &Always, 1 << 20).unwrap();
        assert!(report.essential.is_empty());
        assert!(report.period.is_one());
    }

    #[test]
    fn triangle_language_period() {
        let ms = triangle_system();
        let report = minimal_period(&ms, &UfaLanguage::new(&ms), 1 << 20).unwrap();
        assert!(!report.essential.contains(&7));
        assert!(report.essential.contains(&6));
        let without_29 = ms.primes_product() / 29u32;
        assert_eq!(&without_29 % &report.period, BigUint::from(0u32));
        for w in &report.witnesses {
            let mut flipped = w.vector.clone();
            flipped.0[w.index] = w.alternate;
            let lang = UfaLanguage::new(&ms);
            assert_ne!(lang.contains(&w.vector), lang.contains(&flipped));
        }
    }

    #[test]
    fn prime_23_flip_changes_the_all_one_class() {
        let ms = triangle_system();
        let lang = UfaLanguage::new(&ms);
        let ones = ResidueVector::constant(8, 1);
        let mut flipped = ones.clone();
        flipped.0[6] = 2;
        assert!(lang.contains(&ones));
        assert!(!lang.contains(&flipped));
    }

    #[test]
    fn oversized_domain_is_refused() {
        let ms = triangle_system();
        assert!(matches!(
            minimal_period(&ms, &UfaLanguage::new(&ms), 1000),
            Err(PeriodError::DomainTooLarge { .. })
        ));
    }
}
