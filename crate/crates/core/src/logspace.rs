//! Positive reals stored by their natural logarithm.
//!
//! Full-scale quantities (prime counts like `b^n` with `n ~ 2^530`,
//! automaton sizes whose logarithm is itself astronomically large) never fit
//! in a float. They are carried as [`LogReal`]s, and when even the logarithm
//! overflows, as a `LogReal` of the logarithm.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

/// Natural log of a big integer. `ln(0)` is `-inf`.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit mantissa");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// The positive real `exp(ln)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct LogReal {
    ln: f64,
}

impl LogReal {
    pub fn from_ln(ln: f64) -> Self {
        LogReal { ln }
    }

    pub fn new(x: f64) -> Self {
        assert!(x > 0.0, "LogReal holds positive values only, got {x}");
        LogReal { ln: x.ln() }
    }

    pub fn from_biguint(x: &BigUint) -> Self {
        assert!(!x.is_zero(), "LogReal holds positive values only");
        LogReal { ln: ln_biguint(x) }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// The value itself; `inf` when it exceeds the float range.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    /// `ln(self)` as a `LogReal`; requires `self > 1`.
    pub fn log(self) -> LogReal {
        LogReal::new(self.ln)
    }

    pub fn scale(self, factor: f64) -> LogReal {
        self * LogReal::new(factor)
    }

    /// `self - other`, or `None` when the difference is not positive.
    pub fn checked_sub(self, other: LogReal) -> Option<LogReal> {
        if other.ln >= self.ln {
            return None;
        }
        Some(LogReal {
            ln: self.ln + (-(other.ln - self.ln).exp()).ln_1p(),
        })
    }

    pub fn sum(terms: impl IntoIterator<Item = LogReal>) -> LogReal {
        terms
            .into_iter()
            .reduce(|a, b| a + b)
            .expect("sum of at least one term")
    }
}

// products of values are sums of logarithms
#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Mul for LogReal {
    type Output = LogReal;

    fn mul(self, other: LogReal) -> LogReal {
        LogReal {
            ln: self.ln + other.ln,
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Div for LogReal {
    type Output = LogReal;

    fn div(self, other: LogReal) -> LogReal {
        LogReal {
            ln: self.ln - other.ln,
        }
    }
}

impl std::ops::Add for LogReal {
    type Output = LogReal;

    fn add(self, other: LogReal) -> LogReal {
        let (hi, lo) = if self.ln >= other.ln {
            (self.ln, other.ln)
        } else {
            (other.ln, self.ln)
        };
        LogReal {
            ln: hi + (lo - hi).exp().ln_1p(),
        }
    }
}
