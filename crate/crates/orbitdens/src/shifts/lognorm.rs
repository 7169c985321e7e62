//! Nonnegative values carried as log₂, with an explicit zero flag. Band
//! values reach 2^{±3k} for k well past what linear-domain f64 tolerates, so
//! all norm arithmetic stays in the log domain.

use crate::ratio::pow2;
use crate::Real;
use num_rational::BigRational;

/// A nonnegative real stored as log₂, or exact zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogNorm<F> {
    log2: F,
    zero: bool,
}

impl<F: Real> LogNorm<F> {
    pub fn zero() -> Self {
        Self {
            log2: F::zero(),
            zero: true,
        }
    }

    pub fn one() -> Self {
        Self::from_log2(F::zero())
    }

    pub fn from_log2(log2: F) -> Self {
        debug_assert!(log2.is_finite());
        Self { log2, zero: false }
    }

    /// From a linear-domain value ≥ 0.
    pub fn from_value(v: F) -> Self {
        if v == F::zero() {
            Self::zero()
        } else {
            Self::from_log2(v.abs().log2())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// log₂ of the value; None for zero.
    pub fn log2(&self) -> Option<F> {
        (!self.zero).then_some(self.log2)
    }

    /// Linear-domain value; may overflow to +inf for huge exponents.
    pub fn value(&self) -> F {
        if self.zero {
            F::zero()
        } else {
            self.log2.exp2()
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.zero || other.zero {
            Self::zero()
        } else {
            Self::from_log2(self.log2 + other.log2)
        }
    }

    /// Value^e for a real exponent e (e.g. 1/p roots).
    pub fn powf(&self, e: F) -> Self {
        if self.zero {
            Self::zero()
        } else {
            Self::from_log2(self.log2 * e)
        }
    }

    /// |c|·value for a scalar c.
    pub fn scale(&self, c: F) -> Self {
        if c == F::zero() {
            Self::zero()
        } else {
            self.mul(&Self::from_value(c))
        }
    }

    /// Σ of values, computed by max-extraction so that the largest exponent
    /// sets the scale and the rest enter as 2^{lᵢ − m} ∈ (0, 1].
    pub fn sum(terms: &[Self]) -> Self {
        let m = terms
            .iter()
            .filter(|t| !t.zero)
            .map(|t| t.log2)
            .fold(None, |acc: Option<F>, l| {
                Some(acc.map_or(l, |a| a.max(l)))
            });
        let m = match m {
            Some(m) => m,
            None => return Self::zero(),
        };
        let mut s = F::zero();
        for t in terms {
            if !t.zero {
                s = s + (t.log2 - m).exp2();
            }
        }
        Self::from_log2(m + s.log2())
    }

    /// Total order treating zero as the smallest element.
    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        match (self.zero, other.zero) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            (false, false) => self.log2.partial_cmp(&other.log2).expect("finite log norms"),
        }
    }

    /// value < 2^t
    pub fn lt_pow2(&self, t: F) -> bool {
        self.zero || self.log2 < t
    }

    /// value ≥ 2^t
    pub fn ge_pow2(&self, t: F) -> bool {
        !self.zero && self.log2 >= t
    }
}

impl<F: Real> std::fmt::Display for LogNorm<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.zero {
            write!(f, "0")
        } else {
            write!(f, "2^{}", self.log2)
        }
    }
}

/// Exact rational 2^e for integer-exponent dyadic values. Guarded: exponents
/// past ±4096 would be astronomically large and indicate a logic error.
pub fn dyadic_exact(e: i64) -> Option<BigRational> {
    (e.unsigned_abs() <= 4096).then(|| pow2(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_stable_at_extreme_scales() {
        let a = LogNorm::<f64>::from_log2(3000.0);
        let b = LogNorm::from_log2(-3000.0);
        let s = LogNorm::sum(&[a, b]);
        // The small term is invisible at f64 precision; the sum keeps the scale.
        assert!((s.log2().unwrap() - 3000.0).abs() < 1e-12);
    }

    #[test]
    fn sum_matches_linear_domain_when_safe() {
        let terms: Vec<LogNorm<f64>> = [1.0, 0.25, 8.0, 2.0]
            .iter()
            .map(|&v| LogNorm::from_value(v))
            .collect();
        let s = LogNorm::sum(&terms);
        assert!((s.value() - 11.25).abs() < 1e-12);
    }

    #[test]
    fn zero_propagates() {
        let z = LogNorm::<f64>::zero();
        assert!(z.mul(&LogNorm::one()).is_zero());
        assert!(LogNorm::sum(&[z, z]).is_zero());
        assert!(z.lt_pow2(-100.0));
        assert!(!z.ge_pow2(-100.0));
    }
}
