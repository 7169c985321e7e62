//! Affine forms `α·b^k + β·k + γ` over the block index k.
//!
//! Interval endpoints of geometric families are affine in the triple
//! `(b^k, k, 1)`. Because `b^k` eventually dominates `k` dominates `1`
//! (for b ≥ 2), two distinct forms are eventually strictly ordered by the
//! lexicographic order on their coefficient triples. That fact is what lets
//! the exact density algorithm merge and order blocks symbolically.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// `α·b^k + β·k + γ` with integer coefficients. The base b is carried by the
/// owning family, not the form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineForm {
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
}

impl fmt::Debug for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·b^k {:+}·k {:+}", self.alpha, self.beta, self.gamma)
    }
}

impl AffineForm {
    pub const fn new(alpha: i64, beta: i64, gamma: i64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub const fn constant(gamma: i64) -> Self {
        Self::new(0, 0, gamma)
    }

    /// Exact evaluation at block index k.
    pub fn eval(&self, base: u64, k: u32) -> BigInt {
        let bk = BigInt::from(base).pow(k);
        BigInt::from(self.alpha) * bk + BigInt::from(self.beta) * k + BigInt::from(self.gamma)
    }

    pub fn add_const(&self, c: i64) -> Self {
        Self::new(self.alpha, self.beta, self.gamma + c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.alpha - other.alpha,
            self.beta - other.beta,
            self.gamma - other.gamma,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.alpha == 0 && self.beta == 0 && self.gamma == 0
    }

    /// Sign of the form for all sufficiently large k (lexicographic on
    /// (α, β, γ)). `Ordering::Equal` means identically zero.
    pub fn eventual_sign(&self) -> Ordering {
        (self.alpha, self.beta, self.gamma).cmp(&(0, 0, 0))
    }

    /// Smallest k₀ such that the sign of `eval(base, k)` equals
    /// `eventual_sign()` for every k ≥ k₀.
    ///
    /// For α ≠ 0 the b^k term dominates once `b^k > |β|·k + |γ|`, and the
    /// dominance margin grows monotonically from there; for α = 0 the linear
    /// term dominates similarly. The search is a short upward scan.
    pub fn stable_from(&self, base: u64) -> u32 {
        debug_assert!(base >= 2);
        if self.alpha != 0 {
            // b^k ≥ 2^k outgrows |β|k + |γ| quickly; 128 is a safe scan cap
            // for i64 coefficients (2^64 > |β|·128 + |γ| for all i64 β, γ
            // once k ≥ 70, and the loop below exits far earlier in practice).
            let beta = BigInt::from(self.beta.unsigned_abs());
            let gamma = BigInt::from(self.gamma.unsigned_abs());
            for k in 0..=128u32 {
                let bk = BigInt::from(base).pow(k);
                if bk > &beta * k + &gamma {
                    return k;
                }
            }
            unreachable!("b^k dominance must appear within 128 steps for i64 coefficients");
        } else if self.beta != 0 {
            // |β|·k > |γ| for k > |γ|/|β|.
            let k0 = self.gamma.unsigned_abs() / self.beta.unsigned_abs() + 1;
            k0.min(u32::MAX as u64) as u32
        } else {
            0
        }
    }

    /// True if `self(k) <= other(k)` for all k ≥ the returned threshold.
    /// Returns None when the inequality eventually fails.
    pub fn eventually_le(&self, other: &Self, base: u64) -> Option<u32> {
        let d = self.sub(other);
        match d.eventual_sign() {
            Ordering::Greater => None,
            Ordering::Equal => Some(0),
            Ordering::Less => Some(d.stable_from(base)),
        }
    }

    /// Pointwise-eventual max of two forms, with the k from which it is valid.
    pub fn eventual_max(&self, other: &Self, base: u64) -> (Self, u32) {
        match self.sub(other).eventual_sign() {
            Ordering::Less => (*other, self.sub(other).stable_from(base)),
            _ => (*self, self.sub(other).stable_from(base)),
        }
    }

    pub fn eventual_min(&self, other: &Self, base: u64) -> (Self, u32) {
        match self.sub(other).eventual_sign() {
            Ordering::Greater => (*other, self.sub(other).stable_from(base)),
            _ => (*self, self.sub(other).stable_from(base)),
        }
    }
}
