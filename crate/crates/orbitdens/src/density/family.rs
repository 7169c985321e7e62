//! Geometric interval families and their exact natural densities.
//!
//! A family over base b is a finite union of schemas, each denoting
//! `∪_{k ≥ kMin} [L(k), R(k)] ∩ ℕ` with affine endpoints in (b^k, k, 1).
//! When the per-k blocks are eventually disjoint and each block's length
//! grows like a positive multiple of b^k, the counting ratio #(F∩[1,n])/n
//! oscillates between rational limits that the family determines exactly:
//! extrema occur along the run-endpoint sequences, where the accumulated
//! count is a geometric series whose k-linear and constant parts vanish
//! in the limit.

use super::affine::AffineForm;
use super::DensityEstimate;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::ratio::ratio;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// One k-indexed interval schema `[L(k), R(k)]`, k ≥ kMin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    #[serde(rename = "kMin")]
    pub k_min: u32,
    #[serde(rename = "L", with = "affine_triple")]
    pub lo: AffineForm,
    #[serde(rename = "R", with = "affine_triple")]
    pub hi: AffineForm,
}

mod affine_triple {
    use super::AffineForm;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(f: &AffineForm, s: S) -> Result<S::Ok, S::Error> {
        [f.alpha, f.beta, f.gamma].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<AffineForm, D::Error> {
        let [alpha, beta, gamma] = <[i64; 3]>::deserialize(d)?;
        Ok(AffineForm::new(alpha, beta, gamma))
    }
}

impl Schema {
    pub fn new(k_min: u32, lo: AffineForm, hi: AffineForm) -> Self {
        Self { k_min, lo, hi }
    }

    /// Block length at k, `R(k) − L(k) + 1`.
    fn len_form(&self) -> AffineForm {
        self.hi.sub(&self.lo).add_const(1)
    }

    /// Thin schemas have no b^k mass and do not contribute to density.
    pub fn is_thin(&self) -> bool {
        self.hi.alpha == self.lo.alpha
    }

    pub fn shifted(&self, c: i64) -> Self {
        Self::new(self.k_min, self.lo.add_const(c), self.hi.add_const(c))
    }
}

/// A finite union of schemas sharing one base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeomIntervalFamily {
    pub base: u64,
    pub schemas: Vec<Schema>,
}

impl GeomIntervalFamily {
    /// Validates the construction invariants and returns the family.
    pub fn new(base: u64, schemas: Vec<Schema>) -> Result<Self> {
        let fam = Self { base, schemas };
        fam.validate()?;
        Ok(fam)
    }

    /// Convenience constructor: one schema `[L(k), R(k)]`, k ≥ kMin.
    pub fn single(base: u64, k_min: u32, lo: AffineForm, hi: AffineForm) -> Result<Self> {
        Self::new(base, vec![Schema::new(k_min, lo, hi)])
    }

    pub fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return Err(Error::Malformed(format!(
                "family base must be ≥ 2, got {}",
                self.base
            )));
        }
        for (i, s) in self.schemas.iter().enumerate() {
            if s.lo.alpha < 0 || s.hi.alpha < 0 {
                return Err(Error::Malformed(format!(
                    "schema {i}: b^k coefficients must be nonnegative"
                )));
            }
            if s.hi.alpha < s.lo.alpha {
                return Err(Error::Malformed(format!(
                    "schema {i}: αR < αL (interval shrinks at geometric rate)"
                )));
            }
            // L(k) ≤ R(k) + 1 for every k ≥ kMin: check eventual sign of the
            // length, then scan the pre-stable prefix exactly.
            let len = s.len_form();
            if len.eventual_sign() == Ordering::Less {
                return Err(Error::Malformed(format!(
                    "schema {i}: eventually L(k) > R(k)+1"
                )));
            }
            let stable = len.stable_from(self.base).max(s.k_min);
            for k in s.k_min..=stable {
                if len.eval(self.base, k).is_negative() {
                    return Err(Error::Malformed(format!(
                        "schema {i}: L(k) > R(k)+1 at k = {k}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True iff every schema is thin (lengths eventually dominated by b^k
    /// only when αR > αL, so a thin family carries zero density).
    pub fn is_thin(&self) -> bool {
        self.schemas.iter().all(Schema::is_thin)
    }

    /// Translates every interval by the fixed integer c.
    pub fn shifted(&self, c: i64) -> Self {
        Self {
            base: self.base,
            schemas: self.schemas.iter().map(|s| s.shifted(c)).collect(),
        }
    }

    /// Membership of a single point, by direct block evaluation.
    pub fn contains(&self, n: u64) -> bool {
        let n = BigInt::from(n);
        for s in &self.schemas {
            let mut k = s.k_min;
            loop {
                let lo = s.lo.eval(self.base, k);
                let hi = s.hi.eval(self.base, k);
                if lo <= n && n <= hi {
                    return true;
                }
                // Once the block start passes n and keeps growing, stop.
                if lo > n && k >= s.lo.stable_from(self.base) {
                    break;
                }
                k += 1;
                if k > 200 {
                    break;
                }
            }
        }
        false
    }

    /// Materializes the family restricted to [1, horizon].
    pub fn materialize(&self, horizon: u64) -> BitSet {
        let mut bits = BitSet::new(horizon);
        let h = BigInt::from(horizon);
        for s in &self.schemas {
            let stable = s.lo.stable_from(self.base);
            let mut k = s.k_min;
            loop {
                let lo = s.lo.eval(self.base, k);
                let hi = s.hi.eval(self.base, k);
                if lo > h && k >= stable {
                    break;
                }
                if hi >= BigInt::from(1u32) && lo <= h {
                    let lo = lo.max(BigInt::from(1u32)).to_u64().unwrap();
                    let hi = hi.min(h.clone()).to_u64().unwrap();
                    bits.insert_range(lo, hi);
                }
                k += 1;
                if k > 400 {
                    break;
                }
            }
        }
        bits
    }

    /// Exact lower and upper natural density of the union.
    ///
    /// Rejects families whose block structure does not eventually settle into
    /// ordered disjoint runs; those are "unsupported structure", not
    /// approximated.
    pub fn exact_union_density(&self) -> Result<DensityEstimate> {
        self.validate()?;
        let b = self.base;

        // Drop identically-empty schemas.
        let live: Vec<Schema> = self
            .schemas
            .iter()
            .copied()
            .filter(|s| s.len_form().eventual_sign() == Ordering::Greater)
            .collect();

        if live.is_empty() || live.iter().all(Schema::is_thin) {
            // Counting function is o(n): density zero.
            return Ok(DensityEstimate::exact(
                BigRational::zero(),
                BigRational::zero(),
            ));
        }

        // Merge the per-k blocks of all schemas into eventually-disjoint runs,
        // ordered by their eventual position.
        let mut sorted = live.clone();
        sorted.sort_by_key(|s| (s.lo.alpha, s.lo.beta, s.lo.gamma));

        struct Run {
            lo: AffineForm,
            hi: AffineForm,
        }
        let mut runs: Vec<Run> = Vec::new();
        for s in &sorted {
            match runs.last_mut() {
                Some(run) if s.lo.eventually_le(&run.hi.add_const(1), b).is_some() => {
                    let (hi, _) = run.hi.eventual_max(&s.hi, b);
                    run.hi = hi;
                }
                _ => runs.push(Run { lo: s.lo, hi: s.hi }),
            }
        }

        // Disjointness across consecutive runs within a cycle is implied by
        // the merge; check the cycle wrap: the last run of cycle k must end
        // before the first run of cycle k+1 begins.
        let first_next = AffineForm::new(
            runs[0]
                .lo
                .alpha
                .checked_mul(b as i64)
                .ok_or_else(|| Error::Malformed("endpoint coefficient overflow".into()))?,
            runs[0].lo.beta,
            runs[0].lo.beta + runs[0].lo.gamma,
        );
        let last = runs.last().unwrap();
        if last.hi.eventually_le(&first_next.add_const(-1), b).is_none() {
            return Err(Error::UnsupportedStructure(
                "blocks of consecutive k overlap; the union never settles into disjoint cycles"
                    .into(),
            ));
        }

        // In a supported fat family every run starts at a positive multiple
        // of b^k (otherwise the previous cycle would swallow it).
        if runs.iter().any(|r| r.lo.alpha == 0) {
            return Err(Error::UnsupportedStructure(
                "run with no b^k growth in its start point inside a fat family".into(),
            ));
        }

        // Candidate limits. With δ_i = αR_i − αL_i and Δ = Σ δ_i, the count
        // at the start of run i in cycle K is b^K·(Δ/(b−1) + Σ_{j<i} δ_j) up
        // to o(b^K), and at its end the partial sum includes δ_i as well.
        let delta: Vec<i64> = runs.iter().map(|r| r.hi.alpha - r.lo.alpha).collect();
        let total: i64 = delta.iter().sum();
        let geo = ratio(total, b as i64 - 1);

        let mut lower: Option<BigRational> = None;
        let mut upper: Option<BigRational> = None;
        let mut before = BigRational::zero();
        for (i, run) in runs.iter().enumerate() {
            let at_start = (&geo + &before) / ratio(run.lo.alpha, 1);
            before += ratio(delta[i], 1);
            let at_end = (&geo + &before) / ratio(run.hi.alpha, 1);
            lower = Some(match lower {
                Some(l) => l.min(at_start.clone()),
                None => at_start.clone(),
            });
            upper = Some(match upper {
                Some(u) => u.max(at_end.clone()),
                None => at_end.clone(),
            });
        }
        let (lower, upper) = (lower.unwrap(), upper.unwrap());
        if lower < BigRational::zero() || upper > ratio(1, 1) || lower > upper {
            return Err(Error::UnsupportedStructure(
                "candidate limits escaped [0,1]; block structure is inconsistent".into(),
            ));
        }
        Ok(DensityEstimate::exact(lower, upper))
    }

    /// Set intersection with another family over the same base, as a family.
    ///
    /// Blocks of the two operands are intersected pairwise for aligned and
    /// nearby cycle offsets; offsets beyond the geometric reach of the
    /// operands cannot intersect eventually and contribute only finitely many
    /// points, which carry no density.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::Parameter(
                "intersecting families with different bases".into(),
            ));
        }
        let b = self.base;
        let mut out: Vec<Schema> = Vec::new();
        for s1 in &self.schemas {
            for s2 in &other.schemas {
                for d in -4i32..=4 {
                    // Block k of s1 against block k+d of s2.
                    let (lo2, hi2) = match shift_block_index(s2, d, b) {
                        Some(pair) => pair,
                        None => continue,
                    };
                    let (lo, klo) = s1.lo.eventual_max(&lo2, b);
                    let (hi, khi) = s1.hi.eventual_min(&hi2, b);
                    let cand = Schema::new(
                        s1.k_min
                            .max((s2.k_min as i64 - d as i64).max(0) as u32)
                            .max(klo)
                            .max(khi),
                        lo,
                        hi,
                    );
                    if cand.len_form().eventual_sign() == Ordering::Greater {
                        out.push(cand);
                    }
                }
            }
        }
        // Deduplicate identical schemas produced by symmetric offsets.
        out.sort_by_key(|s| {
            (
                s.lo.alpha, s.lo.beta, s.lo.gamma, s.hi.alpha, s.hi.beta, s.hi.gamma, s.k_min,
            )
        });
        out.dedup();
        Ok(Self { base: b, schemas: out })
    }
}

/// Re-expresses block k+d of a schema as affine forms in k, when that keeps
/// coefficients in range. Returns None for offsets that push b^(k+d) out of
/// i64 or below k_min reach.
fn shift_block_index(s: &Schema, d: i32, base: u64) -> Option<(AffineForm, AffineForm)> {
    let scale = |f: &AffineForm| -> Option<AffineForm> {
        let factor = if d >= 0 {
            (base as i64).checked_pow(d as u32)?
        } else {
            // α must stay integral: b^k terms of the shifted form are
            // α/b^|d|·b^k; only representable when α divides evenly.
            let down = (base as i64).checked_pow((-d) as u32)?;
            if f.alpha % down != 0 {
                return None;
            }
            1 // handled below
        };
        let alpha = if d >= 0 {
            f.alpha.checked_mul(factor)?
        } else {
            f.alpha / (base as i64).pow((-d) as u32)
        };
        Some(AffineForm::new(
            alpha,
            f.beta,
            f.gamma.checked_add(f.beta.checked_mul(d as i64)?)?,
        ))
    };
    Some((scale(&s.lo)?, scale(&s.hi)?))
}

/// Brute-force prefix ratio `#(F ∩ [1, n]) / n` by direct block enumeration.
/// This is the independent counting route used to cross-check the exact
/// limits at finite checkpoints.
pub fn brute_force_prefix_ratio(fam: &GeomIntervalFamily, n: u64) -> BigRational {
    let bits = fam.materialize(n);
    ratio(bits.count() as i64, n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::to_f64;

    fn fam1() -> GeomIntervalFamily {
        // ∪ [2·8^k, 8^{k+1}]
        GeomIntervalFamily::single(
            8,
            1,
            AffineForm::new(2, 0, 0),
            AffineForm::new(8, 0, 0),
        )
        .unwrap()
    }

    fn fam2(m: u32) -> GeomIntervalFamily {
        // ∪_{k≥m} [8^k + k, 2·8^k − k]
        GeomIntervalFamily::single(
            8,
            m,
            AffineForm::new(1, 1, 0),
            AffineForm::new(2, -1, 0),
        )
        .unwrap()
    }

    fn fam3() -> GeomIntervalFamily {
        // ∪ [8^k + 3k + 1, 8^{k+1}]
        GeomIntervalFamily::single(
            8,
            1,
            AffineForm::new(1, 3, 1),
            AffineForm::new(8, 0, 0),
        )
        .unwrap()
    }

    #[test]
    fn case3_lower_family_exact() {
        let d = fam1().exact_union_density().unwrap();
        assert_eq!(d.lower, ratio(3, 7));
        assert_eq!(d.upper, ratio(6, 7));
    }

    #[test]
    fn case3_upper_family_exact_all_kmin() {
        for m in 1..=3 {
            let d = fam2(m).exact_union_density().unwrap();
            assert_eq!(d.lower, ratio(1, 7), "m = {m}");
            assert_eq!(d.upper, ratio(4, 7), "m = {m}");
        }
    }

    #[test]
    fn case4_plateau_family_density_one() {
        let d = fam3().exact_union_density().unwrap();
        assert_eq!(d.lower, ratio(1, 1));
        assert_eq!(d.upper, ratio(1, 1));
    }

    #[test]
    fn singleton_family_density_zero() {
        // [b^k, b^k]
        let f = GeomIntervalFamily::single(
            8,
            1,
            AffineForm::new(1, 0, 0),
            AffineForm::new(1, 0, 0),
        )
        .unwrap();
        let d = f.exact_union_density().unwrap();
        assert!(d.lower.is_zero() && d.upper.is_zero());
    }

    #[test]
    fn merged_two_schema_family_is_cofinite() {
        // [8^k+k, 2·8^k−k] ∪ [2·8^k, 8^{k+1}] leaves only O(k) gaps per block.
        let f = GeomIntervalFamily::new(
            8,
            vec![
                Schema::new(1, AffineForm::new(1, 1, 0), AffineForm::new(2, -1, 0)),
                Schema::new(1, AffineForm::new(2, 0, 0), AffineForm::new(8, 0, 0)),
            ],
        )
        .unwrap();
        let d = f.exact_union_density().unwrap();
        assert_eq!(d.lower, ratio(1, 1));
        assert_eq!(d.upper, ratio(1, 1));
    }

    #[test]
    fn malformed_and_unsupported_structures_are_rejected() {
        // αR < αL
        let bad = GeomIntervalFamily::new(
            8,
            vec![Schema::new(1, AffineForm::new(2, 0, 0), AffineForm::new(1, 0, 0))],
        );
        assert!(matches!(bad, Err(Error::Malformed(_))));

        // Blocks [8^k, 3·8^k] overlap the next cycle (3 > 8·... no: 3·8^k < 8^{k+1};
        // use [8^k, 9·8^k] which swallows cycle k+1).
        let f = GeomIntervalFamily::new(
            8,
            vec![Schema::new(1, AffineForm::new(1, 0, 0), AffineForm::new(9, 0, 0))],
        )
        .unwrap();
        assert!(matches!(
            f.exact_union_density(),
            Err(Error::UnsupportedStructure(_))
        ));
    }

    #[test]
    fn brute_force_matches_limits_at_deep_checkpoints() {
        // Checkpoints t = L(K), R(K); the prefix ratio approaches the
        // candidate limit attached to that endpoint sequence.
        let f = fam1();
        for k in 5..=6u32 {
            let l = f.schemas[0].lo.eval(8, k).to_u64().unwrap();
            let r = brute_force_prefix_ratio(&f, l);
            assert!((to_f64(&r) - 3.0 / 7.0).abs() < 1e-3, "L({k}): {}", to_f64(&r));
            let h = f.schemas[0].hi.eval(8, k).to_u64().unwrap();
            let r = brute_force_prefix_ratio(&f, h);
            assert!((to_f64(&r) - 6.0 / 7.0).abs() < 1e-3, "R({k}): {}", to_f64(&r));
        }
    }

    #[test]
    fn shift_preserves_exact_density() {
        for c in [-37i64, -1, 0, 1, 11, 360] {
            let d0 = fam2(1).exact_union_density().unwrap();
            let d1 = fam2(1).shifted(c).exact_union_density().unwrap();
            assert_eq!(d0.lower, d1.lower);
            assert_eq!(d0.upper, d1.upper);
        }
    }

    #[test]
    fn intersection_matches_materialized_sets() {
        let a = fam2(1);
        let b = fam2(1).shifted(3);
        let cap = a.intersect(&b).unwrap();
        let horizon = 8u64.pow(5);
        let ma = a.materialize(horizon);
        let mb = b.materialize(horizon);
        let mc = cap.materialize(horizon);
        // Beyond the first block the symbolic intersection is exact; the
        // finite prefix may differ only where blocks from k < kMin sat.
        for n in 100..=horizon {
            assert_eq!(
                mc.contains(n),
                ma.contains(n) && mb.contains(n),
                "mismatch at n = {n}"
            );
        }
        let d = cap.exact_union_density().unwrap();
        assert_eq!(d.upper, ratio(4, 7));
    }

    #[test]
    fn json_round_trip_matches_interface() {
        let f = fam2(2);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"base":8,"schemas":[{"kMin":2,"L":[1,1,0],"R":[2,-1,0]}]}"#
        );
        let back: GeomIntervalFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
