//! Natural-density calculus over ℕ: exact densities of geometric interval
//! families, empirical window densities of materialized sets, and the
//! constructive extraction of large subsequences along which a sequence
//! becomes small.

pub mod affine;
pub mod family;

pub use affine::AffineForm;
pub use family::{brute_force_prefix_ratio, GeomIntervalFamily, Schema};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::ratio::{self, ratio};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// How a density value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    /// An exact limit (liminf/limsup), as a rational number.
    Exact,
    /// A finite-horizon window estimate (min/max prefix ratio).
    Empirical,
}

/// Lower and upper density, with provenance. Empirical estimates record the
/// window they were measured on. Both bounds are carried as exact rationals;
/// for empirical estimates they are the extreme prefix ratios themselves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    #[serde(with = "crate::ratio")]
    pub lower: BigRational,
    #[serde(with = "crate::ratio")]
    pub upper: BigRational,
    pub kind: DensityKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(rename = "tailWindowStart", skip_serializing_if = "Option::is_none")]
    pub tail_window_start: Option<u64>,
}

impl DensityEstimate {
    pub fn exact(lower: BigRational, upper: BigRational) -> Self {
        debug_assert!(lower >= BigRational::zero() && lower <= upper && upper <= ratio(1, 1));
        Self {
            lower,
            upper,
            kind: DensityKind::Exact,
            horizon: None,
            tail_window_start: None,
        }
    }

    pub fn empirical(lower: BigRational, upper: BigRational, horizon: u64, tws: u64) -> Self {
        Self {
            lower,
            upper,
            kind: DensityKind::Empirical,
            horizon: Some(horizon),
            tail_window_start: Some(tws),
        }
    }

    pub fn lower_f64(&self) -> f64 {
        ratio::to_f64(&self.lower)
    }

    pub fn upper_f64(&self) -> f64 {
        ratio::to_f64(&self.upper)
    }

    /// Density of the complement: (1 − upper, 1 − lower), same kind.
    pub fn complement(&self) -> Self {
        Self {
            lower: BigRational::one() - &self.upper,
            upper: BigRational::one() - &self.lower,
            kind: self.kind,
            horizon: self.horizon,
            tail_window_start: self.tail_window_start,
        }
    }
}

/// Density of the complement set, by duality.
pub fn complement_density(d: &DensityEstimate) -> DensityEstimate {
    d.complement()
}

/// A subset of ℕ in one of three representations.
#[derive(Clone, Debug)]
pub enum IndexSet {
    Bitmap(BitSet),
    Sorted { items: Vec<u64>, horizon: u64 },
    Family(GeomIntervalFamily),
}

impl IndexSet {
    pub fn horizon(&self) -> Option<u64> {
        match self {
            IndexSet::Bitmap(b) => Some(b.horizon()),
            IndexSet::Sorted { horizon, .. } => Some(*horizon),
            IndexSet::Family(_) => None,
        }
    }

    /// Materializes to a bitmap (families need an explicit horizon).
    pub fn to_bitmap(&self, horizon: u64) -> Result<BitSet> {
        match self {
            IndexSet::Bitmap(b) if b.horizon() == horizon => Ok(b.clone()),
            IndexSet::Bitmap(b) => {
                let mut out = BitSet::new(horizon);
                for n in b.iter().take_while(|&n| n <= horizon) {
                    out.insert(n);
                }
                Ok(out)
            }
            IndexSet::Sorted { items, horizon: h } => {
                if let Some(&last) = items.last() {
                    if last > *h {
                        return Err(Error::Malformed(
                            "sorted index list exceeds its horizon".into(),
                        ));
                    }
                }
                if !items.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Malformed(
                        "index list must be strictly increasing".into(),
                    ));
                }
                let mut out = BitSet::new(horizon);
                for &n in items.iter().take_while(|&&n| n <= horizon) {
                    if n >= 1 {
                        out.insert(n);
                    }
                }
                Ok(out)
            }
            IndexSet::Family(f) => Ok(f.materialize(horizon)),
        }
    }
}

/// Empirical lower/upper density: min and max of the prefix ratio
/// #(A∩[1,n])/n over n ∈ [tailWindowStart, horizon].
pub fn empirical_density(set: &IndexSet, tail_window_start: u64) -> Result<DensityEstimate> {
    let horizon = set.horizon().ok_or_else(|| {
        Error::Parameter("empirical density needs a materialized set with a horizon".into())
    })?;
    empirical_density_of_bits(&set.to_bitmap(horizon)?, tail_window_start)
}

/// Same, directly on a bitmap.
pub fn empirical_density_of_bits(bits: &BitSet, tws: u64) -> Result<DensityEstimate> {
    let horizon = bits.horizon();
    if tws < 2 || horizon < 2 * tws {
        return Err(Error::Parameter(format!(
            "window requires horizon ≥ 2·tailWindowStart ≥ 4, got horizon {horizon}, start {tws}"
        )));
    }
    // Track extremes as integer fractions; compare by cross-multiplication.
    let mut min: (u64, u64) = (1, 1);
    let mut max: (u64, u64) = (0, 1);
    bits.scan_prefix(|n, c| {
        if n < tws {
            return;
        }
        if (c as u128) * (min.1 as u128) < (min.0 as u128) * (n as u128) {
            min = (c, n);
        }
        if (c as u128) * (max.1 as u128) > (max.0 as u128) * (n as u128) {
            max = (c, n);
        }
    });
    Ok(DensityEstimate::empirical(
        ratio(min.0 as i64, min.1 as i64),
        ratio(max.0 as i64, max.1 as i64),
        horizon,
        tws,
    ))
}

/// Tail-window convention: ratios at geometric checkpoints stabilize only
/// past the last full block, so the default window starts at horizon/8.
pub fn default_tail_window(horizon: u64) -> u64 {
    (horizon / 8).max(2)
}

/// Which staircase rule to apply when extracting a large subsequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtractMode {
    /// Targets full density: each level must *maintain* prefix ratio
    /// ≥ 1 − 2^{−m} from the threshold on.
    Full,
    /// Targets upper density: each level must *attain* a prefix-ratio peak
    /// close to the best it achieves past the previous threshold. The target
    /// is relative to that peak, so the construction also serves orbits whose
    /// level sets have upper density c < 1.
    Upper,
}

/// Outcome of the staircase construction.
#[derive(Clone, Debug, Serialize)]
pub struct StaircaseReport {
    /// (m, N_m) pairs actually placed.
    pub thresholds: Vec<(u32, u64)>,
    /// Deepest level m whose segment made it into the set.
    pub deepest: u32,
    /// True when some requested level could not be placed within the horizon.
    pub stalled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stalled_at: Option<u32>,
}

/// Constructive extraction: given nested level sets
/// `levels[i] = (m_i, {n ≤ horizon : |a_n| < 2^{−m_i}})` with m strictly
/// increasing, builds A by choosing N_{m_1} < N_{m_2} < … and taking the
/// m_i-th level set on the segment (N_{m_i}, N_{m_{i+1}}]; the last placed
/// level extends to the horizon.
///
/// Along A the sequence values are below the staircase threshold schedule,
/// and the set keeps (in `Full` mode) the density or (in `Upper` mode) the
/// achievable upper density of the levels.
pub fn extract_density_one_subset(
    levels: &[(u32, BitSet)],
    mode: ExtractMode,
) -> Result<(BitSet, StaircaseReport)> {
    let horizon = levels
        .first()
        .map(|(_, b)| b.horizon())
        .ok_or_else(|| Error::Parameter("no level sets supplied".into()))?;
    if levels.iter().any(|(_, b)| b.horizon() != horizon) {
        return Err(Error::Parameter("level sets must share one horizon".into()));
    }
    if !levels.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(Error::Parameter(
            "level thresholds must be strictly increasing in m".into(),
        ));
    }

    let mut out = BitSet::new(horizon);
    let mut placed: Vec<(u32, u64)> = Vec::new();
    let mut stalled_at = None;
    let mut prev_n = 0u64;

    for (m, bits) in levels {
        let next_n = match mode {
            ExtractMode::Full => maintain_threshold(bits, *m, prev_n),
            ExtractMode::Upper => attain_threshold(bits, *m, prev_n),
        };
        match next_n {
            Some(n) => {
                placed.push((*m, n));
                prev_n = n;
            }
            None => {
                stalled_at = Some(*m);
                break;
            }
        }
    }

    // Assemble segments: level i covers (N_i, N_{i+1}], the last to horizon.
    for (i, &(m, n)) in placed.iter().enumerate() {
        let end = placed.get(i + 1).map_or(horizon, |&(_, n2)| n2);
        let bits = &levels.iter().find(|(mm, _)| *mm == m).unwrap().1;
        out.union_segment(bits, n, end);
    }

    let report = StaircaseReport {
        deepest: placed.last().map_or(0, |&(m, _)| m),
        thresholds: placed,
        stalled: stalled_at.is_some(),
        stalled_at,
    };
    Ok((out, report))
}

/// Smallest n > prev such that the prefix ratio of `bits` stays ≥ 1 − 2^{−m}
/// on [n, horizon].
fn maintain_threshold(bits: &BitSet, m: u32, prev: u64) -> Option<u64> {
    let horizon = bits.horizon();
    // ratio(n) ≥ 1 − 2^{−m}  ⟺  c·2^m ≥ n·(2^m − 1)
    let p = 1u128 << m.min(62);
    let mut first_ok: Option<u64> = None;
    let mut count = bits.count_prefix(prev);
    for n in prev + 1..=horizon {
        if bits.contains(n) {
            count += 1;
        }
        if (count as u128) * p >= (n as u128) * (p - 1) {
            first_ok.get_or_insert(n);
        } else {
            first_ok = None;
        }
    }
    first_ok
}

/// Smallest n > prev at which the prefix ratio of `bits` reaches
/// `peak·(1 − 2^{−m})`, where peak is the best ratio attained on
/// (prev, horizon]. None when the set is empty past prev.
fn attain_threshold(bits: &BitSet, m: u32, prev: u64) -> Option<u64> {
    let horizon = bits.horizon();
    if bits.count_prefix(horizon) == bits.count_prefix(prev) {
        return None; // level set empty past prev: the staircase stalls
    }
    let mut peak: (u64, u64) = (0, 1);
    let mut count = bits.count_prefix(prev);
    for n in prev + 1..=horizon {
        if bits.contains(n) {
            count += 1;
        }
        if (count as u128) * (peak.1 as u128) > (peak.0 as u128) * (n as u128) {
            peak = (count, n);
        }
    }
    // target = peak · (1 − 2^{−m}); compare c/n ≥ peak.0/peak.1 · (2^m−1)/2^m
    let p = 1u128 << m.min(62);
    let mut count = bits.count_prefix(prev);
    for n in prev + 1..=horizon {
        if bits.contains(n) {
            count += 1;
        }
        let lhs = (count as u128) * (peak.1 as u128) * p;
        let rhs = (peak.0 as u128) * (n as u128) * (p - 1);
        if lhs >= rhs {
            return Some(n);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_interval(horizon: u64) -> IndexSet {
        let mut b = BitSet::new(horizon);
        b.insert_range(1, horizon);
        IndexSet::Bitmap(b)
    }

    #[test]
    fn full_set_has_density_one() {
        let d = empirical_density(&full_interval(1000), 500).unwrap();
        assert_eq!(d.lower, ratio(1, 1));
        assert_eq!(d.upper, ratio(1, 1));
        assert_eq!(d.kind, DensityKind::Empirical);
    }

    #[test]
    fn even_numbers_have_density_half() {
        let horizon = 1_000_000;
        let mut b = BitSet::new(horizon);
        for n in (2..=horizon).step_by(2) {
            b.insert(n);
        }
        let d = empirical_density(&IndexSet::Bitmap(b), 100_000).unwrap();
        assert!((d.lower_f64() - 0.5).abs() < 1e-4);
        assert!((d.upper_f64() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn case3_family_window_estimates() {
        // ∪_{k≤6}[2·8^k, 8^{k+1}] materialized to 8^7, window from 8^6.
        let fam = GeomIntervalFamily::single(
            8,
            1,
            AffineForm::new(2, 0, 0),
            AffineForm::new(8, 0, 0),
        )
        .unwrap();
        let horizon = 8u64.pow(7);
        let d =
            empirical_density(&IndexSet::Bitmap(fam.materialize(horizon)), 8u64.pow(6)).unwrap();
        assert!((d.lower_f64() - 3.0 / 7.0).abs() < 1e-3);
        assert!((d.upper_f64() - 6.0 / 7.0).abs() < 1e-3);
    }

    #[test]
    fn window_parameter_validation() {
        assert!(matches!(
            empirical_density(&full_interval(100), 51),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            empirical_density(&full_interval(100), 1),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn complement_examples_and_involution() {
        let d = DensityEstimate::exact(ratio(3, 7), ratio(6, 7));
        let c = complement_density(&d);
        assert_eq!(c.lower, ratio(1, 7));
        assert_eq!(c.upper, ratio(4, 7));
        assert_eq!(complement_density(&c), d);

        let one = DensityEstimate::exact(ratio(1, 1), ratio(1, 1));
        assert_eq!(complement_density(&one).upper, ratio(0, 1));
        let zero = DensityEstimate::exact(ratio(0, 1), ratio(0, 1));
        assert_eq!(complement_density(&zero).lower, ratio(1, 1));
    }

    fn reciprocal_levels(horizon: u64, depth: u32) -> Vec<(u32, BitSet)> {
        // a_n = 1/n: level m is {n : 1/n < 2^{−m}} = {n > 2^m}.
        (1..=depth)
            .map(|m| {
                let mut b = BitSet::new(horizon);
                if 2u64.pow(m) < horizon {
                    b.insert_range(2u64.pow(m) + 1, horizon);
                }
                (m, b)
            })
            .collect()
    }

    #[test]
    fn staircase_full_mode_on_vanishing_sequence() {
        let horizon = 100_000;
        let levels = reciprocal_levels(horizon, 10);
        let (set, report) = extract_density_one_subset(&levels, ExtractMode::Full).unwrap();
        // a_n → 0 outright: the set is cofinite on the tail.
        let d = empirical_density_of_bits(&set, horizon / 8).unwrap();
        assert!(d.lower_f64() >= 0.999, "lower = {}", d.lower_f64());
        assert!(report.deepest >= 8);
    }

    #[test]
    fn staircase_stalls_on_constant_sequence() {
        // a_n = 1: every level set is empty.
        let horizon = 1000;
        let levels: Vec<(u32, BitSet)> = (1..=4).map(|m| (m, BitSet::new(horizon))).collect();
        let (set, report) = extract_density_one_subset(&levels, ExtractMode::Upper).unwrap();
        assert!(report.stalled);
        assert_eq!(report.stalled_at, Some(1));
        assert!(set.is_empty());
    }

    #[test]
    fn staircase_full_segments_agree_with_levels() {
        let horizon = 100_000;
        let levels = reciprocal_levels(horizon, 8);
        let (set, report) = extract_density_one_subset(&levels, ExtractMode::Full).unwrap();
        // On each placed segment the output coincides with that level set.
        for (i, &(m, n)) in report.thresholds.iter().enumerate() {
            let end = report
                .thresholds
                .get(i + 1)
                .map_or(horizon, |&(_, n2)| n2);
            let level = &levels.iter().find(|(mm, _)| *mm == m).unwrap().1;
            for n2 in n + 1..=end {
                assert_eq!(set.contains(n2), level.contains(n2));
            }
        }
    }
}
