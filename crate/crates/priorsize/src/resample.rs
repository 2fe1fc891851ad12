//! Subsampled estimation of the average posterior uncertainty curve U(k).
//!
//! For each subsample size k the estimator either enumerates all C(n, k)
//! subsets (when that count fits the budget) or draws budget-many uniform
//! random k-subsets. The random stream for size k is derived from
//! (master seed, k), so curves built with different maximum k share
//! subsamples for the sizes they have in common, and per-k work can be
//! scheduled on any number of threads without changing the result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::families::{FamilySpec, SufficientSummary};
use crate::uncertainty::{d_measure, median_of_sorted, Aggregator, ThetaHat, UncertaintyConfig};

const SUBSAMPLE_STREAM: u64 = 0x5352_5354_5245_414d; // stream tag

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic per-(seed, tag, k) stream seed.
pub(crate) fn derive_seed(master: u64, tag: u64, k: u64) -> u64 {
    splitmix64(splitmix64(master ^ tag).wrapping_add(splitmix64(k)))
}

/// C(n, k) computed with an early exit once it exceeds `cap`.
pub fn n_choose_k_capped(n: usize, k: usize, cap: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsamplePlan {
    pub n: usize,
    pub k_grid: Vec<usize>,
    pub budget_b: usize,
    pub seed: u64,
    /// Enumerate exactly when C(n, k) is at most this; defaults to budget_b.
    pub enumerate_threshold: Option<u128>,
}

impl SubsamplePlan {
    /// Default K = ceil(sqrt(n)), capped at n.
    pub fn default_k_max(n: usize) -> usize {
        ((n as f64).sqrt().ceil() as usize).min(n)
    }

    pub fn new(n: usize, k_min: usize, k_max: usize, budget_b: usize, seed: u64) -> Self {
        Self { n, k_grid: (k_min..=k_max.min(n)).collect(), budget_b, seed, enumerate_threshold: None }
    }

    fn threshold(&self) -> u128 {
        self.enumerate_threshold.unwrap_or(self.budget_b as u128)
    }
}

/// One estimated point of the uncertainty curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UPoint {
    pub k: usize,
    pub u_hat: f64,
    /// Monte Carlo standard error of `u_hat` as an estimate of the
    /// model-average uncertainty. Includes both the finite-subsample term
    /// (var/B) and the U-statistic data-overlap term ((k/n)·var), since
    /// subsamples of one dataset are correlated.
    pub se: f64,
    pub n_subsamples: usize,
    pub n_degenerate: usize,
}

/// Estimated average posterior uncertainty on a grid of subsample sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct UCurve {
    pub points: Vec<UPoint>,
    pub prior_label: String,
}

impl UCurve {
    pub fn k_min(&self) -> usize {
        self.points.first().map(|p| p.k).unwrap_or(0)
    }

    pub fn k_max(&self) -> usize {
        self.points.last().map(|p| p.k).unwrap_or(0)
    }

    pub fn point_at(&self, k: usize) -> Option<&UPoint> {
        self.points.iter().find(|p| p.k == k)
    }

    /// Builds a curve from raw (k, u_hat) pairs with zero standard errors.
    pub fn from_points(label: &str, pts: &[(usize, f64)]) -> Self {
        let mut points: Vec<UPoint> = pts
            .iter()
            .map(|&(k, u)| UPoint { k, u_hat: u, se: 0.0, n_subsamples: 0, n_degenerate: 0 })
            .collect();
        points.sort_by_key(|p| p.k);
        Self { points, prior_label: label.to_string() }
    }
}

/// Visits every subsample for size k, enumerated or sampled per the plan.
fn for_each_subsample<F: FnMut(&[usize])>(n: usize, k: usize, plan: &SubsamplePlan, mut f: F) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::InvalidSize { k, n });
    }
    let count = n_choose_k_capped(n, k, plan.threshold());
    if count <= plan.threshold() {
        // lexicographic enumeration of all k-subsets
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            f(&idx);
            // advance to the next combination
            let mut i = k;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                if idx[i] != i + n - k {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.seed, SUBSAMPLE_STREAM, k as u64));
        let mut perm: Vec<usize> = (0..n).collect();
        for _ in 0..plan.budget_b {
            // partial Fisher-Yates; reusing the permuted array keeps each
            // draw uniform over k-subsets
            for i in 0..k {
                let j = rng.gen_range(i..n);
                perm.swap(i, j);
            }
            f(&perm[..k]);
        }
        Ok(())
    }
}

/// Materializes the subsample index sets for one k.
pub fn draw_subsamples(n: usize, k: usize, plan: &SubsamplePlan) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_subsample(n, k, plan, |idx| out.push(idx.to_vec()))?;
    Ok(out)
}

fn estimate_point(
    data: &[f64],
    spec: &FamilySpec,
    theta0: &ThetaHat,
    cfg: &UncertaintyConfig,
    plan: &SubsamplePlan,
    k: usize,
) -> Result<UPoint> {
    let n = data.len();
    let mut n_degenerate = 0usize;
    let mut n_subsamples = 0usize;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut used = 0usize;
    let mut values: Vec<f64> = Vec::new();
    let keep_values = cfg.aggregator == Aggregator::Median;
    let mut family_err: Option<Error> = None;

    for_each_subsample(n, k, plan, |idx| {
        if family_err.is_some() {
            return;
        }
        n_subsamples += 1;
        let mut t_sum = 0.0;
        for &i in idx {
            t_sum += data[i];
        }
        let s = SufficientSummary::new(k, t_sum / k as f64);
        match spec.posterior_summary(&s) {
            Ok(ps) => {
                if ps.degenerate {
                    n_degenerate += 1;
                }
                let v = d_measure(&ps, theta0, cfg);
                sum += v;
                sum_sq += v * v;
                used += 1;
                if keep_values {
                    values.push(v);
                }
            }
            Err(Error::DegenerateStatistic) => {
                // non-finite formula value: flagged and excluded from the average
                n_degenerate += 1;
            }
            Err(e) => family_err = Some(e),
        }
    })?;

    if let Some(e) = family_err {
        return Err(e);
    }
    if used == 0 {
        return Err(Error::AllDegenerate { k });
    }

    let mean = sum / used as f64;
    let var = (sum_sq / used as f64 - mean * mean).max(0.0);
    let u_hat = match cfg.aggregator {
        Aggregator::Mean => mean,
        Aggregator::Median => {
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            median_of_sorted(&values)
        }
    };
    let se = (var * (k as f64 / n as f64 + 1.0 / used as f64)).sqrt();
    Ok(UPoint { k, u_hat, se, n_subsamples, n_degenerate })
}

/// Estimates the uncertainty curve for one prior over the plan's k grid.
pub fn estimate_u_curve(
    data: &[f64],
    spec: &FamilySpec,
    theta0: &ThetaHat,
    cfg: &UncertaintyConfig,
    plan: &SubsamplePlan,
) -> Result<UCurve> {
    let n = data.len();
    if plan.k_grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&k_max) = plan.k_grid.iter().max() {
        if k_max > n {
            return Err(Error::InvalidSize { k: k_max, n });
        }
    }
    let min_k = spec.min_k();
    if let Some(&k) = plan.k_grid.iter().find(|&&k| k < min_k) {
        return Err(Error::InsufficientData { k, min_k });
    }

    let points: Vec<UPoint> = plan
        .k_grid
        .par_iter()
        .map(|&k| estimate_point(data, spec, theta0, cfg, plan, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(UCurve { points, prior_label: spec.label() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;
    use rand_distr::{Distribution, StandardNormal};

    fn plan(n: usize, k_min: usize, k_max: usize, budget: usize, seed: u64) -> SubsamplePlan {
        SubsamplePlan::new(n, k_min, k_max, budget, seed)
    }

    #[test]
    fn enumerates_all_pairs() {
        let p = plan(4, 1, 4, 100_000, 1);
        let sets = draw_subsamples(4, 2, &p).unwrap();
        assert_eq!(sets.len(), 6);
        let expect: Vec<Vec<usize>> =
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]];
        assert_eq!(sets, expect);
    }

    #[test]
    fn full_set_is_single_subsample() {
        let p = plan(5, 1, 5, 100_000, 1);
        let sets = draw_subsamples(5, 5, &p).unwrap();
        assert_eq!(sets, vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn sampled_path_yields_budget_many_distinct_index_subsets() {
        let p = plan(1000, 1, 10, 100_000, 7);
        let sets = draw_subsamples(1000, 10, &p).unwrap();
        assert_eq!(sets.len(), 100_000);
        for s in sets.iter().step_by(9973) {
            assert_eq!(s.len(), 10);
            let mut d = s.clone();
            d.sort_unstable();
            d.dedup();
            assert_eq!(d.len(), 10, "indices within a subset must be distinct");
            assert!(d.iter().all(|&i| i < 1000));
        }
    }

    #[test]
    fn invalid_sizes_error() {
        let p = plan(4, 1, 4, 10, 1);
        assert!(matches!(draw_subsamples(4, 0, &p), Err(Error::InvalidSize { .. })));
        assert!(matches!(draw_subsamples(4, 5, &p), Err(Error::InvalidSize { .. })));
    }

    #[test]
    fn curve_is_deterministic_for_fixed_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<f64> = (0..200).map(|_| 1.0 + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)).collect();
        let spec = FamilySpec::NormalBaseline { sigma_sq: 1.0 };
        let theta0 = crate::uncertainty::estimate_theta0(&spec, &data).unwrap();
        let cfg = UncertaintyConfig::default();
        let p = plan(200, 1, 10, 2000, 42);
        let a = estimate_u_curve(&data, &spec, &theta0, &cfg, &p).unwrap();
        let b = estimate_u_curve(&data, &spec, &theta0, &cfg, &p).unwrap();
        assert_eq!(a, b);
    }

    /// Sampled estimates agree with exact enumeration for tiny n.
    #[test]
    fn sampled_matches_enumerated_within_one_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data: Vec<f64> = (0..12).map(|_| 1.0 + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)).collect();
        let spec = FamilySpec::NormalBaseline { sigma_sq: 1.0 };
        let theta0 = crate::uncertainty::estimate_theta0(&spec, &data).unwrap();
        let cfg = UncertaintyConfig::default();

        let exact_plan = plan(12, 2, 6, 1_000_000, 5);
        let exact = estimate_u_curve(&data, &spec, &theta0, &cfg, &exact_plan).unwrap();

        let mut sampled_plan = plan(12, 2, 6, 200_000, 5);
        sampled_plan.enumerate_threshold = Some(0); // force the sampling path
        let sampled = estimate_u_curve(&data, &spec, &theta0, &cfg, &sampled_plan).unwrap();

        for (e, s) in exact.points.iter().zip(&sampled.points) {
            assert_eq!(e.k, s.k);
            let rel = ((e.u_hat - s.u_hat) / e.u_hat).abs();
            assert!(rel < 0.01, "k={} rel={}", e.k, rel);
        }
    }

    /// Baseline curve decreases monotonically up to Monte Carlo noise.
    #[test]
    fn baseline_curve_nearly_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let data: Vec<f64> = (0..500).map(|_| 1.0 + <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)).collect();
        let spec = FamilySpec::NormalBaseline { sigma_sq: 1.0 };
        let theta0 = crate::uncertainty::estimate_theta0(&spec, &data).unwrap();
        let cfg = UncertaintyConfig::default();
        let p = plan(500, 1, 23, 20_000, 4);
        let c = estimate_u_curve(&data, &spec, &theta0, &cfg, &p).unwrap();
        for w in c.points.windows(2) {
            let allowed = 3.0 * (w[0].se + w[1].se);
            assert!(
                w[1].u_hat <= w[0].u_hat + allowed,
                "increase at k={} exceeds noise yardstick",
                w[1].k
            );
        }
    }

    #[test]
    fn full_data_subsample_collapses_to_plugin_value() {
        let data: Vec<f64> = (0..30).map(|i| (i as f64) / 10.0 + 0.1).collect();
        let spec = FamilySpec::NormalBaseline { sigma_sq: 1.0 };
        let theta0 = crate::uncertainty::estimate_theta0(&spec, &data).unwrap();
        let cfg = UncertaintyConfig::default();
        let p = plan(30, 30, 30, 10, 1);
        let c = estimate_u_curve(&data, &spec, &theta0, &cfg, &p).unwrap();
        // single subsample: the average is the full-data D value, variance only
        let expect = 1.0 / 30.0;
        assert!((c.points[0].u_hat - expect).abs() < 1e-12);
        assert_eq!(c.points[0].n_subsamples, 1);
    }
}
