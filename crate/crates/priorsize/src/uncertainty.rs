//! Per-subsample dispersion measures and their cross-subsample aggregation.

use crate::error::{Error, Result};
use crate::families::{FamilySpec, PosteriorSummary, SufficientSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Posterior variance plus squared bias about the plug-in truth.
    Mse,
    VarianceOnly,
    BiasOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregator {
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UncertaintyConfig {
    pub measure: Measure,
    pub aggregator: Aggregator,
}

impl Default for UncertaintyConfig {
    fn default() -> Self {
        Self { measure: Measure::Mse, aggregator: Aggregator::Mean }
    }
}

/// Plug-in estimate of the true parameter: the baseline posterior mean on
/// the full dataset. Frozen once per dataset and shared by both curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaHat {
    pub value: f64,
}

pub fn estimate_theta0(baseline: &FamilySpec, full_data: &[f64]) -> Result<ThetaHat> {
    let s = SufficientSummary::from_data(full_data)?;
    let ps = baseline.posterior_summary(&s)?;
    Ok(ThetaHat { value: ps.mean })
}

pub fn d_measure(ps: &PosteriorSummary, theta0: &ThetaHat, cfg: &UncertaintyConfig) -> f64 {
    let bias = ps.mean - theta0.value;
    match cfg.measure {
        Measure::Mse => ps.variance + bias * bias,
        Measure::VarianceOnly => ps.variance,
        Measure::BiasOnly => bias * bias,
    }
}

pub fn aggregate(values: &[f64], cfg: &UncertaintyConfig) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    match cfg.aggregator {
        Aggregator::Mean => Ok(values.iter().sum::<f64>() / values.len() as f64),
        Aggregator::Median => {
            let mut sorted = values.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Ok(median_of_sorted(&sorted))
        }
    }
}

pub(crate) fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        // even count: average of the two middle order statistics
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;
    use proptest::prelude::*;

    fn ps(mean: f64, variance: f64) -> PosteriorSummary {
        PosteriorSummary { mean, variance, degenerate: false }
    }

    #[test]
    fn theta0_examples() {
        let data: Vec<f64> = vec![1.02; 1000];
        let t = estimate_theta0(&FamilySpec::NormalBaseline { sigma_sq: 1.0 }, &data).unwrap();
        assert!((t.value - 1.02).abs() < 1e-12);

        let data = vec![0.5; 100];
        let t = estimate_theta0(&FamilySpec::ExponentialRateBaseline, &data).unwrap();
        assert!((t.value - 2.0).abs() < 1e-12);

        let data = vec![3.7; 50];
        let t = estimate_theta0(&FamilySpec::PoissonBaseline, &data).unwrap();
        assert!((t.value - 3.7).abs() < 1e-12);
    }

    #[test]
    fn d_measure_examples() {
        let theta0 = ThetaHat { value: 1.0 };
        let mse = UncertaintyConfig { measure: Measure::Mse, aggregator: Aggregator::Mean };
        let var = UncertaintyConfig { measure: Measure::VarianceOnly, aggregator: Aggregator::Mean };
        let bias = UncertaintyConfig { measure: Measure::BiasOnly, aggregator: Aggregator::Mean };
        assert!((d_measure(&ps(1.6, 0.2), &theta0, &mse) - 0.56).abs() < 1e-15);
        assert_eq!(d_measure(&ps(1.0, 0.2), &theta0, &bias), 0.0);
        assert_eq!(d_measure(&ps(1.6, 0.2), &theta0, &var), 0.2);
    }

    #[test]
    fn aggregate_examples() {
        let mean = UncertaintyConfig { measure: Measure::Mse, aggregator: Aggregator::Mean };
        let med = UncertaintyConfig { measure: Measure::Mse, aggregator: Aggregator::Median };
        assert_eq!(aggregate(&[1.0, 2.0, 3.0], &mean).unwrap(), 2.0);
        assert_eq!(aggregate(&[1.0, 2.0, 100.0], &med).unwrap(), 2.0);
        assert_eq!(aggregate(&[1.0, 2.0, 3.0, 4.0], &med).unwrap(), 2.5);
        assert!(matches!(aggregate(&[], &mean), Err(Error::EmptyInput)));
    }

    proptest! {
        /// MSE decomposes exactly into variance plus squared bias.
        #[test]
        fn mse_decomposition_is_exact(mean in -1e6f64..1e6, var in 0f64..1e6, t0 in -1e6f64..1e6) {
            let theta0 = ThetaHat { value: t0 };
            let p = ps(mean, var);
            let base = UncertaintyConfig::default();
            let m = d_measure(&p, &theta0, &UncertaintyConfig { measure: Measure::Mse, ..base });
            let v = d_measure(&p, &theta0, &UncertaintyConfig { measure: Measure::VarianceOnly, ..base });
            let b = d_measure(&p, &theta0, &UncertaintyConfig { measure: Measure::BiasOnly, ..base });
            prop_assert_eq!(m, v + b);
            prop_assert!(m >= 0.0 && v >= 0.0 && b >= 0.0);
        }

        /// Both aggregators are positively homogeneous.
        #[test]
        fn aggregate_scales(values in proptest::collection::vec(0f64..1e3, 1..40), c in 0f64..100.0) {
            for agg in [Aggregator::Mean, Aggregator::Median] {
                let cfg = UncertaintyConfig { measure: Measure::Mse, aggregator: agg };
                let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
                let lhs = aggregate(&scaled, &cfg).unwrap();
                let rhs = c * aggregate(&values, &cfg).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
            }
        }

        /// Shifting both the posterior mean and theta0 leaves MSE and bias unchanged;
        /// shifting the mean alone leaves the variance measure unchanged.
        #[test]
        fn d_measure_shift_invariance(mean in -1e3f64..1e3, var in 0f64..1e3, t0 in -1e3f64..1e3, shift in -1e3f64..1e3) {
            let base = UncertaintyConfig::default();
            for measure in [Measure::Mse, Measure::BiasOnly] {
                let cfg = UncertaintyConfig { measure, ..base };
                let a = d_measure(&ps(mean, var), &ThetaHat { value: t0 }, &cfg);
                let b = d_measure(&ps(mean + shift, var), &ThetaHat { value: t0 + shift }, &cfg);
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
            let cfg = UncertaintyConfig { measure: Measure::VarianceOnly, ..base };
            let a = d_measure(&ps(mean, var), &ThetaHat { value: t0 }, &cfg);
            let b = d_measure(&ps(mean + shift, var), &ThetaHat { value: t0 }, &cfg);
            prop_assert_eq!(a, b);
        }
    }
}
