//! Conjugate likelihood-prior families with exact posterior summaries.
//!
//! Six pairs are supported: normal mean with known variance, exponential
//! rate with gamma prior, exponential mean with inverse-gamma prior,
//! Bernoulli with beta prior, Poisson with gamma prior, and geometric with
//! beta prior. For every family the sufficient statistic is `T(x) = x`, so
//! a subsample is summarized by its size and its mean alone. Each family
//! also designates a baseline prior, obtained by sending the nominal prior
//! size to zero.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    NormalKnownVar,
    ExponentialRateGamma,
    ExponentialMeanInvGamma,
    BernoulliBeta,
    PoissonGamma,
    GeometricBeta,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::NormalKnownVar => "normal",
            FamilyKind::ExponentialRateGamma => "exp-rate",
            FamilyKind::ExponentialMeanInvGamma => "exp-mean",
            FamilyKind::BernoulliBeta => "bernoulli",
            FamilyKind::PoissonGamma => "poisson",
            FamilyKind::GeometricBeta => "geometric",
        }
    }
}

/// A conjugate prior specification, or the family's baseline member.
///
/// The inverse-gamma family carries a `baseline_alpha` knob: the default
/// baseline sends both hyperparameters to zero, but `alpha_b = 2` is also
/// admissible, in which case the nominal prior size becomes `alpha - alpha_b`.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    NormalKnownVar { mu_pi: f64, var_pi: f64, sigma_sq: f64 },
    NormalBaseline { sigma_sq: f64 },
    ExponentialRateGamma { alpha: f64, beta: f64 },
    ExponentialRateBaseline,
    ExponentialMeanInvGamma { alpha: f64, beta: f64, baseline_alpha: f64 },
    ExponentialMeanBaseline { alpha_b: f64 },
    BernoulliBeta { alpha: f64, beta: f64 },
    BernoulliBaseline,
    PoissonGamma { alpha: f64, beta: f64 },
    PoissonBaseline,
    GeometricBeta { alpha: f64, beta: f64 },
    GeometricBaseline,
}

/// Subsample summary: size and mean of `T(X_i) = X_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientSummary {
    pub k: usize,
    pub t_bar: f64,
}

impl SufficientSummary {
    pub fn new(k: usize, t_bar: f64) -> Self {
        Self { k, t_bar }
    }

    pub fn from_data(data: &[f64]) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyInput);
        }
        let sum: f64 = data.iter().sum();
        Ok(Self { k: data.len(), t_bar: sum / data.len() as f64 })
    }
}

/// Exact conjugate posterior mean and variance.
///
/// `degenerate` marks boundary subsamples (zero posterior variance, e.g.
/// all-equal Bernoulli data under the baseline); their values are still
/// finite and are included in curve averages, but counted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub variance: f64,
    pub degenerate: bool,
}

fn invgamma_min_k(alpha: f64) -> usize {
    // posterior variance needs alpha + k > 2
    let need = 2.0 - alpha;
    if need < 1.0 {
        1
    } else {
        need.floor() as usize + 1
    }
}

impl FamilySpec {
    pub fn kind(&self) -> FamilyKind {
        use FamilySpec::*;
        match self {
            NormalKnownVar { .. } | NormalBaseline { .. } => FamilyKind::NormalKnownVar,
            ExponentialRateGamma { .. } | ExponentialRateBaseline => FamilyKind::ExponentialRateGamma,
            ExponentialMeanInvGamma { .. } | ExponentialMeanBaseline { .. } => {
                FamilyKind::ExponentialMeanInvGamma
            }
            BernoulliBeta { .. } | BernoulliBaseline => FamilyKind::BernoulliBeta,
            PoissonGamma { .. } | PoissonBaseline => FamilyKind::PoissonGamma,
            GeometricBeta { .. } | GeometricBaseline => FamilyKind::GeometricBeta,
        }
    }

    pub fn is_baseline(&self) -> bool {
        use FamilySpec::*;
        matches!(
            self,
            NormalBaseline { .. }
                | ExponentialRateBaseline
                | ExponentialMeanBaseline { .. }
                | BernoulliBaseline
                | PoissonBaseline
                | GeometricBaseline
        )
    }

    /// The family's designated baseline member.
    pub fn baseline(&self) -> FamilySpec {
        use FamilySpec::*;
        match self {
            NormalKnownVar { sigma_sq, .. } | NormalBaseline { sigma_sq } => {
                NormalBaseline { sigma_sq: *sigma_sq }
            }
            ExponentialRateGamma { .. } | ExponentialRateBaseline => ExponentialRateBaseline,
            ExponentialMeanInvGamma { baseline_alpha, .. } => {
                ExponentialMeanBaseline { alpha_b: *baseline_alpha }
            }
            ExponentialMeanBaseline { alpha_b } => ExponentialMeanBaseline { alpha_b: *alpha_b },
            BernoulliBeta { .. } | BernoulliBaseline => BernoulliBaseline,
            PoissonGamma { .. } | PoissonBaseline => PoissonBaseline,
            GeometricBeta { .. } | GeometricBaseline => GeometricBaseline,
        }
    }

    /// Checks hyperparameter positivity constraints.
    pub fn validate(&self) -> Result<()> {
        use FamilySpec::*;
        let ok = match self {
            NormalKnownVar { var_pi, sigma_sq, mu_pi } => {
                *var_pi > 0.0 && *sigma_sq > 0.0 && mu_pi.is_finite()
            }
            NormalBaseline { sigma_sq } => *sigma_sq > 0.0,
            ExponentialRateGamma { alpha, beta }
            | BernoulliBeta { alpha, beta }
            | PoissonGamma { alpha, beta }
            | GeometricBeta { alpha, beta } => *alpha > 0.0 && *beta > 0.0,
            ExponentialMeanInvGamma { alpha, beta, baseline_alpha } => {
                *alpha > 0.0 && *beta > 0.0 && *baseline_alpha >= 0.0 && alpha > baseline_alpha
            }
            ExponentialMeanBaseline { alpha_b } => *alpha_b >= 0.0,
            ExponentialRateBaseline | BernoulliBaseline | PoissonBaseline | GeometricBaseline => {
                true
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig { msg: format!("invalid hyperparameters for {:?}", self) })
        }
    }

    /// Smallest subsample size for which the posterior variance exists.
    pub fn min_k(&self) -> usize {
        use FamilySpec::*;
        match self {
            ExponentialMeanInvGamma { alpha, .. } => invgamma_min_k(*alpha),
            ExponentialMeanBaseline { alpha_b } => invgamma_min_k(*alpha_b),
            _ => 1,
        }
    }

    /// Nominal prior data size `m` implied by the hyperparameters.
    pub fn nominal_prior_size(&self) -> f64 {
        use FamilySpec::*;
        match self {
            NormalKnownVar { var_pi, sigma_sq, .. } => sigma_sq / var_pi,
            ExponentialRateGamma { alpha, .. } => *alpha,
            ExponentialMeanInvGamma { alpha, baseline_alpha, .. } => alpha - baseline_alpha,
            BernoulliBeta { alpha, beta } => alpha + beta,
            PoissonGamma { beta, .. } => *beta,
            GeometricBeta { alpha, .. } => *alpha,
            NormalBaseline { .. }
            | ExponentialRateBaseline
            | ExponentialMeanBaseline { .. }
            | BernoulliBaseline
            | PoissonBaseline
            | GeometricBaseline => 0.0,
        }
    }

    /// Prior centrality `mu_m`, the prior's location on the scale of `T`.
    pub fn prior_centrality(&self) -> Result<f64> {
        use FamilySpec::*;
        match self {
            NormalKnownVar { mu_pi, .. } => Ok(*mu_pi),
            ExponentialRateGamma { alpha, beta } => Ok(beta / alpha),
            ExponentialMeanInvGamma { alpha, beta, .. } => Ok(beta / alpha),
            BernoulliBeta { alpha, beta } => Ok(alpha / (alpha + beta)),
            PoissonGamma { alpha, beta } => Ok(alpha / beta),
            GeometricBeta { alpha, beta } => Ok((alpha + beta) / alpha),
            _ => Err(Error::BaselineHasNoCentrality),
        }
    }

    /// Exact conjugate posterior mean and variance for a subsample summary.
    pub fn posterior_summary(&self, s: &SufficientSummary) -> Result<PosteriorSummary> {
        use FamilySpec::*;
        let min_k = self.min_k();
        if s.k < min_k {
            return Err(Error::InsufficientData { k: s.k, min_k });
        }
        let k = s.k as f64;
        let t = s.t_bar;
        let (mean, variance) = match self {
            NormalKnownVar { mu_pi, var_pi, sigma_sq } => {
                let gamma = sigma_sq / var_pi;
                let shrink = 1.0 / (gamma + k);
                ((gamma * mu_pi + k * t) * shrink, sigma_sq * shrink)
            }
            NormalBaseline { sigma_sq } => (t, sigma_sq / k),
            ExponentialRateGamma { alpha, beta } => gamma_rate_post(*alpha, *beta, k, t),
            ExponentialRateBaseline => gamma_rate_post(0.0, 0.0, k, t),
            ExponentialMeanInvGamma { alpha, beta, .. } => invgamma_post(*alpha, *beta, k, t),
            ExponentialMeanBaseline { alpha_b } => invgamma_post(*alpha_b, 0.0, k, t),
            BernoulliBeta { alpha, beta } => beta_bernoulli_post(*alpha, *beta, k, t),
            BernoulliBaseline => beta_bernoulli_post(0.0, 0.0, k, t),
            PoissonGamma { alpha, beta } => poisson_gamma_post(*alpha, *beta, k, t),
            PoissonBaseline => poisson_gamma_post(0.0, 0.0, k, t),
            GeometricBeta { alpha, beta } => beta_geometric_post(*alpha, *beta, k, t),
            GeometricBaseline => beta_geometric_post(0.0, 0.0, k, t),
        };
        if !mean.is_finite() || !variance.is_finite() || variance < 0.0 {
            return Err(Error::DegenerateStatistic);
        }
        Ok(PosteriorSummary { mean, variance, degenerate: variance == 0.0 })
    }

    /// The family's `(u, u', v)` functions evaluated at a point of `Omega_u`.
    pub fn uv_functions(&self, at: f64) -> Result<(f64, f64, f64)> {
        let t = at;
        let out_of_domain = Err(Error::DomainError { value: at });
        match self.kind() {
            FamilyKind::NormalKnownVar => {
                let sigma_sq = match self {
                    FamilySpec::NormalKnownVar { sigma_sq, .. }
                    | FamilySpec::NormalBaseline { sigma_sq } => *sigma_sq,
                    _ => unreachable!(),
                };
                Ok((t, 1.0, sigma_sq))
            }
            FamilyKind::ExponentialRateGamma => {
                if t <= 0.0 {
                    return out_of_domain;
                }
                Ok((1.0 / t, -1.0 / (t * t), 1.0 / (t * t)))
            }
            FamilyKind::ExponentialMeanInvGamma => {
                if t <= 0.0 {
                    return out_of_domain;
                }
                Ok((t, 1.0, t * t))
            }
            FamilyKind::BernoulliBeta => {
                if !(0.0..=1.0).contains(&t) {
                    return out_of_domain;
                }
                Ok((t, 1.0, t * (1.0 - t)))
            }
            FamilyKind::PoissonGamma => {
                if t < 0.0 {
                    return out_of_domain;
                }
                Ok((t, 1.0, t))
            }
            FamilyKind::GeometricBeta => {
                if t < 1.0 {
                    return out_of_domain;
                }
                Ok((1.0 / t, -1.0 / (t * t), (t - 1.0) / (t * t * t)))
            }
        }
    }

    /// Sampling variance of `T(X) = X` at mean `mu_t` under the family's model.
    pub fn sampling_variance(&self, mu_t: f64) -> f64 {
        match self.kind() {
            FamilyKind::NormalKnownVar => match self {
                FamilySpec::NormalKnownVar { sigma_sq, .. }
                | FamilySpec::NormalBaseline { sigma_sq } => *sigma_sq,
                _ => unreachable!(),
            },
            FamilyKind::ExponentialRateGamma | FamilyKind::ExponentialMeanInvGamma => mu_t * mu_t,
            FamilyKind::BernoulliBeta => mu_t * (1.0 - mu_t),
            FamilyKind::PoissonGamma => mu_t,
            FamilyKind::GeometricBeta => mu_t * (mu_t - 1.0),
        }
    }

    /// Whether an observation lies in the family's support.
    pub fn in_support(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self.kind() {
            FamilyKind::NormalKnownVar => true,
            FamilyKind::ExponentialRateGamma | FamilyKind::ExponentialMeanInvGamma => x > 0.0,
            FamilyKind::BernoulliBeta => x == 0.0 || x == 1.0,
            FamilyKind::PoissonGamma => x >= 0.0 && x.fract() == 0.0,
            FamilyKind::GeometricBeta => x >= 1.0 && x.fract() == 0.0,
        }
    }

    pub fn label(&self) -> String {
        use FamilySpec::*;
        match self {
            NormalKnownVar { mu_pi, var_pi, .. } => format!("normal({mu_pi},{var_pi})"),
            NormalBaseline { .. } => "normal-baseline".into(),
            ExponentialRateGamma { alpha, beta } => format!("exp-rate({alpha},{beta})"),
            ExponentialRateBaseline => "exp-rate-baseline".into(),
            ExponentialMeanInvGamma { alpha, beta, .. } => format!("exp-mean({alpha},{beta})"),
            ExponentialMeanBaseline { .. } => "exp-mean-baseline".into(),
            BernoulliBeta { alpha, beta } => format!("bernoulli({alpha},{beta})"),
            BernoulliBaseline => "bernoulli-baseline".into(),
            PoissonGamma { alpha, beta } => format!("poisson({alpha},{beta})"),
            PoissonBaseline => "poisson-baseline".into(),
            GeometricBeta { alpha, beta } => format!("geometric({alpha},{beta})"),
            GeometricBaseline => "geometric-baseline".into(),
        }
    }
}

fn gamma_rate_post(alpha: f64, beta: f64, k: f64, t: f64) -> (f64, f64) {
    let denom = beta + k * t;
    ((alpha + k) / denom, (alpha + k) / (denom * denom))
}

fn invgamma_post(alpha: f64, beta: f64, k: f64, t: f64) -> (f64, f64) {
    let num = beta + k * t;
    let a1 = alpha + k - 1.0;
    let a2 = alpha + k - 2.0;
    (num / a1, num * num / (a1 * a1 * a2))
}

fn beta_bernoulli_post(alpha: f64, beta: f64, k: f64, t: f64) -> (f64, f64) {
    let total = alpha + beta + k;
    let a = alpha + k * t;
    let b = beta + k - k * t;
    (a / total, a * b / (total * total * (total + 1.0)))
}

fn poisson_gamma_post(alpha: f64, beta: f64, k: f64, t: f64) -> (f64, f64) {
    let denom = beta + k;
    let a = alpha + k * t;
    (a / denom, a / (denom * denom))
}

fn beta_geometric_post(alpha: f64, beta: f64, k: f64, t: f64) -> (f64, f64) {
    let denom = alpha + beta + k * t;
    let a = alpha + k;
    let b = beta + k * t - k;
    (a / denom, a * b / (denom * denom * (denom + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn normal_posterior_matches_shrinkage_formula() {
        let spec = FamilySpec::NormalKnownVar { mu_pi: 0.0, var_pi: 1.0, sigma_sq: 1.0 };
        let ps = spec.posterior_summary(&SufficientSummary::new(4, 2.0)).unwrap();
        assert!((ps.mean - 1.6).abs() < 1e-15);
        assert!((ps.variance - 0.2).abs() < 1e-15);
    }

    #[test]
    fn normal_baseline_is_flat_prior_limit() {
        let spec = FamilySpec::NormalBaseline { sigma_sq: 1.0 };
        let ps = spec.posterior_summary(&SufficientSummary::new(10, 3.25)).unwrap();
        assert_eq!(ps.mean, 3.25);
        assert!((ps.variance - 0.1).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_baseline_variance() {
        let spec = FamilySpec::BernoulliBaseline;
        let ps = spec.posterior_summary(&SufficientSummary::new(5, 0.4)).unwrap();
        assert!((ps.mean - 0.4).abs() < 1e-15);
        assert!((ps.variance - 0.04).abs() < 1e-15);
        assert!(!ps.degenerate);
    }

    #[test]
    fn bernoulli_boundary_flagged_degenerate() {
        let spec = FamilySpec::BernoulliBaseline;
        let ps = spec.posterior_summary(&SufficientSummary::new(5, 1.0)).unwrap();
        assert_eq!(ps.variance, 0.0);
        assert!(ps.degenerate);
        let ps0 = spec.posterior_summary(&SufficientSummary::new(5, 0.0)).unwrap();
        assert!(ps0.degenerate);
    }

    #[test]
    fn exp_rate_baseline_zero_mean_is_degenerate_error() {
        let spec = FamilySpec::ExponentialRateBaseline;
        let err = spec.posterior_summary(&SufficientSummary::new(5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateStatistic));
    }

    #[test]
    fn invgamma_baseline_needs_three_observations() {
        let spec = FamilySpec::ExponentialMeanBaseline { alpha_b: 0.0 };
        assert_eq!(spec.min_k(), 3);
        let err = spec.posterior_summary(&SufficientSummary::new(2, 0.5)).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { .. }));
        // alternative baseline alpha_b = 2 works from k = 1
        let alt = FamilySpec::ExponentialMeanBaseline { alpha_b: 2.0 };
        assert_eq!(alt.min_k(), 1);
        alt.posterior_summary(&SufficientSummary::new(1, 0.5)).unwrap();
    }

    #[test]
    fn nominal_prior_sizes() {
        let normal = FamilySpec::NormalKnownVar { mu_pi: 0.0, var_pi: 0.25, sigma_sq: 1.0 };
        assert_eq!(normal.nominal_prior_size(), 4.0);
        let gam = FamilySpec::ExponentialRateGamma { alpha: 20.0, beta: 10.0 };
        assert_eq!(gam.nominal_prior_size(), 20.0);
        let bern = FamilySpec::BernoulliBeta { alpha: 2.0, beta: 3.0 };
        assert_eq!(bern.nominal_prior_size(), 5.0);
        let pois = FamilySpec::PoissonGamma { alpha: 3.0, beta: 7.0 };
        assert_eq!(pois.nominal_prior_size(), 7.0);
        for b in [
            normal.baseline(),
            gam.baseline(),
            bern.baseline(),
            pois.baseline(),
            FamilySpec::GeometricBaseline,
            FamilySpec::ExponentialMeanBaseline { alpha_b: 0.0 },
        ] {
            assert_eq!(b.nominal_prior_size(), 0.0);
            assert!(b.is_baseline());
        }
    }

    #[test]
    fn prior_centralities() {
        let ig = FamilySpec::ExponentialMeanInvGamma { alpha: 0.1, beta: 0.5, baseline_alpha: 0.0 };
        assert!((ig.prior_centrality().unwrap() - 5.0).abs() < 1e-15);
        let n = FamilySpec::NormalKnownVar { mu_pi: 1.5, var_pi: 1.0, sigma_sq: 1.0 };
        assert_eq!(n.prior_centrality().unwrap(), 1.5);
        let g = FamilySpec::GeometricBeta { alpha: 2.0, beta: 2.0 };
        assert_eq!(g.prior_centrality().unwrap(), 2.0);
        assert!(matches!(
            FamilySpec::PoissonBaseline.prior_centrality(),
            Err(Error::BaselineHasNoCentrality)
        ));
    }

    #[test]
    fn uv_function_values() {
        let (u, up, v) = FamilySpec::ExponentialRateBaseline.uv_functions(0.5).unwrap();
        assert_eq!((u, up, v), (2.0, -4.0, 4.0));
        let (u, up, v) = FamilySpec::BernoulliBaseline.uv_functions(0.5).unwrap();
        assert_eq!((u, up, v), (0.5, 1.0, 0.25));
        let (_, _, v) = FamilySpec::GeometricBaseline.uv_functions(1.0).unwrap();
        assert_eq!(v, 0.0);
        assert!(matches!(
            FamilySpec::ExponentialRateBaseline.uv_functions(0.0),
            Err(Error::DomainError { .. })
        ));
    }

    /// Shrinking the nominal prior size toward zero converges to the baseline.
    #[test]
    fn baseline_is_small_m_limit() {
        let k = 7;
        let cases: Vec<(f64, fn(f64) -> FamilySpec)> = vec![
            (1.3, |m| FamilySpec::NormalKnownVar { mu_pi: 0.4, var_pi: 1.0 / m, sigma_sq: 1.0 }),
            (0.8, |m| FamilySpec::ExponentialRateGamma { alpha: m, beta: 0.6 * m }),
            (0.8, |m| FamilySpec::ExponentialMeanInvGamma {
                alpha: m,
                beta: 0.6 * m,
                baseline_alpha: 0.0,
            }),
            (0.4, |m| FamilySpec::BernoulliBeta { alpha: 0.3 * m, beta: 0.7 * m }),
            (2.5, |m| FamilySpec::PoissonGamma { alpha: 2.0 * m, beta: m }),
            (3.0, |m| FamilySpec::GeometricBeta { alpha: m, beta: 1.5 * m }),
        ];
        for (t_bar, make) in cases {
            let base = make(1.0).baseline();
            let s = SufficientSummary::new(k, t_bar);
            let target = base.posterior_summary(&s).unwrap();
            let mut prev_err = f64::INFINITY;
            for m in [1e-1, 1e-3, 1e-6] {
                let ps = make(m).posterior_summary(&s).unwrap();
                let err = ((ps.mean - target.mean) / target.mean.abs().max(1.0)).abs()
                    + ((ps.variance - target.variance) / target.variance.abs().max(1e-12)).abs();
                assert!(err <= prev_err + 1e-12, "not converging for {:?}", make(m));
                prev_err = err;
            }
            let ps = make(1e-6).posterior_summary(&s).unwrap();
            assert!(close(ps.mean, target.mean, 1e-4));
            assert!(close(ps.variance, target.variance, 1e-4));
        }
    }

    /// Posterior variance decreases strictly in k for fixed t_bar.
    #[test]
    fn posterior_variance_decreasing_in_k() {
        let specs = vec![
            FamilySpec::NormalKnownVar { mu_pi: 1.0, var_pi: 0.25, sigma_sq: 1.0 },
            FamilySpec::ExponentialRateGamma { alpha: 2.0, beta: 1.0 },
            FamilySpec::ExponentialMeanInvGamma { alpha: 3.0, beta: 1.5, baseline_alpha: 0.0 },
            FamilySpec::BernoulliBeta { alpha: 1.0, beta: 1.0 },
            FamilySpec::PoissonGamma { alpha: 2.0, beta: 2.0 },
            FamilySpec::GeometricBeta { alpha: 2.0, beta: 2.0 },
        ];
        for spec in specs {
            let t_bar = match spec.kind() {
                FamilyKind::BernoulliBeta => 0.4,
                FamilyKind::GeometricBeta => 2.5,
                _ => 0.7,
            };
            let mut prev = f64::INFINITY;
            for k in spec.min_k()..spec.min_k() + 30 {
                let v = spec.posterior_summary(&SufficientSummary::new(k, t_bar)).unwrap().variance;
                assert!(v < prev, "variance not decreasing for {:?} at k={k}", spec);
                prev = v;
            }
        }
    }

    /// The identity [u'(mu_T)]^2 sigma_T^2 = v(mu_T) behind c = 1/2.
    #[test]
    fn c_constant_identity_on_grids() {
        let grids: Vec<(FamilySpec, Vec<f64>)> = vec![
            (
                FamilySpec::NormalBaseline { sigma_sq: 2.3 },
                vec![-2.0, 0.0, 1.0, 5.0],
            ),
            (FamilySpec::ExponentialRateBaseline, vec![0.1, 0.5, 1.0, 4.0]),
            (
                FamilySpec::ExponentialMeanBaseline { alpha_b: 0.0 },
                vec![0.1, 0.5, 1.0, 4.0],
            ),
            (FamilySpec::BernoulliBaseline, vec![0.05, 0.3, 0.5, 0.9]),
            (FamilySpec::PoissonBaseline, vec![0.2, 1.0, 3.7, 10.0]),
            (FamilySpec::GeometricBaseline, vec![1.1, 1.5, 2.0, 8.0]),
        ];
        for (spec, grid) in grids {
            for mu_t in grid {
                let (_, up, v) = spec.uv_functions(mu_t).unwrap();
                let st2 = spec.sampling_variance(mu_t);
                assert!(
                    (up * up * st2 - v).abs() <= 1e-12 * v.abs().max(1.0),
                    "c identity fails for {:?} at {mu_t}",
                    spec
                );
            }
        }
    }
}
