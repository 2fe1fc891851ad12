//! Simulation harness: named data-generating scenarios, single runs,
//! variance/bias decomposition runs, and multi-seed ensembles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilySpec};
use crate::matching::{classify, DiagnoseOptions, DiagnosticReport, Verdict};
use crate::pipeline::{run, PipelineConfig, PipelineOutput};
use crate::resample::UCurve;
use crate::uncertainty::{Measure, ThetaHat, UncertaintyConfig};

const DATA_STREAM: u64 = 0x4441_5441_4745_4e31; // data-generation stream tag

/// One data-generating setup: a family, a true parameter, and run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub spec: FamilySpec,
    /// True parameter on the family's natural scale: the mean for the normal
    /// and exponential-mean families, the rate for the exponential-rate one.
    pub true_param: f64,
    pub n: usize,
    pub k_max: usize,
    pub k_base_max: Option<usize>,
    pub budget: usize,
    pub cfg: UncertaintyConfig,
    pub k0: usize,
}

/// Draws a dataset for the scenario from a stream derived from `seed`, kept
/// separate from the subsampling streams.
pub fn generate_data(sc: &Scenario, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(crate::resample::derive_seed(seed, DATA_STREAM, 0));
    match sc.spec.kind() {
        FamilyKind::NormalKnownVar => {
            let sigma_sq = match &sc.spec {
                FamilySpec::NormalKnownVar { sigma_sq, .. }
                | FamilySpec::NormalBaseline { sigma_sq } => *sigma_sq,
                _ => unreachable!(),
            };
            let sd = sigma_sq.sqrt();
            Ok((0..sc.n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    sc.true_param + sd * z
                })
                .collect())
        }
        FamilyKind::ExponentialRateGamma => {
            if sc.true_param <= 0.0 {
                return Err(Error::DomainError { value: sc.true_param });
            }
            let rate = sc.true_param;
            Ok((0..sc.n).map(|_| -(1.0 - rng.gen::<f64>()).ln() / rate).collect())
        }
        FamilyKind::ExponentialMeanInvGamma => {
            if sc.true_param <= 0.0 {
                return Err(Error::DomainError { value: sc.true_param });
            }
            let mean = sc.true_param;
            Ok((0..sc.n).map(|_| -mean * (1.0 - rng.gen::<f64>()).ln()).collect())
        }
        other => Err(Error::InvalidConfig {
            msg: format!("no data generator for family {}", other.name()),
        }),
    }
}

fn fnv1a(data: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for x in data {
        for b in x.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub name: String,
    pub seed: u64,
    pub theta0: ThetaHat,
    pub u_prior: UCurve,
    pub u_base: UCurve,
    pub report: DiagnosticReport,
    pub data_digest: u64,
}

fn pipeline_config(sc: &Scenario, seed: u64, measure: Measure) -> PipelineConfig {
    PipelineConfig {
        spec: sc.spec.clone(),
        cfg: UncertaintyConfig { measure, ..sc.cfg },
        k_max: Some(sc.k_max),
        k_base_max: sc.k_base_max,
        budget: sc.budget,
        seed,
        diagnose: DiagnoseOptions { k0: Some(sc.k0), ..Default::default() },
    }
}

pub fn run_scenario(sc: &Scenario, seed: u64) -> Result<ScenarioRun> {
    let data = generate_data(sc, seed)?;
    let out = run(&data, &pipeline_config(sc, seed, sc.cfg.measure))?;
    Ok(ScenarioRun {
        name: sc.name.clone(),
        seed,
        theta0: out.theta0,
        u_prior: out.u_prior,
        u_base: out.u_base,
        report: out.report,
        data_digest: fnv1a(&data),
    })
}

/// The same scenario run under all three dispersion measures on one dataset
/// and one subsampling stream, for studying where the signal comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionRun {
    pub mse: PipelineOutput,
    pub variance_only: PipelineOutput,
    pub bias_only: PipelineOutput,
}

pub fn run_decomposition_study(sc: &Scenario, seed: u64) -> Result<DecompositionRun> {
    let data = generate_data(sc, seed)?;
    Ok(DecompositionRun {
        mse: run(&data, &pipeline_config(sc, seed, Measure::Mse))?,
        variance_only: run(&data, &pipeline_config(sc, seed, Measure::VarianceOnly))?,
        bias_only: run(&data, &pipeline_config(sc, seed, Measure::BiasOnly))?,
    })
}

/// Averages of a scenario's outputs over an ensemble of seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub name: String,
    pub n_runs: usize,
    /// Mean slope over runs where the regression was available.
    pub mean_slope: Option<f64>,
    /// Per-k ensemble means of the estimated prior data size.
    pub mean_m_hat: Vec<(usize, f64)>,
    pub mean_r_hat: Vec<(usize, f64)>,
    /// Verdict of the classification applied to the ensemble means.
    pub verdict: Verdict,
    pub k0: usize,
}

impl EnsembleSummary {
    pub fn mean_m_at(&self, k: usize) -> Option<f64> {
        self.mean_m_hat.iter().find(|(kk, _)| *kk == k).map(|&(_, m)| m)
    }

    pub fn mean_r_at(&self, k: usize) -> Option<f64> {
        self.mean_r_hat.iter().find(|(kk, _)| *kk == k).map(|&(_, r)| r)
    }

    /// Mean of mean_m_hat over k in [k_lo, k_hi].
    pub fn mean_m_over(&self, k_lo: usize, k_hi: usize) -> Option<f64> {
        let vals: Vec<f64> = self
            .mean_m_hat
            .iter()
            .filter(|(k, _)| (k_lo..=k_hi).contains(k))
            .map(|&(_, m)| m)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }
}

pub fn run_ensemble(sc: &Scenario, seeds: &[u64]) -> Result<EnsembleSummary> {
    if seeds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut slope_sum = 0.0;
    let mut slope_n = 0usize;
    let mut m_sums: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for &seed in seeds {
        let run = run_scenario(sc, seed)?;
        if let Some(s) = run.report.slope {
            slope_sum += s;
            slope_n += 1;
        }
        for &(k, m) in &run.report.m_hat {
            let e = m_sums.entry(k).or_insert((0.0, 0));
            e.0 += m;
            e.1 += 1;
        }
    }
    let mean_m_hat: Vec<(usize, f64)> =
        m_sums.iter().map(|(&k, &(s, c))| (k, s / c as f64)).collect();
    let mean_r_hat: Vec<(usize, f64)> =
        mean_m_hat.iter().map(|&(k, m)| (k, m / k as f64)).collect();
    let mean_slope = if slope_n > 0 { Some(slope_sum / slope_n as f64) } else { None };
    let verdict = classify(mean_slope, &mean_m_hat, &mean_r_hat, sc.k0, &Default::default());
    Ok(EnsembleSummary {
        name: sc.name.clone(),
        n_runs: seeds.len(),
        mean_slope,
        mean_m_hat,
        mean_r_hat,
        verdict,
        k0: sc.k0,
    })
}

fn study_scenario(name: String, spec: FamilySpec, true_param: f64) -> Scenario {
    Scenario {
        name,
        spec,
        true_param,
        n: 1000,
        k_max: 20,
        k_base_max: None,
        budget: 100_000,
        cfg: UncertaintyConfig::default(),
        k0: 6,
    }
}

/// Normal-mean scenarios: tight prior at increasing distance from the truth.
pub fn normal_scenarios() -> Vec<Scenario> {
    [1.0, 1.5, 2.0, 3.0]
        .into_iter()
        .map(|mu_pi| {
            study_scenario(
                format!("normal-mu{mu_pi}"),
                FamilySpec::NormalKnownVar { mu_pi, var_pi: 0.25, sigma_sq: 1.0 },
                1.0,
            )
        })
        .collect()
}

/// Exponential-rate scenarios with gamma priors of varying size and conflict.
pub fn exp_rate_scenarios() -> Vec<Scenario> {
    [(20.0, 10.0), (5.0, 5.0), (0.1, 0.5), (45.0, 15.0)]
        .into_iter()
        .map(|(alpha, beta)| {
            study_scenario(
                format!("exp-rate-a{alpha}-b{beta}"),
                FamilySpec::ExponentialRateGamma { alpha, beta },
                2.0,
            )
        })
        .collect()
}

/// Exponential-mean scenarios with inverse-gamma priors.
pub fn exp_mean_scenarios() -> Vec<Scenario> {
    [(20.0, 10.0), (5.0, 5.0), (0.1, 0.5), (45.0, 15.0)]
        .into_iter()
        .map(|(alpha, beta)| {
            study_scenario(
                format!("exp-mean-a{alpha}-b{beta}"),
                FamilySpec::ExponentialMeanInvGamma { alpha, beta, baseline_alpha: 0.0 },
                0.5,
            )
        })
        .collect()
}

/// One CSV row per run: name, seed, slope, last r, verdict, warning count.
pub fn summarize_runs(runs: &[ScenarioRun]) -> String {
    let mut out = String::from("name,seed,s_k,k0,r_at_kmax,verdict,n_warnings\n");
    for r in runs {
        let slope = r.report.slope.map(|s| format!("{s:.16e}")).unwrap_or_default();
        let r_last = r
            .report
            .r_hat
            .last()
            .map(|&(_, v)| format!("{v:.16e}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.name,
            r.seed,
            slope,
            r.report.k0,
            r_last,
            r.report.verdict.name(),
            r.report.warnings.len()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(sc: &mut Scenario) {
        sc.n = 120;
        sc.k_max = 8;
        sc.budget = 1200;
        sc.k0 = 3;
    }

    #[test]
    fn generated_data_is_reproducible_and_in_support() {
        for sc in [&normal_scenarios()[0], &exp_rate_scenarios()[0], &exp_mean_scenarios()[0]] {
            let a = generate_data(sc, 17).unwrap();
            let b = generate_data(sc, 17).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), sc.n);
            assert!(a.iter().all(|&x| sc.spec.in_support(x)));
            let c = generate_data(sc, 18).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn scenario_run_is_reproducible() {
        let mut sc = normal_scenarios()[0].clone();
        small(&mut sc);
        let a = run_scenario(&sc, 5).unwrap();
        let b = run_scenario(&sc, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.data_digest, b.data_digest);
    }

    #[test]
    fn decomposition_curves_add_up() {
        let mut sc = normal_scenarios()[1].clone();
        small(&mut sc);
        let d = run_decomposition_study(&sc, 7).unwrap();
        for ((m, v), b) in d
            .mse
            .u_prior
            .points
            .iter()
            .zip(&d.variance_only.u_prior.points)
            .zip(&d.bias_only.u_prior.points)
        {
            let sum = v.u_hat + b.u_hat;
            assert!(
                (m.u_hat - sum).abs() <= 1e-12 * m.u_hat.abs().max(1.0),
                "k={}: {} vs {}",
                m.k,
                m.u_hat,
                sum
            );
        }
    }

    #[test]
    fn ensemble_summary_averages_runs() {
        let mut sc = normal_scenarios()[0].clone();
        small(&mut sc);
        let e = run_ensemble(&sc, &[1, 2, 3]).unwrap();
        assert_eq!(e.n_runs, 3);
        assert!(e.mean_slope.is_some());
        assert_eq!(e.mean_m_hat.len(), e.mean_r_hat.len());
        assert!(run_ensemble(&sc, &[]).is_err());
    }

    #[test]
    fn summarize_handles_empty_and_filled() {
        assert_eq!(summarize_runs(&[]).lines().count(), 1);
        let mut sc = normal_scenarios()[0].clone();
        small(&mut sc);
        let r = run_scenario(&sc, 4).unwrap();
        let csv = summarize_runs(&[r]);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.lines().nth(1).unwrap().starts_with("normal-mu1,4,"));
    }
}
