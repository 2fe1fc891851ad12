//! Config parsing, data ingestion, and the file-producing command bodies.

use std::fs;
use std::path::{Path, PathBuf};

use crate::asymptotics::{asymptotic_r, expansion_constants, normal_exact_m, super_info_factor, AsymptoticParams};
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::matching::{Verdict, Warning};
use crate::pipeline::{run, PipelineConfig, PipelineOutput};
use crate::plot::{line_plot, Series, COLORS};
use crate::simstudy::{
    exp_mean_scenarios, exp_rate_scenarios, normal_scenarios, run_ensemble, run_scenario,
    summarize_runs, Scenario, ScenarioRun,
};
use crate::uncertainty::{Aggregator, Measure, UncertaintyConfig};

/// A diagnose run described by a key=value config file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_path: PathBuf,
    pub spec: FamilySpec,
    pub cfg: UncertaintyConfig,
    pub k_max: Option<usize>,
    pub k_base_max: Option<usize>,
    pub k0: Option<usize>,
    pub budget: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub svg: bool,
}

fn fmt_val(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| Error::InvalidConfig { msg: format!("{key}: bad number {v:?}") })
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::InvalidConfig { msg: format!("{key}: bad integer {v:?}") })
}

/// Parses a config file of `key = value` lines with `#` comments.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    let mut data = None;
    let mut family = None;
    let (mut mu_pi, mut var_pi, mut sigma_sq) = (None, None, None);
    let (mut alpha, mut beta, mut baseline_alpha) = (None, None, 0.0);
    let mut measure = Measure::Mse;
    let mut aggregator = Aggregator::Mean;
    let (mut k_max, mut k_base_max, mut k0) = (None, None, None);
    let mut budget = 100_000usize;
    let mut seed = 0u64;
    let mut out_dir = PathBuf::from(".");
    let mut svg = false;

    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, content: raw.to_string() })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "data" => data = Some(PathBuf::from(value)),
            "family" => family = Some(value.to_string()),
            "mu_pi" => mu_pi = Some(parse_f64(key, value)?),
            "var_pi" => var_pi = Some(parse_f64(key, value)?),
            "sigma_sq" => sigma_sq = Some(parse_f64(key, value)?),
            "alpha" => alpha = Some(parse_f64(key, value)?),
            "beta" => beta = Some(parse_f64(key, value)?),
            "baseline_alpha" => baseline_alpha = parse_f64(key, value)?,
            "measure" => {
                measure = match value {
                    "mse" => Measure::Mse,
                    "variance" => Measure::VarianceOnly,
                    "bias" => Measure::BiasOnly,
                    _ => {
                        return Err(Error::InvalidConfig {
                            msg: format!("measure must be mse, variance or bias, got {value:?}"),
                        })
                    }
                }
            }
            "aggregator" => {
                aggregator = match value {
                    "mean" => Aggregator::Mean,
                    "median" => Aggregator::Median,
                    _ => {
                        return Err(Error::InvalidConfig {
                            msg: format!("aggregator must be mean or median, got {value:?}"),
                        })
                    }
                }
            }
            "k_max" => k_max = Some(parse_usize(key, value)?),
            "k_base_max" => k_base_max = Some(parse_usize(key, value)?),
            "k0" => k0 = Some(parse_usize(key, value)?),
            "budget" => budget = parse_usize(key, value)?,
            "seed" => {
                seed = value
                    .parse()
                    .map_err(|_| Error::InvalidConfig { msg: format!("seed: bad integer {value:?}") })?
            }
            "out" => out_dir = PathBuf::from(value),
            "svg" => {
                svg = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => {
                        return Err(Error::InvalidConfig {
                            msg: format!("svg must be a boolean, got {value:?}"),
                        })
                    }
                }
            }
            other => return Err(Error::UnknownKey { key: other.to_string() }),
        }
    }

    let data_path =
        data.ok_or_else(|| Error::InvalidConfig { msg: "missing key: data".into() })?;
    let family =
        family.ok_or_else(|| Error::InvalidConfig { msg: "missing key: family".into() })?;
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::InvalidConfig { msg: format!("{family} needs {name}") })
    };
    let spec = match family.as_str() {
        "normal" => FamilySpec::NormalKnownVar {
            mu_pi: need(mu_pi, "mu_pi")?,
            var_pi: need(var_pi, "var_pi")?,
            sigma_sq: need(sigma_sq, "sigma_sq")?,
        },
        "exp-rate" => FamilySpec::ExponentialRateGamma {
            alpha: need(alpha, "alpha")?,
            beta: need(beta, "beta")?,
        },
        "exp-mean" => FamilySpec::ExponentialMeanInvGamma {
            alpha: need(alpha, "alpha")?,
            beta: need(beta, "beta")?,
            baseline_alpha,
        },
        "bernoulli" => {
            FamilySpec::BernoulliBeta { alpha: need(alpha, "alpha")?, beta: need(beta, "beta")? }
        }
        "poisson" => {
            FamilySpec::PoissonGamma { alpha: need(alpha, "alpha")?, beta: need(beta, "beta")? }
        }
        "geometric" => {
            FamilySpec::GeometricBeta { alpha: need(alpha, "alpha")?, beta: need(beta, "beta")? }
        }
        other => {
            return Err(Error::InvalidConfig { msg: format!("unknown family {other:?}") })
        }
    };
    spec.validate()?;
    Ok(RunConfig {
        data_path,
        spec,
        cfg: UncertaintyConfig { measure, aggregator },
        k_max,
        k_base_max,
        k0,
        budget,
        seed,
        out_dir,
        svg,
    })
}

/// Reads newline-separated observations; `#` starts a comment. Every value
/// must lie in the family's support.
pub fn ingest_observations(path: &Path, spec: &FamilySpec) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line
            .parse()
            .map_err(|_| Error::Parse { line: i + 1, content: raw.to_string() })?;
        if !spec.in_support(x) {
            return Err(Error::SupportViolation { line: i + 1, value: x });
        }
        out.push(x);
    }
    if out.is_empty() {
        return Err(Error::EmptyFile);
    }
    Ok(out)
}

fn u_curves_csv(out: &PipelineOutput) -> String {
    let mut s = String::from("k,u_prior,u_prior_se,u_base,u_base_se,n_degenerate\n");
    let ks: std::collections::BTreeSet<usize> = out
        .u_prior
        .points
        .iter()
        .map(|p| p.k)
        .chain(out.u_base.points.iter().map(|p| p.k))
        .collect();
    for k in ks {
        let p = out.u_prior.point_at(k);
        let b = out.u_base.point_at(k);
        let deg = p.map(|p| p.n_degenerate).unwrap_or(0)
            + b.map(|b| b.n_degenerate).unwrap_or(0);
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            k,
            p.map(|p| fmt_val(p.u_hat)).unwrap_or_default(),
            p.map(|p| fmt_val(p.se)).unwrap_or_default(),
            b.map(|b| fmt_val(b.u_hat)).unwrap_or_default(),
            b.map(|b| fmt_val(b.se)).unwrap_or_default(),
            deg
        ));
    }
    s
}

fn m_curve_csv(out: &PipelineOutput) -> String {
    let mut s = String::from("k,m_hat,r_hat\n");
    for (&(k, m), &(_, r)) in out.report.m_hat.iter().zip(&out.report.r_hat) {
        s.push_str(&format!("{},{},{}\n", k, fmt_val(m), fmt_val(r)));
    }
    s
}

fn summary_csv(out: &PipelineOutput) -> String {
    let warnings: Vec<String> = out.report.warnings.iter().map(|w| w.to_string()).collect();
    format!(
        "s_k,k0,k_max,theta0,verdict,warnings\n{},{},{},{},{},{}\n",
        out.report.slope.map(fmt_val).unwrap_or_default(),
        out.report.k0,
        out.u_prior.k_max(),
        fmt_val(out.theta0.value),
        out.report.verdict.name(),
        warnings.join(";")
    )
}

fn write_svgs(out: &PipelineOutput, dir: &Path) -> Result<()> {
    let prior_pts: Vec<(f64, f64)> =
        out.u_prior.points.iter().map(|p| (p.k as f64, p.u_hat)).collect();
    let base_pts: Vec<(f64, f64)> =
        out.u_base.points.iter().map(|p| (p.k as f64, p.u_hat)).collect();
    let u_svg = line_plot(
        "Average posterior uncertainty",
        "subsample size k",
        "U(k)",
        &[
            Series { label: out.u_prior.prior_label.clone(), points: prior_pts, color: COLORS[0] },
            Series { label: out.u_base.prior_label.clone(), points: base_pts, color: COLORS[1] },
        ],
    );
    fs::write(dir.join("u.svg"), u_svg)?;

    let m_pts: Vec<(f64, f64)> =
        out.report.m_hat.iter().map(|&(k, m)| (k as f64, m)).collect();
    let m_svg = line_plot(
        "Estimated prior data size",
        "subsample size k",
        "M(k)",
        &[Series { label: "M(k)".into(), points: m_pts, color: COLORS[2] }],
    );
    fs::write(dir.join("m.svg"), m_svg)?;

    let r_pts: Vec<(f64, f64)> =
        out.report.r_hat.iter().map(|&(k, r)| (k as f64, r)).collect();
    let r_svg = line_plot(
        "Relative prior size",
        "subsample size k",
        "R(k)",
        &[Series { label: "R(k)".into(), points: r_pts, color: COLORS[3] }],
    );
    fs::write(dir.join("r.svg"), r_svg)?;
    Ok(())
}

pub fn exit_code(out: &PipelineOutput) -> i32 {
    let dominates = out.report.warnings.iter().any(|w| matches!(w, Warning::PriorDominates));
    if out.report.verdict == Verdict::SeriousConflict || dominates {
        2
    } else {
        0
    }
}

/// Full diagnose command: read data, run the pipeline, write the outputs.
/// Returns the pipeline output and the process exit code.
pub fn run_diagnose(config: &RunConfig) -> Result<(PipelineOutput, i32)> {
    let data = ingest_observations(&config.data_path, &config.spec)?;
    let pc = PipelineConfig {
        spec: config.spec.clone(),
        cfg: config.cfg,
        k_max: config.k_max,
        k_base_max: config.k_base_max,
        budget: config.budget,
        seed: config.seed,
        diagnose: crate::matching::DiagnoseOptions {
            k0: config.k0,
            ..Default::default()
        },
    };
    let out = run(&data, &pc)?;
    fs::create_dir_all(&config.out_dir)?;
    fs::write(config.out_dir.join("u_curves.csv"), u_curves_csv(&out))?;
    fs::write(config.out_dir.join("m_curve.csv"), m_curve_csv(&out))?;
    fs::write(config.out_dir.join("summary.csv"), summary_csv(&out))?;
    if config.svg {
        write_svgs(&out, &config.out_dir)?;
    }
    let code = exit_code(&out);
    Ok((out, code))
}

/// One CSV row of closed-form reference quantities at (r, Delta^2, c).
pub fn oracle_row(r: f64, delta_sq: f64, c: f64) -> Result<String> {
    let p = AsymptoticParams { r, delta_sq, c, m: 0.0, k: 0.0 };
    let rr = asymptotic_r(&p)?;
    let a = super_info_factor(r, c)?;
    // v = 1 and sigma_T^2 = c/(1-c) realize the requested c with u' = 1
    let (alpha, beta) = expansion_constants(&p, 1.0, 1.0, c / (1.0 - c));
    // normal closed form at gamma = k(1-r)/r, scaled to k = 1
    let gamma = (1.0 - r) / r;
    let m_exact = normal_exact_m(1.0, gamma, delta_sq)?;
    Ok(format!(
        "r,delta_sq,c,r_r,a_r,alpha,beta,m_exact\n{},{},{},{},{},{},{},{}\n",
        fmt_val(r),
        fmt_val(delta_sq),
        fmt_val(c),
        fmt_val(rr),
        fmt_val(a),
        fmt_val(alpha),
        fmt_val(beta),
        fmt_val(m_exact)
    ))
}

fn scenario_set(name: &str) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    match name {
        "normal" => out.extend(normal_scenarios()),
        "exp-rate" => out.extend(exp_rate_scenarios()),
        "exp-mean" => out.extend(exp_mean_scenarios()),
        "all" => {
            out.extend(normal_scenarios());
            out.extend(exp_rate_scenarios());
            out.extend(exp_mean_scenarios());
        }
        other => {
            return Err(Error::InvalidConfig {
                msg: format!("unknown scenario set {other:?}; use normal, exp-rate, exp-mean or all"),
            })
        }
    }
    Ok(out)
}

/// Simulation command: run every scenario in the set over `n_seeds` seeds
/// and write per-run and ensemble summaries.
pub fn run_simulate(set: &str, n_seeds: u64, out_dir: &Path) -> Result<()> {
    let scenarios = scenario_set(set)?;
    let seeds: Vec<u64> = (1..=n_seeds).collect();
    let mut runs: Vec<ScenarioRun> = Vec::new();
    let mut ens = String::from("name,n_runs,mean_s_k,mean_r_at_kmax,verdict\n");
    for sc in &scenarios {
        for &s in &seeds {
            runs.push(run_scenario(sc, s)?);
        }
        let e = run_ensemble(sc, &seeds)?;
        ens.push_str(&format!(
            "{},{},{},{},{}\n",
            e.name,
            e.n_runs,
            e.mean_slope.map(fmt_val).unwrap_or_default(),
            e.mean_r_at(sc.k_max).map(fmt_val).unwrap_or_default(),
            e.verdict.name()
        ));
    }
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("runs.csv"), summarize_runs(&runs))?;
    fs::write(out_dir.join("ensembles.csv"), ens)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = fs::File::create(&p).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        p
    }

    #[test]
    fn config_parses_and_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write_file(
            dir.path(),
            "run.cfg",
            "# comment\ndata = obs.txt\nfamily = normal\nmu_pi = 1.5\nvar_pi = 0.25\nsigma_sq = 1.0\nk_max = 12\nseed = 7\n",
        );
        let cfg = parse_config(&cfg_path).unwrap();
        assert_eq!(cfg.k_max, Some(12));
        assert_eq!(cfg.seed, 7);
        assert!(matches!(cfg.spec, FamilySpec::NormalKnownVar { .. }));

        let bad = write_file(dir.path(), "bad.cfg", "data = x\nfamily = normal\nwat = 1\n");
        assert!(matches!(parse_config(&bad), Err(Error::UnknownKey { .. })));

        let nofam = write_file(dir.path(), "nofam.cfg", "data = x\n");
        assert!(matches!(parse_config(&nofam), Err(Error::InvalidConfig { .. })));
    }

    #[test]
    fn ingest_round_trip_and_violations() {
        let dir = tempfile::tempdir().unwrap();
        let spec = FamilySpec::NormalKnownVar { mu_pi: 0.0, var_pi: 1.0, sigma_sq: 1.0 };
        let good = write_file(dir.path(), "obs.txt", "1.5\n# comment\n-0.25 # trailing\n\n3\n");
        assert_eq!(ingest_observations(&good, &spec).unwrap(), vec![1.5, -0.25, 3.0]);

        let bad = write_file(dir.path(), "bad.txt", "1.0\nnope\n");
        assert!(matches!(ingest_observations(&bad, &spec), Err(Error::Parse { line: 2, .. })));

        let neg = write_file(dir.path(), "neg.txt", "1.0\n-2.0\n");
        let exp = FamilySpec::ExponentialRateGamma { alpha: 1.0, beta: 1.0 };
        assert!(matches!(
            ingest_observations(&neg, &exp),
            Err(Error::SupportViolation { line: 2, .. })
        ));

        let empty = write_file(dir.path(), "empty.txt", "# nothing\n");
        assert!(matches!(ingest_observations(&empty, &spec), Err(Error::EmptyFile)));
    }

    #[test]
    fn oracle_row_contains_expected_values() {
        let row = oracle_row(20.0 / 24.0, 1.0, 0.5).unwrap();
        let lines: Vec<&str> = row.lines().collect();
        assert_eq!(lines[0], "r,delta_sq,c,r_r,a_r,alpha,beta,m_exact");
        let vals: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert!((vals[3] - 0.2).abs() < 1e-12); // r_r
        assert!((vals[4] - 17.0 / 11.0).abs() < 1e-12); // a_r
        assert!((vals[7] - 0.2).abs() < 1e-12); // m_exact at k = 1
    }

    #[test]
    fn diagnose_writes_outputs_and_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let data: String =
            (0..150).map(|i| format!("{}\n", 1.0 + ((i * 37) % 100) as f64 / 100.0 - 0.5)).collect();
        let data_path = write_file(dir.path(), "obs.txt", &data);
        let out1 = dir.path().join("out1");
        let out2 = dir.path().join("out2");
        let mk = |out: &Path| RunConfig {
            data_path: data_path.clone(),
            spec: FamilySpec::NormalKnownVar { mu_pi: 1.0, var_pi: 0.25, sigma_sq: 1.0 },
            cfg: UncertaintyConfig::default(),
            k_max: Some(8),
            k_base_max: None,
            k0: Some(3),
            budget: 1000,
            seed: 11,
            out_dir: out.to_path_buf(),
            svg: true,
        };
        let (o1, code1) = run_diagnose(&mk(&out1)).unwrap();
        let (_o2, code2) = run_diagnose(&mk(&out2)).unwrap();
        assert_eq!(code1, code2);
        for f in ["u_curves.csv", "m_curve.csv", "summary.csv", "u.svg", "m.svg", "r.svg"] {
            let a = fs::read(out1.join(f)).unwrap();
            let b = fs::read(out2.join(f)).unwrap();
            assert_eq!(a, b, "mismatch in {f}");
            assert!(!a.is_empty());
        }
        assert!(!o1.report.m_hat.is_empty());
    }
}
