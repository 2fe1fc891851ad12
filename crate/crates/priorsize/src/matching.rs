//! Posterior matching: solve for the prior data size M(k), derive R(k) and
//! the limiting slope, verify structural identities, and classify conflict.

use crate::error::{Error, Result};
use crate::resample::UCurve;

/// Anything that behaves as an uncertainty curve over a real information axis.
///
/// Tabulated Monte Carlo curves evaluate by piecewise-linear interpolation
/// and invert by exact segment scan; analytic closed-form curves evaluate
/// exactly and invert by monotone bisection.
pub trait Curve {
    fn x_min(&self) -> f64;
    fn x_max(&self) -> f64;
    fn eval(&self, x: f64) -> Result<f64>;
    /// Smallest x in the domain with eval(x) == target.
    fn solve_smallest(&self, target: f64) -> SolveOutcome;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveOutcome {
    Root(f64),
    /// Target exceeds every curve value: a solution would lie below x_min.
    BelowRange,
    /// Target lies under every curve value: a solution would lie above x_max.
    AboveRange,
}

impl Curve for UCurve {
    fn x_min(&self) -> f64 {
        self.k_min() as f64
    }

    fn x_max(&self) -> f64 {
        self.k_max() as f64
    }

    fn eval(&self, x: f64) -> Result<f64> {
        interpolate(self, x)
    }

    fn solve_smallest(&self, target: f64) -> SolveOutcome {
        let pts = &self.points;
        if pts.is_empty() {
            return SolveOutcome::AboveRange;
        }
        for w in pts.windows(2) {
            let (u0, u1) = (w[0].u_hat, w[1].u_hat);
            let within = (target - u0) * (target - u1) <= 0.0;
            if within {
                let x0 = w[0].k as f64;
                let x1 = w[1].k as f64;
                if u0 == u1 {
                    return SolveOutcome::Root(x0);
                }
                let t = (target - u0) / (u1 - u0);
                return SolveOutcome::Root(x0 + t * (x1 - x0));
            }
        }
        if pts.len() == 1 {
            if pts[0].u_hat == target {
                return SolveOutcome::Root(pts[0].k as f64);
            }
            return if target > pts[0].u_hat { SolveOutcome::BelowRange } else { SolveOutcome::AboveRange };
        }
        let max = pts.iter().map(|p| p.u_hat).fold(f64::NEG_INFINITY, f64::max);
        if target > max {
            SolveOutcome::BelowRange
        } else {
            SolveOutcome::AboveRange
        }
    }
}

/// Piecewise-linear interpolation through the curve points; exact at nodes.
pub fn interpolate(curve: &UCurve, x: f64) -> Result<f64> {
    let pts = &curve.points;
    if pts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let min = pts[0].k as f64;
    let max = pts[pts.len() - 1].k as f64;
    if x < min {
        return Err(Error::OutOfRangeBelow { x, min });
    }
    if x > max {
        return Err(Error::OutOfRangeAbove { x, max });
    }
    let i = pts.partition_point(|p| (p.k as f64) <= x);
    if i == 0 {
        return Ok(pts[0].u_hat);
    }
    if i == pts.len() {
        return Ok(pts[pts.len() - 1].u_hat);
    }
    let (p0, p1) = (&pts[i - 1], &pts[i]);
    let x0 = p0.k as f64;
    let x1 = p1.k as f64;
    let t = (x - x0) / (x1 - x0);
    Ok(p0.u_hat + t * (p1.u_hat - p0.u_hat))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchOutcome {
    Solved(f64),
    /// The prior curve lies below the baseline's reach at this k.
    NonExistence,
    /// The prior curve lies above the baseline's start; M is clamped to its
    /// hard lower bound k_min - k.
    ExtremeConflict { clamped: f64 },
}

/// Solves the baseline curve at level u_prior(k), returning M(k) = x - k.
pub fn solve_m<P: Curve + ?Sized, B: Curve + ?Sized>(u_prior: &P, u_base: &B, k: f64) -> Result<MatchOutcome> {
    let target = u_prior.eval(k)?;
    Ok(match u_base.solve_smallest(target) {
        SolveOutcome::Root(x) => MatchOutcome::Solved(x - k),
        SolveOutcome::AboveRange => MatchOutcome::NonExistence,
        SolveOutcome::BelowRange => MatchOutcome::ExtremeConflict { clamped: u_base.x_min() - k },
    })
}

/// M between two curves as an error (used by the structural identities):
/// solves invert(at + m) == source(at).
fn match_info<A: Curve + ?Sized, B: Curve + ?Sized>(invert: &A, source: &B, at: f64) -> Result<f64> {
    let target = source.eval(at)?;
    match invert.solve_smallest(target) {
        SolveOutcome::Root(x) => Ok(x - at),
        _ => Err(Error::NonExistence { k: at.round() as usize }),
    }
}

/// Residual of M12(k) = -M21(k + M12(k)); zero up to interpolation error.
pub fn check_transpose_identity<A: Curve + ?Sized, B: Curve + ?Sized>(
    u1: &A,
    u2: &B,
    k: f64,
) -> Result<f64> {
    let m12 = match_info(u1, u2, k)?;
    let m21 = match_info(u2, u1, k + m12)?;
    Ok((m12 + m21).abs())
}

/// Residual of M13(k) = M12(k + M23(k)) + M23(k).
pub fn check_additivity_identity<A, B, C>(u1: &A, u2: &B, u3: &C, k: f64) -> Result<f64>
where
    A: Curve + ?Sized,
    B: Curve + ?Sized,
    C: Curve + ?Sized,
{
    let m23 = match_info(u2, u3, k)?;
    let m13 = match_info(u1, u3, k)?;
    let m12_shifted = match_info(u1, u2, k + m23)?;
    Ok((m13 - m12_shifted - m23).abs())
}

/// Ordinary least-squares slope of M(k) against k for k >= k0.
pub fn slope_regression(m_hat: &[(usize, f64)], k0: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> =
        m_hat.iter().filter(|(k, _)| *k >= k0).map(|&(k, m)| (k as f64, m)).collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints { have: pts.len(), need: 3 });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NoDetectableConflict,
    MildConflict,
    SeriousConflict,
    SuperInformative,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::NoDetectableConflict => "NoDetectableConflict",
            Verdict::MildConflict => "MildConflict",
            Verdict::SeriousConflict => "SeriousConflict",
            Verdict::SuperInformative => "SuperInformative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    NonExistence { k: usize },
    ExtremeConflict { k: usize },
    PriorDominates,
    NonMonotoneU { k: usize },
    CrossedCurves { k: usize },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::NonExistence { k } => write!(f, "NonExistence(k={k})"),
            Warning::ExtremeConflict { k } => write!(f, "ExtremeConflict(k={k})"),
            Warning::PriorDominates => write!(f, "PriorDominates"),
            Warning::NonMonotoneU { k } => write!(f, "NonMonotoneU(k={k})"),
            Warning::CrossedCurves { k } => write!(f, "CrossedCurves(k={k})"),
        }
    }
}

/// Heuristic verdict thresholds. Calibrated against the published table of
/// slopes, not derived from theory; overridable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// |slope| below this counts as flat.
    pub tau_flat: f64,
    /// Slope below this, with all R positive, marks super-information.
    pub tau_super: f64,
    /// Slope at or below this marks serious conflict.
    pub tau_serious: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { tau_flat: 0.05, tau_super: -0.01, tau_serious: -0.25 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    pub m_hat: Vec<(usize, f64)>,
    pub r_hat: Vec<(usize, f64)>,
    pub slope: Option<f64>,
    pub k0: usize,
    pub warnings: Vec<Warning>,
    pub verdict: Verdict,
}

/// Classification from slope and curves; see `Thresholds` for the cutoffs.
pub fn classify(
    slope: Option<f64>,
    m_hat: &[(usize, f64)],
    r_hat: &[(usize, f64)],
    k0: usize,
    th: &Thresholds,
) -> Verdict {
    let r_tail: Vec<f64> = r_hat.iter().filter(|(k, _)| *k >= k0).map(|&(_, r)| r).collect();
    let any_r_below_half = r_tail.iter().any(|&r| r <= -0.5);
    let all_r_positive = !r_tail.is_empty() && r_tail.iter().all(|&r| r > 0.0);
    let all_m_nonneg = m_hat.iter().all(|&(_, m)| m >= 0.0);
    match slope {
        Some(s) => {
            if s <= th.tau_serious || any_r_below_half {
                Verdict::SeriousConflict
            } else if s < th.tau_super && all_r_positive {
                Verdict::SuperInformative
            } else if s.abs() <= th.tau_flat && all_m_nonneg {
                Verdict::NoDetectableConflict
            } else {
                Verdict::MildConflict
            }
        }
        // slope unavailable: fall back to the level-based rules alone
        None => {
            if any_r_below_half {
                Verdict::SeriousConflict
            } else if all_m_nonneg {
                Verdict::NoDetectableConflict
            } else {
                Verdict::MildConflict
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnoseOptions {
    /// Lower cutoff for the slope regression; defaults to max(5, ceil(K/3)).
    pub k0: Option<usize>,
    pub thresholds: Thresholds,
    /// Whether the baseline curve was extended all the way to n; persistent
    /// non-existence then upgrades to PriorDominates.
    pub baseline_reaches_n: bool,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self { k0: None, thresholds: Thresholds::default(), baseline_reaches_n: false }
    }
}

pub fn default_k0(k_max: usize) -> usize {
    5usize.max((k_max + 2) / 3)
}

/// Runs the matching stage over a pair of estimated curves.
pub fn diagnose(u_prior: &UCurve, u_base: &UCurve, opts: &DiagnoseOptions) -> DiagnosticReport {
    let k_max = u_prior.k_max();
    let k0 = opts.k0.unwrap_or_else(|| default_k0(k_max));
    let mut warnings = Vec::new();

    // step 4(b): both curves should decrease monotonically
    for curve in [u_prior, u_base] {
        for w in curve.points.windows(2) {
            let allowed = 3.0 * (w[0].se + w[1].se);
            if w[1].u_hat > w[0].u_hat + allowed {
                warnings.push(Warning::NonMonotoneU { k: w[1].k });
            }
        }
    }

    // step 4(a): the informative prior's curve should be the lower one
    for p in &u_prior.points {
        if p.k >= k0 {
            if let Some(b) = u_base.point_at(p.k) {
                if p.u_hat > b.u_hat {
                    warnings.push(Warning::CrossedCurves { k: p.k });
                }
            }
        }
    }

    let mut m_hat = Vec::new();
    let mut any_nonexistence = false;
    for p in &u_prior.points {
        match solve_m(u_prior, u_base, p.k as f64) {
            Ok(MatchOutcome::Solved(m)) => m_hat.push((p.k, m)),
            Ok(MatchOutcome::NonExistence) => {
                any_nonexistence = true;
                warnings.push(Warning::NonExistence { k: p.k });
            }
            Ok(MatchOutcome::ExtremeConflict { clamped }) => {
                warnings.push(Warning::ExtremeConflict { k: p.k });
                m_hat.push((p.k, clamped));
            }
            Err(_) => {}
        }
    }
    if any_nonexistence && opts.baseline_reaches_n {
        warnings.push(Warning::PriorDominates);
    }

    let r_hat: Vec<(usize, f64)> = m_hat.iter().map(|&(k, m)| (k, m / k as f64)).collect();
    let slope = slope_regression(&m_hat, k0).ok();
    let verdict = classify(slope, &m_hat, &r_hat, k0, &opts.thresholds);
    DiagnosticReport { m_hat, r_hat, slope, k0, warnings, verdict }
}
