//! Closed-form and asymptotic oracles for the matching diagnostic.
//!
//! These are the exact expressions the Monte Carlo pipeline is tested
//! against: the limiting relative prior size R_r(Delta^2), the
//! super-information factor A_r, the leading expansion constants of the
//! two uncertainty curves, and the normal-family closed forms.

use crate::error::{Error, Result};
use crate::matching::{Curve, SolveOutcome};

/// Parameters of the asymptotic regime: r = k/(k+m) the likelihood share,
/// Delta^2 the squared standardized prior-truth distance, and c the
/// variance-share constant (1/2 for all six built-in families).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    pub r: f64,
    pub delta_sq: f64,
    pub c: f64,
    pub m: f64,
    pub k: f64,
}

impl AsymptoticParams {
    pub fn from_mk(m: f64, k: f64, c: f64, delta_sq: f64) -> Self {
        Self { r: k / (k + m), delta_sq, c, m, k }
    }
}

/// Limiting relative prior size R_r(Delta^2) = 1/(r[1 + c(1-r)(Delta^2-1)]) - 1.
///
/// Strictly decreasing in Delta^2; tends to -1 as Delta^2 grows; equals
/// m/k at Delta^2 = 1.
pub fn asymptotic_r(p: &AsymptoticParams) -> Result<f64> {
    if !(p.r > 0.0 && p.r < 1.0) {
        return Err(Error::DomainError { value: p.r });
    }
    let bracket = 1.0 + p.c * (1.0 - p.r) * (p.delta_sq - 1.0);
    let denom = p.r * bracket;
    if denom <= 0.0 {
        return Err(Error::SingularDenominator);
    }
    Ok(1.0 / denom - 1.0)
}

/// Super-information factor A_r = 1 + c/(1 - (1-r)c); with c = 1/2 this is
/// 1 + 1/(1+r), always between 3/2 and 2.
pub fn super_info_factor(r: f64, c: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::DomainError { value: r });
    }
    if !(c > 0.0 && c < 1.0) || (1.0 - r) * c >= 1.0 {
        return Err(Error::DomainError { value: c });
    }
    Ok(1.0 + c / (1.0 - (1.0 - r) * c))
}

/// Leading constants of the two uncertainty-curve expansions:
/// U(k) ~ alpha/k and U_b(k) ~ beta/k. beta is alpha evaluated at r = 1.
pub fn expansion_constants(
    p: &AsymptoticParams,
    u_prime: f64,
    v_val: f64,
    sigma_t_sq: f64,
) -> (f64, f64) {
    let w = u_prime * u_prime * sigma_t_sq;
    let alpha = p.r * (v_val + w * (p.r + (1.0 - p.r) * p.delta_sq));
    let beta = v_val + w;
    (alpha, beta)
}

/// Exact normal-family prior data size M(k) from the limiting curves.
pub fn normal_exact_m(k: f64, gamma: f64, delta_sq: f64) -> Result<f64> {
    if k <= 0.0 || gamma < 0.0 || delta_sq < 0.0 {
        return Err(Error::DomainError { value: k });
    }
    let a = 1.0 / (gamma + k);
    let denom = a + gamma * delta_sq * a * a + k * a * a;
    if denom <= 0.0 {
        return Err(Error::SingularDenominator);
    }
    Ok(2.0 / denom - k)
}

/// Limiting uncertainty pair for the normal family at one k:
/// (sigma^2[A + gamma Delta^2 A^2 + k A^2], 2 sigma^2 / k) with A = 1/(gamma+k).
pub fn normal_analytic_u(k: f64, gamma: f64, delta_sq: f64, sigma_sq: f64) -> (f64, f64) {
    let a = 1.0 / (gamma + k);
    let u_prior = sigma_sq * (a + gamma * delta_sq * a * a + k * a * a);
    let u_base = 2.0 * sigma_sq / k;
    (u_prior, u_base)
}

/// Closed-form normal uncertainty curve over a continuous k axis.
///
/// Strictly decreasing, so it can be inverted by bisection; with gamma = 0
/// it is the baseline curve 2 sigma^2 / k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalAnalyticCurve {
    pub gamma: f64,
    pub delta_sq: f64,
    pub sigma_sq: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl NormalAnalyticCurve {
    pub fn new(gamma: f64, delta_sq: f64, sigma_sq: f64) -> Self {
        Self { gamma, delta_sq, sigma_sq, x_min: 1e-9, x_max: 1e12 }
    }

    pub fn baseline(sigma_sq: f64) -> Self {
        Self::new(0.0, 0.0, sigma_sq)
    }

    fn value(&self, x: f64) -> f64 {
        normal_analytic_u(x, self.gamma, self.delta_sq, self.sigma_sq).0
    }
}

impl Curve for NormalAnalyticCurve {
    fn x_min(&self) -> f64 {
        self.x_min
    }

    fn x_max(&self) -> f64 {
        self.x_max
    }

    fn eval(&self, x: f64) -> Result<f64> {
        if x < self.x_min {
            return Err(Error::OutOfRangeBelow { x, min: self.x_min });
        }
        if x > self.x_max {
            return Err(Error::OutOfRangeAbove { x, max: self.x_max });
        }
        Ok(self.value(x))
    }

    fn solve_smallest(&self, target: f64) -> SolveOutcome {
        let lo_val = self.value(self.x_min);
        let hi_val = self.value(self.x_max);
        if target > lo_val {
            return SolveOutcome::BelowRange;
        }
        if target < hi_val {
            return SolveOutcome::AboveRange;
        }
        let (mut lo, mut hi) = (self.x_min, self.x_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.value(mid) >= target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi.abs().max(1.0) {
                break;
            }
        }
        SolveOutcome::Root(0.5 * (lo + hi))
    }
}
