//! Empirical readouts: log-log power-law fitting of decay series and
//! discrete mixed-norm Strichartz quotients for the free evolution.

use crate::dispersion::{free_solution, ModelParams};
use crate::grid::{weighted_x1_norm, Grid};
use crate::profiles::AnalyticProfile;
use crate::{Error, Result};

/// Least-squares line on (log t, log v): `v ≈ e^intercept · t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

impl DecayFit {
    /// Fits with r² below 0.95 are reported but should not gate decisions.
    pub fn is_reliable(&self) -> bool {
        self.r_squared >= 0.95
    }
}

/// Fit `v(t) = C t^γ` by least squares in log-log coordinates. Needs at
/// least 4 strictly positive values at strictly increasing times.
pub fn fit_power_law(series: &[(f64, f64)]) -> Result<DecayFit> {
    if series.len() < 4 {
        return Err(Error::FitError(format!(
            "need >= 4 points for a stable fit, got {}",
            series.len()
        )));
    }
    for window in series.windows(2) {
        if window[1].0 <= window[0].0 {
            return Err(Error::FitError("times must be strictly increasing".into()));
        }
    }
    let mut logs = Vec::with_capacity(series.len());
    for &(t, v) in series {
        if !(t > 0.0) || !(v > 0.0) {
            return Err(Error::FitError(format!("nonpositive sample (t={t}, v={v})")));
        }
        logs.push((t.ln(), v.ln()));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let my = logs.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = logs.iter().map(|&(_, y)| (y - my) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).min(1.0)
    };
    let fit = DecayFit {
        exponent,
        intercept,
        r_squared,
        window: (series[0].0, series[series.len() - 1].0),
        n_points: series.len(),
    };
    if !fit.is_reliable() {
        log::warn!("power-law fit unreliable: r² = {r_squared:.4} over {:?}", fit.window);
    }
    Ok(fit)
}

/// Space-time exponent pair (q, r) for the dispersive estimate, with the
/// scaling relation `2/q + d/r = d/2`. `f64::INFINITY` is a valid q or r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissiblePair {
    pub q: f64,
    pub r: f64,
    pub d: usize,
}

impl AdmissiblePair {
    pub fn new(q: f64, r: f64, d: usize) -> Result<Self> {
        let fail = |reason: &str| Error::InadmissiblePair {
            q,
            r,
            d,
            reason: reason.into(),
        };
        if q < 2.0 || r < 2.0 {
            return Err(fail("q and r must be >= 2"));
        }
        let scaling = 2.0 / q + d as f64 / r - d as f64 / 2.0;
        if scaling.abs() > 1e-9 {
            return Err(fail("scaling relation 2/q + d/r = d/2 violated"));
        }
        match d {
            1 => {}
            2 => {
                if q == 2.0 {
                    return Err(fail("the pair (2, ∞) is excluded at d = 2"));
                }
            }
            3 => {
                if r > 6.0 {
                    return Err(fail("r must not exceed 2d/(d-2) = 6 at d = 3"));
                }
            }
            _ => return Err(fail("dimension must be 1, 2, or 3")),
        }
        Ok(AdmissiblePair { q, r, d })
    }

    /// Smoothing weight order `2/(qd)` on the x1 derivative.
    pub fn smoothing_order(&self) -> f64 {
        if self.q.is_infinite() {
            0.0
        } else {
            2.0 / (self.q * self.d as f64)
        }
    }
}

/// Homogeneous Strichartz quotient
/// `Q = ‖⟨∂x1⟩^{2/(qd)} W(t)ψ‖_{L^q(window; L^r)} / ‖ψ‖₂`
/// with the time integral by trapezoid over `samples >= 64` panels.
pub fn strichartz_quotient(
    pair: &AdmissiblePair,
    window: (f64, f64),
    psi: &AnalyticProfile,
    g: &Grid,
    m: &ModelParams,
    samples: usize,
) -> Result<f64> {
    if g.dim() != pair.d {
        return Err(Error::InvalidGrid(format!(
            "grid dimension {} does not match the pair's d = {}",
            g.dim(),
            pair.d
        )));
    }
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(Error::UnsupportedRange(format!("empty window [{t0}, {t1}]")));
    }
    let n = samples.max(64);
    let s = pair.smoothing_order();
    let mut space_norms = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = t0 + (t1 - t0) * k as f64 / n as f64;
        let u = free_solution(psi, t, g, m);
        space_norms.push(weighted_x1_norm(&u, s, pair.r)?);
    }
    let time_norm = if pair.q.is_infinite() {
        space_norms.iter().cloned().fold(0.0, f64::max)
    } else {
        let h = (t1 - t0) / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            acc += 0.5 * h * (space_norms[k].powf(pair.q) + space_norms[k + 1].powf(pair.q));
        }
        acc.powf(1.0 / pair.q)
    };
    let denom = g.sample_spectral(0.0, |xi| psi.eval_fourier(xi)).l2_norm();
    if denom == 0.0 {
        return Err(Error::InvalidParams("profile has zero mass".into()));
    }
    Ok(time_norm / denom)
}
