//! Large-time asymptotics of the free and modified dynamics: the stationary
//! point of the quartic phase, the logarithmic-type phase correction `S₊`,
//! the closed-form leading term, and the remainder diagnostics comparing the
//! leading term with the exact free evolution.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::{free_solution, ModelParams};
use crate::grid::{weighted_x1_norm, Field, Grid, SpectralField};
use crate::profiles::AnalyticProfile;
use crate::{Error, Result};

/// The real solution of `μ³ + μ = x1/t`, together with the transverse ray
/// coordinates `x⊥/t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPoint {
    pub mu1: f64,
    pub mu_perp: Vec<f64>,
    /// `|μ1³ + μ1 - x1/t|` after the Newton polish.
    pub residual: f64,
}

impl StationaryPoint {
    pub fn mu(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(1 + self.mu_perp.len());
        v.push(self.mu1);
        v.extend_from_slice(&self.mu_perp);
        v
    }

    pub fn mu_norm_sqr(&self) -> f64 {
        self.mu1 * self.mu1 + self.mu_perp.iter().map(|v| v * v).sum::<f64>()
    }
}

/// Solve `μ³ + μ = r` by the Cardano closed form with signed real cube
/// roots, then polish with Newton steps. The cubic is strictly increasing,
/// so the real root is unique.
fn solve_depressed_cubic(r: f64) -> f64 {
    let disc = (r * r + 4.0 / 27.0).sqrt();
    let mut mu = (0.5 * (r + disc)).cbrt() + (0.5 * (r - disc)).cbrt();
    // Two Newton steps remove the cancellation error of the two nearly
    // opposite cube roots (small |r|) and the large-|r| rounding.
    for _ in 0..2 {
        let f = mu * mu * mu + mu - r;
        let df = 3.0 * mu * mu + 1.0;
        mu -= f / df;
    }
    mu
}

/// Stationary point of the phase `tξ1⁴/4 + t|ξ|²/2 - x·ξ` in the ray
/// variable: `μ1` solves `μ³ + μ = x1/t`, `μ⊥ = x⊥/t`.
pub fn stationary_point(t: f64, x: &[f64]) -> Result<StationaryPoint> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let r = x[0] / t;
    let mu1 = solve_depressed_cubic(r);
    let residual = (mu1 * mu1 * mu1 + mu1 - r).abs();
    Ok(StationaryPoint {
        mu1,
        mu_perp: x[1..].iter().map(|v| v / t).collect(),
        residual,
    })
}

/// Product of the two Cardano cube-rooted terms; equals -1/3 identically.
/// Exposed for cross-checking the closed form.
pub fn cardano_product(r: f64) -> f64 {
    let disc = (r * r + 4.0 / 27.0).sqrt();
    (0.5 * (r + disc)).cbrt() * (0.5 * (r - disc)).cbrt()
}

/// Phase correction
/// `S₊(t,ξ) = -λ/(1-(p-1)d/2) · |ψ̂₊(ξ)|^{p-1}/(3ξ1²+1)^{(p-1)/2} · t^{1-(p-1)d/2}`.
///
/// Undefined at the critical power p = 1 + 2/d, where the prefactor blows
/// up.
pub fn phase_correction(t: f64, xi: &[f64], m: &ModelParams, psi: &AnalyticProfile) -> Result<f64> {
    if m.lambda == 0.0 {
        return Ok(0.0);
    }
    let d = xi.len();
    let sigma = (m.p - 1.0) * d as f64 / 2.0;
    if (sigma - 1.0).abs() < 1e-14 {
        return Err(Error::CriticalExponent { p: m.p, d });
    }
    let amp = psi.eval_fourier(xi).norm();
    if amp == 0.0 {
        return Ok(0.0);
    }
    let xi1 = xi[0];
    Ok(-m.lambda / (1.0 - sigma) * amp.powf(m.p - 1.0)
        / (3.0 * xi1 * xi1 + 1.0).powf((m.p - 1.0) / 2.0)
        * t.powf(1.0 - sigma))
}

fn leading_value(
    t: f64,
    x: &[f64],
    m: &ModelParams,
    psi: &AnalyticProfile,
    with_correction: bool,
) -> Complex64 {
    let d = x.len() as f64;
    let sp = stationary_point(t, x).expect("t > 0 checked by caller");
    let mu = sp.mu();
    let mu1 = sp.mu1;
    let amp = t.powf(-d / 2.0) / (3.0 * mu1 * mu1 + 1.0).sqrt();
    let mut phase = 0.75 * t * mu1.powi(4) + 0.5 * t * sp.mu_norm_sqr() - d * PI / 4.0;
    if with_correction {
        phase += phase_correction(t, &mu, m, psi).expect("power checked by caller");
    }
    amp * psi.eval_fourier(&mu) * Complex64::new(0.0, phase).exp()
}

/// Closed-form leading term of the large-time expansion, sampled on `g`.
/// With `with_correction` the extra real phase `S₊(t, μ)` is included,
/// giving the modified profile; the modulus is identical either way.
pub fn leading_term(
    t: f64,
    g: &Grid,
    psi: &AnalyticProfile,
    m: &ModelParams,
    with_correction: bool,
) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let sigma = (m.p - 1.0) * g.dim() as f64 / 2.0;
    if with_correction && m.lambda != 0.0 && (sigma - 1.0).abs() < 1e-14 {
        return Err(Error::CriticalExponent { p: m.p, d: g.dim() });
    }
    Ok(g.sample(t, |x| leading_value(t, x, m, psi, with_correction)))
}

/// For each t: `R(t) = W(t)ψ - leading_term(t)` and its weighted norm
/// `‖⟨∂x1⟩^{1-2/r} R(t)‖_{L^r}`. Returns (t, norm) pairs.
pub fn remainder_norms(
    t_list: &[f64],
    g: &Grid,
    psi: &AnalyticProfile,
    r: f64,
    m: &ModelParams,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if t < 2.0 {
            return Err(Error::UnsupportedRange(format!(
                "remainder expansion holds for t >= 2, got {t}"
            )));
        }
        let free = free_solution(psi, t, g, m);
        let lead = leading_term(t, g, psi, m, false)?;
        let rem = free.sub(&lead);
        out.push((t, weighted_x1_norm(&rem, 1.0 - 2.0 / r, r)?));
    }
    Ok(out)
}

/// Modified spectral data `w(t,ξ) = ψ̂₊(ξ) e^{iS₊(t,ξ)}` sampled on the
/// frequency lattice of `g`.
pub fn modified_spectral_data(
    t: f64,
    g: &Grid,
    psi: &AnalyticProfile,
    m: &ModelParams,
) -> Result<SpectralField> {
    let sigma = (m.p - 1.0) * g.dim() as f64 / 2.0;
    if m.lambda != 0.0 && (sigma - 1.0).abs() < 1e-14 {
        return Err(Error::CriticalExponent { p: m.p, d: g.dim() });
    }
    Ok(g.sample_spectral(t, |xi| {
        let s = phase_correction(t, xi, m, psi).expect("power checked above");
        psi.eval_fourier(xi) * Complex64::new(0.0, s).exp()
    }))
}

/// Sobolev norm of order `s` of a lattice function of ξ: the frequency
/// lattice is reinterpreted as a position grid (same spacing π/L) and
/// `‖⟨∇⟩^s ·‖_{L²}` is computed there.
pub fn spectral_sobolev_norm(w: &SpectralField, s: f64) -> f64 {
    let g = &w.grid;
    let d = g.dim();
    let dual_half: Vec<f64> = (0..d)
        .map(|a| g.freq_spacing(a) * g.n_points(a) as f64 / 2.0)
        .collect();
    let shape: Vec<usize> = g.shape().to_vec();
    let dual = Grid::new(&dual_half, &shape).expect("dual grid of a valid grid is valid");
    // dual-grid index j along an axis holds frequency index k = j - N/2,
    // stored by the FFT at k mod N
    let mut values = vec![Complex64::new(0.0, 0.0); w.coeffs.len()];
    for (flat, v) in values.iter_mut().enumerate() {
        let idx = dual.unravel(flat);
        let mut src = 0usize;
        for (a, &j) in idx.iter().enumerate() {
            let n = g.n_points(a);
            let k = (j + n / 2) % n;
            src = src * n + k;
        }
        *v = w.coeffs[src];
    }
    let f = Field::new(dual, w.time, values).expect("matching lengths");
    let weighted = crate::grid::apply_multiplier(&f, |eta| {
        let e2: f64 = eta.iter().map(|v| v * v).sum();
        (1.0 + e2).powf(s / 2.0)
    });
    weighted.l2_norm()
}

/// `‖ψ̂₊ e^{iS₊(t,·)}‖_{H^s}` (in the frequency variable) for each t.
/// The t-uniform boundedness of this series is the quantitative content of
/// the profile regularity estimate; the (s, p) window it holds in is
/// enforced here.
pub fn profile_sobolev_track(
    t_list: &[f64],
    s: f64,
    g: &Grid,
    psi: &AnalyticProfile,
    m: &ModelParams,
) -> Result<Vec<(f64, f64)>> {
    let d = g.dim();
    if s != 0.0 {
        let ok = match d {
            2 => 1.0 < s && s < m.p && m.p < 3.0,
            3 => 2.0 <= s && s < m.p && m.p < 3.0,
            _ => false,
        };
        if !ok {
            return Err(Error::UnsupportedRange(format!(
                "profile regularity needs d in {{2,3}} with 1 < s < p < 3 (d=2) or \
                 2 <= s < p < 3 (d=3); got d={d}, s={s}, p={}",
                m.p
            )));
        }
    }
    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if t < 1.0 {
            return Err(Error::UnsupportedRange(format!(
                "profile track needs t >= 1, got {t}"
            )));
        }
        let w = modified_spectral_data(t, g, psi, m)?;
        out.push((t, spectral_sobolev_norm(&w, s)));
    }
    Ok(out)
}
