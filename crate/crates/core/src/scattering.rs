//! Final-state problem: construct the solution that converges to the
//! modified profile as t → ∞, by (a) Picard iteration on the truncated
//! backward Duhamel equation and (b) direct backward integration with the
//! split-step solver, and measure the scattering defect against the free
//! evolution of the prescribed datum.

use num_complex::Complex64;

use crate::asymptotics::{leading_term, modified_spectral_data};
use crate::dispersion::{free_solution, ModelParams};
use crate::grid::{forward_dft, inverse_dft, Field, Grid};
use crate::metrics::{fit_power_law, DecayFit};
use crate::profiles::AnalyticProfile;
use crate::solver::{solve, SolveConfig};
use crate::{Error, Result};

/// Truncation and iteration parameters of the final-state construction.
/// `t_grid` is the decreasing evaluation grid in [T_start, T_max]; it also
/// serves as the τ-quadrature grid of the backward Duhamel integral.
#[derive(Debug, Clone)]
pub struct FinalStateConfig {
    pub t_max: f64,
    pub t_grid: Vec<f64>,
    /// Weight exponent α of the distance sup_t t^α‖·‖₂, in (0, 1/2).
    pub alpha_weight: f64,
    pub max_iter: usize,
    pub contraction_tol: f64,
    /// Step size for the backward split-step construction.
    pub solver_dt: f64,
}

impl FinalStateConfig {
    /// Uniform decreasing grid of `n` points from `t_max` down to `t_start`.
    pub fn uniform(t_start: f64, t_max: f64, n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams("need at least 2 grid times".into()));
        }
        let t_grid = (0..n)
            .map(|k| t_max - (t_max - t_start) * k as f64 / (n - 1) as f64)
            .collect();
        let cfg = FinalStateConfig {
            t_max,
            t_grid,
            alpha_weight: alpha,
            max_iter: 8,
            contraction_tol: 1e-12,
            solver_dt: 0.05,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn t_start(&self) -> f64 {
        *self.t_grid.last().expect("validated nonempty")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.t_grid.len() < 2 {
            return fail("t_grid needs at least 2 times".into());
        }
        for w in self.t_grid.windows(2) {
            if w[1] >= w[0] {
                return fail("t_grid must be strictly decreasing".into());
            }
        }
        let t_start = self.t_grid[self.t_grid.len() - 1];
        if t_start < 3.0 {
            return fail(format!("T_start must be >= 3, got {t_start}"));
        }
        if self.t_grid[0] > self.t_max + 1e-12 || self.t_max <= t_start {
            return fail(format!("need T_start < t_grid <= T_max, T_max = {}", self.t_max));
        }
        if !(self.alpha_weight > 0.0 && self.alpha_weight < 0.5) {
            return fail(format!("alpha must lie in (0, 1/2), got {}", self.alpha_weight));
        }
        if self.max_iter == 0 || !(self.contraction_tol > 0.0) {
            return fail("max_iter >= 1 and contraction_tol > 0 required".into());
        }
        Ok(())
    }
}

/// Which min-term determines the predicted scattering rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaBranch {
    /// 1/(p-1) - d/4
    ProfileRate,
    /// d(p-1)/2 - 1
    NonlinearDecay,
    /// 3/8
    StationaryPhase,
}

/// Predicted defect exponent γ = min{1/(p-1) - d/4, d(p-1)/2 - 1, 3/8}
/// (all three terms read with positive sign, so larger is faster decay).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPrediction {
    pub gamma: f64,
    pub branch: GammaBranch,
    pub d: usize,
    pub p: f64,
    /// Whether (d, p) sits in the range where γ > 0 is guaranteed
    /// (d=2: 2<p<3; d=3: 9/5<p<7/3).
    pub in_theorem_range: bool,
}

pub fn decay_prediction(d: usize, p: f64) -> Result<DecayPrediction> {
    if !(1..=3).contains(&d) {
        return Err(Error::InvalidParams(format!("dimension must be 1..3, got {d}")));
    }
    if !(p > 1.0) {
        return Err(Error::InvalidParams(format!("power must exceed 1, got {p}")));
    }
    let df = d as f64;
    let terms = [
        (1.0 / (p - 1.0) - df / 4.0, GammaBranch::ProfileRate),
        (df * (p - 1.0) / 2.0 - 1.0, GammaBranch::NonlinearDecay),
        (3.0 / 8.0, GammaBranch::StationaryPhase),
    ];
    let (gamma, branch) = terms
        .iter()
        .cloned()
        .reduce(|best, cur| if cur.0 < best.0 { cur } else { best })
        .expect("nonempty");
    let in_theorem_range = match d {
        2 => p > 2.0 && p < 3.0,
        3 => p > 9.0 / 5.0 && p < 7.0 / 3.0,
        _ => false,
    };
    Ok(DecayPrediction {
        gamma,
        branch,
        d,
        p,
        in_theorem_range,
    })
}

/// Default weight α: midpoint of the admissible interval
/// (1/(p-1) - d/4, 1/2).
pub fn default_alpha(d: usize, p: f64) -> f64 {
    ((1.0 / (p - 1.0) - d as f64 / 4.0) + 0.5) / 2.0
}

/// How the modified profile is synthesized on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileSynthesis {
    /// Stationary-phase closed form with the phase correction.
    LeadingTerm,
    /// `W(t) 𝓕⁻¹[ψ̂₊ e^{iS₊(t,·)}]`; differs from the closed form by the
    /// decaying remainder R₁.
    FreeOfModifiedData,
}

pub fn profile_field(
    t: f64,
    g: &Grid,
    psi: &AnalyticProfile,
    m: &ModelParams,
    synthesis: ProfileSynthesis,
) -> Result<Field> {
    match synthesis {
        ProfileSynthesis::LeadingTerm => leading_term(t, g, psi, m, true),
        ProfileSynthesis::FreeOfModifiedData => {
            let mut w = modified_spectral_data(t, g, psi, m)?;
            let symbol = m.symbol();
            let grid = w.grid.clone();
            for (flat, c) in w.coeffs.iter_mut().enumerate() {
                let om = symbol.eval(&grid.frequency(flat));
                *c *= Complex64::new(0.0, -t * om).exp();
            }
            Ok(inverse_dft(&w))
        }
    }
}

/// A priori size of what the truncated construction drops: the nonlinear
/// Duhamel tail beyond T_max,
/// `|λ| (sup|ψ̂₊|)^{p-1} ‖ψ₊‖₂ T_max^{1-σ}/(σ-1)` with σ = d(p-1)/2,
/// plus the measured profile-synthesis remainder ‖R₁(T_max)‖₂. The sum is
/// multiplied by the Gronwall constant `e^K` of the backward flow over
/// [T_start, T_max], `K = |λ| p (sup|ψ̂₊|)^{p-1} (T_start^{1-σ} -
/// T_max^{1-σ})/(σ-1)`, which bounds how much the flow map can amplify an
/// end-state discrepancy while transporting it to T_start.
pub fn truncation_estimate(
    cfg: &FinalStateConfig,
    g: &Grid,
    psi: &AnalyticProfile,
    m: &ModelParams,
) -> Result<f64> {
    let sigma = g.dim() as f64 * (m.p - 1.0) / 2.0;
    if sigma <= 1.0 {
        return Err(Error::UnsupportedRange(format!(
            "nonlinear tail is not integrable: d(p-1)/2 = {sigma} <= 1"
        )));
    }
    let spec = g.sample_spectral(0.0, |xi| psi.eval_fourier(xi));
    let sup_hat = spec.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mass = spec.l2_norm();
    let tail = m.lambda.abs() * sup_hat.powf(m.p - 1.0) * mass * cfg.t_max.powf(1.0 - sigma)
        / (sigma - 1.0);
    let r1 = profile_field(cfg.t_max, g, psi, m, ProfileSynthesis::LeadingTerm)?
        .sub(&profile_field(cfg.t_max, g, psi, m, ProfileSynthesis::FreeOfModifiedData)?)
        .l2_norm();
    let growth = m.lambda.abs() * m.p * sup_hat.powf(m.p - 1.0)
        * (cfg.t_start().powf(1.0 - sigma) - cfg.t_max.powf(1.0 - sigma))
        / (sigma - 1.0);
    Ok(growth.exp() * (tail + r1))
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    /// Converged iterate on `cfg.t_grid` (same decreasing order).
    pub fields: Vec<Field>,
    /// Δₙ = sup_t t^α ‖u⁽ⁿ⁺¹⁾(t) - u⁽ⁿ⁾(t)‖₂ per sweep.
    pub deltas: Vec<f64>,
    pub converged: bool,
}

impl PicardOutcome {
    /// The constructed solution at T_start (the smallest grid time).
    pub fn field_at_start(&self) -> &Field {
        self.fields.last().expect("nonempty grid")
    }
}

fn nonlinear_density(f: &Field, m: &ModelParams) -> Vec<Complex64> {
    let pm1 = m.p - 1.0;
    f.values
        .iter()
        .map(|&u| {
            let a = u.norm();
            if a == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                u * (pm1 * a.ln()).exp()
            }
        })
        .collect()
}

/// Picard iteration on the truncated backward Duhamel equation:
/// `u⁽⁰⁾(t) = W(t)𝓕⁻¹[w(t)]` and
/// `u⁽ⁿ⁺¹⁾(t) = u⁽⁰⁾(t) + iλ ∫_t^{T_max} W(t-τ)[N(u⁽ⁿ⁾) - N(u₊)](τ) dτ`
/// with trapezoidal τ-quadrature on the configuration grid and spectral
/// application of W. Stops when Δₙ < contraction_tol; reports
/// non-contraction when the Δ ratio reaches 1 above the round-off floor.
pub fn picard_iterate(
    cfg: &FinalStateConfig,
    g: &Grid,
    psi: &AnalyticProfile,
    m: &ModelParams,
) -> Result<PicardOutcome> {
    cfg.validate()?;
    // ascending times simplify the suffix quadrature
    let times: Vec<f64> = cfg.t_grid.iter().rev().cloned().collect();
    let n_t = times.len();
    let symbol = m.symbol();

    let mut base = Vec::with_capacity(n_t);
    let mut n_plus = Vec::with_capacity(n_t);
    for &t in &times {
        let b = profile_field(t, g, psi, m, ProfileSynthesis::FreeOfModifiedData)?;
        let uplus = profile_field(t, g, psi, m, ProfileSynthesis::LeadingTerm)?;
        n_plus.push(nonlinear_density(&uplus, m));
        base.push(b);
    }
    let data_norm = g.sample_spectral(0.0, |xi| psi.eval_fourier(xi)).l2_norm();
    let floor = 1e-13 * data_norm.max(1.0);

    let mut u: Vec<Field> = base.clone();
    let mut deltas = Vec::new();
    let mut converged = false;
    for iter in 0..cfg.max_iter {
        // h_j = e^{iτ_j ω} 𝓕[N(u⁽ⁿ⁾) - N(u₊)](τ_j)
        let mut h = Vec::with_capacity(n_t);
        for (j, uj) in u.iter().enumerate() {
            let mut diff = nonlinear_density(uj, m);
            for (v, p) in diff.iter_mut().zip(&n_plus[j]) {
                *v -= p;
            }
            let mut s = forward_dft(&Field {
                grid: g.clone(),
                time: times[j],
                values: diff,
            });
            for (flat, c) in s.coeffs.iter_mut().enumerate() {
                let om = symbol.eval(&g.frequency(flat));
                *c *= Complex64::new(0.0, times[j] * om).exp();
            }
            h.push(s.coeffs);
        }
        // suffix trapezoid: S_i = Σ over [τ_i, T_max]
        let mut suffix = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut new_u: Vec<Option<Field>> = vec![None; n_t];
        for i in (0..n_t).rev() {
            if i + 1 < n_t {
                let w = 0.5 * (times[i + 1] - times[i]);
                for (k, s) in suffix.iter_mut().enumerate() {
                    *s += w * (h[i][k] + h[i + 1][k]);
                }
            }
            let mut spec = crate::grid::SpectralField {
                grid: g.clone(),
                time: times[i],
                coeffs: suffix.clone(),
            };
            for (flat, c) in spec.coeffs.iter_mut().enumerate() {
                let om = symbol.eval(&g.frequency(flat));
                *c *= Complex64::new(0.0, -times[i] * om).exp();
            }
            let correction = inverse_dft(&spec);
            let values = base[i]
                .values
                .iter()
                .zip(&correction.values)
                .map(|(b, c)| b + Complex64::new(0.0, m.lambda) * c)
                .collect();
            new_u[i] = Some(Field {
                grid: g.clone(),
                time: times[i],
                values,
            });
        }
        let new_u: Vec<Field> = new_u.into_iter().map(|f| f.expect("filled")).collect();
        let delta = times
            .iter()
            .zip(u.iter().zip(&new_u))
            .map(|(&t, (old, new))| t.powf(cfg.alpha_weight) * new.sub(old).l2_norm())
            .fold(0.0, f64::max);
        deltas.push(delta);
        u = new_u;
        if delta < cfg.contraction_tol || delta < floor {
            converged = true;
            break;
        }
        if iter >= 1 {
            let ratio = deltas[iter] / deltas[iter - 1];
            if ratio >= 1.0 && delta > floor {
                return Err(Error::NonContraction {
                    iterate: iter,
                    ratio,
                    data_norm,
                });
            }
        }
    }
    if let Some(&last) = deltas.last() {
        converged = converged || last < cfg.contraction_tol;
    }
    u.reverse(); // back to the configuration's decreasing order
    Ok(PicardOutcome {
        fields: u,
        deltas,
        converged,
    })
}

/// Independent construction of the same object: set `u(T_max) = u₊(T_max)`
/// and integrate the full equation backward to T_start with the split-step
/// solver.
pub fn backward_construct(
    cfg: &FinalStateConfig,
    g: &Grid,
    psi: &AnalyticProfile,
    m: &ModelParams,
) -> Result<Field> {
    cfg.validate()?;
    let end = profile_field(cfg.t_max, g, psi, m, ProfileSynthesis::LeadingTerm)?;
    let span = cfg.t_max - cfg.t_start();
    let steps = (span / cfg.solver_dt.abs()).round().max(1.0) as usize;
    let dt = -span / steps as f64;
    let scfg = SolveConfig::new(dt, steps)?;
    Ok(solve(&end, cfg.t_start(), &scfg, m)?.final_field)
}

/// Defect series `δ(t) = ‖u(t) - W(t)ψ₊‖₂` over the trajectory, with its
/// power-law fit. Fields must share one grid; at least 6 samples are
/// required for a stable fit.
pub fn scattering_defect(
    fields: &[Field],
    psi: &AnalyticProfile,
    m: &ModelParams,
) -> Result<(Vec<(f64, f64)>, DecayFit)> {
    if fields.len() < 6 {
        return Err(Error::FitError(format!(
            "need >= 6 trajectory samples for a defect fit, got {}",
            fields.len()
        )));
    }
    let mut series: Vec<(f64, f64)> = fields
        .iter()
        .map(|f| {
            let free = free_solution(psi, f.time, &f.grid, m);
            (f.time, f.sub(&free).l2_norm())
        })
        .collect();
    series.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite times"));
    let fit = fit_power_law(&series)?;
    Ok((series, fit))
}
