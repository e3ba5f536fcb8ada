//! Exact spectral propagation of the linear flow, for the general equation
//! `i u_t + αΔu + iβ∂³_{x1}u + γ∂⁴_{x1}u = 0`, its canonical anisotropic
//! reduction, and the non-elliptic variant, plus the gauge/translation
//! change of unknown relating them.
//!
//! Sign convention used everywhere: `û(t,ξ) = e^{-i t ω(ξ)} û(0,ξ)` with
//! `ω(ξ) = |ξ|²/2 + ξ1⁴/4` in the canonical case.

use num_complex::Complex64;

use crate::grid::{forward_dft, inverse_dft, Field, Grid, SpectralField};
use crate::profiles::AnalyticProfile;
use crate::{Error, Result};

/// Which member of the model family the coefficients describe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelForm {
    /// Full coefficient set (α, β, γ).
    General,
    /// The canonical anisotropic equation: (α, β, γ) = (1/2, 0, -1/4).
    CanonicalElliptic,
    /// Non-elliptic variant with quartic sign ±1.
    NonElliptic(i8),
}

/// Model coefficients: dispersion (α, β, γ), coupling λ and nonlinearity
/// power p > 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub p: f64,
    pub form: ModelForm,
}

impl ModelParams {
    pub fn general(alpha: f64, beta: f64, gamma: f64, lambda: f64, p: f64) -> Result<Self> {
        check_power(p)?;
        Ok(ModelParams {
            alpha,
            beta,
            gamma,
            lambda,
            p,
            form: ModelForm::General,
        })
    }

    /// The canonical anisotropic model `i u_t + Δu/2 - ∂⁴_{x1}u/4 = λ|u|^{p-1}u`.
    pub fn canonical(lambda: f64, p: f64) -> Result<Self> {
        check_power(p)?;
        Ok(ModelParams {
            alpha: 0.5,
            beta: 0.0,
            gamma: -0.25,
            lambda,
            p,
            form: ModelForm::CanonicalElliptic,
        })
    }

    /// Linear canonical model (λ = 0) with a placeholder power.
    pub fn linear_canonical() -> Self {
        ModelParams::canonical(0.0, 3.0).expect("valid")
    }

    pub fn non_elliptic(sign: i8, lambda: f64, p: f64) -> Result<Self> {
        check_power(p)?;
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidParams(format!("non-elliptic sign must be ±1, got {sign}")));
        }
        Ok(ModelParams {
            alpha: 0.5,
            beta: 0.0,
            gamma: -0.25 * sign as f64,
            lambda,
            p,
            form: ModelForm::NonElliptic(sign),
        })
    }

    pub fn symbol(&self) -> DispersionSymbol {
        match self.form {
            ModelForm::NonElliptic(sign) => DispersionSymbol {
                x1_sq: -0.5,
                perp_sq: 0.5,
                x1_cubed: 0.0,
                x1_quartic: -0.25 * sign as f64,
            },
            // General and canonical share ω = α|ξ|² - βξ1³ - γξ1⁴.
            _ => DispersionSymbol {
                x1_sq: self.alpha,
                perp_sq: self.alpha,
                x1_cubed: -self.beta,
                x1_quartic: -self.gamma,
            },
        }
    }
}

fn check_power(p: f64) -> Result<()> {
    if !(p > 1.0) {
        return Err(Error::InvalidParams(format!("nonlinearity power must exceed 1, got {p}")));
    }
    Ok(())
}

/// Real dispersion relation `ω(ξ) = a ξ1² + b |ξ⊥|² + c ξ1³ + e ξ1⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSymbol {
    pub x1_sq: f64,
    pub perp_sq: f64,
    pub x1_cubed: f64,
    pub x1_quartic: f64,
}

impl DispersionSymbol {
    /// Canonical symbol `|ξ|²/2 + ξ1⁴/4`.
    pub fn canonical() -> Self {
        DispersionSymbol {
            x1_sq: 0.5,
            perp_sq: 0.5,
            x1_cubed: 0.0,
            x1_quartic: 0.25,
        }
    }

    /// Pure second-order symbol `|ξ|²/2` (test override for closed-form
    /// comparisons).
    pub fn schroedinger() -> Self {
        DispersionSymbol {
            x1_sq: 0.5,
            perp_sq: 0.5,
            x1_cubed: 0.0,
            x1_quartic: 0.0,
        }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let x1 = xi[0];
        let perp: f64 = xi[1..].iter().map(|v| v * v).sum();
        self.x1_sq * x1 * x1
            + self.perp_sq * perp
            + self.x1_cubed * x1 * x1 * x1
            + self.x1_quartic * x1 * x1 * x1 * x1
    }

    /// Group velocity along x1 for a 1d symbol: dω/dξ1.
    pub fn group_velocity_x1(&self, x1: f64) -> f64 {
        2.0 * self.x1_sq * x1 + 3.0 * self.x1_cubed * x1 * x1 + 4.0 * self.x1_quartic * x1 * x1 * x1
    }
}

/// Advance a spectral field by `dt` under the symbol: multiply by
/// `e^{-i dt ω(ξ)}` and move the time stamp.
pub fn propagate_spectral(s: &mut SpectralField, dt: f64, symbol: &DispersionSymbol) {
    let g = s.grid.clone();
    for (flat, c) in s.coeffs.iter_mut().enumerate() {
        let om = symbol.eval(&g.frequency(flat));
        *c *= Complex64::new(0.0, -dt * om).exp();
    }
    s.time += dt;
}

/// Exact linear flow under an explicit symbol.
pub fn propagate_symbol(f: &Field, dt: f64, symbol: &DispersionSymbol) -> Field {
    let mut s = forward_dft(f);
    propagate_spectral(&mut s, dt, symbol);
    inverse_dft(&s)
}

/// Exact linear flow `W(dt)` for the model's symbol; `dt` may be negative
/// (group, not semigroup).
pub fn propagate(f: &Field, dt: f64, m: &ModelParams) -> Field {
    propagate_symbol(f, dt, &m.symbol())
}

/// `W(t)ψ` synthesized directly from the analytic transform of ψ, with no
/// position-space sampling step.
pub fn free_solution_symbol(
    psi: &AnalyticProfile,
    t: f64,
    g: &Grid,
    symbol: &DispersionSymbol,
) -> Field {
    let s = g.sample_spectral(t, |xi| {
        psi.eval_fourier(xi) * Complex64::new(0.0, -t * symbol.eval(xi)).exp()
    });
    inverse_dft(&s)
}

pub fn free_solution(psi: &AnalyticProfile, t: f64, g: &Grid, m: &ModelParams) -> Field {
    free_solution_symbol(psi, t, g, &m.symbol())
}

/// How the general equation reduces after the gauge/translation change of
/// unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reducibility {
    /// `(α + 3β²/8γ) α > 0` and `αγ < 0`: rescales to the canonical
    /// anisotropic equation.
    Elliptic,
    /// Second-order coefficients of opposite sign (or wrong quartic sign):
    /// rescales to the non-elliptic variant.
    NonElliptic,
    /// The reducibility condition degenerates to equality.
    Degenerate,
}

/// Coefficients of the reduced equation
/// `i v_t + (α + 3β²/8γ) ∂²_{x1} v + α Δ⊥ v + γ ∂⁴_{x1} v = λ|v|^{p-1}v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub x1_second: f64,
    pub perp_second: f64,
    pub quartic: f64,
    pub flag: Reducibility,
}

impl ReducedParams {
    pub fn symbol(&self) -> DispersionSymbol {
        DispersionSymbol {
            x1_sq: self.x1_second,
            perp_sq: self.perp_second,
            x1_cubed: 0.0,
            x1_quartic: -self.quartic,
        }
    }
}

/// Reduced coefficients of the §-free-form third-order elimination, with the
/// ellipticity classification of the result.
pub fn reduced_params(m: &ModelParams) -> Result<ReducedParams> {
    if m.gamma == 0.0 {
        return Err(Error::DegenerateGamma);
    }
    let a = m.alpha + 3.0 * m.beta * m.beta / (8.0 * m.gamma);
    let flag = if a * m.alpha == 0.0 {
        Reducibility::Degenerate
    } else if a * m.alpha > 0.0 && m.alpha * m.gamma < 0.0 {
        Reducibility::Elliptic
    } else {
        Reducibility::NonElliptic
    };
    Ok(ReducedParams {
        x1_second: a,
        perp_second: m.alpha,
        quartic: m.gamma,
        flag,
    })
}

/// The change of unknown eliminating the third-order term:
/// `v(t,x) = e^{-iθt + iκx1} u(t, x1 - st, x⊥)` with
/// `κ = β/4γ`, `θ = αβ²/16γ² + 5β⁴/256γ³`, `s = αβ/2γ + β³/8γ²`.
/// The shift is applied spectrally (exact for band-limited fields).
pub fn gauge_reduce(u: &Field, t: f64, m: &ModelParams) -> Result<Field> {
    if m.gamma == 0.0 {
        return Err(Error::DegenerateGamma);
    }
    let (alpha, beta, gamma) = (m.alpha, m.beta, m.gamma);
    let kappa = beta / (4.0 * gamma);
    let theta = alpha * beta * beta / (16.0 * gamma * gamma)
        + 5.0 * beta.powi(4) / (256.0 * gamma.powi(3));
    let shift = (alpha * beta / (2.0 * gamma) + beta.powi(3) / (8.0 * gamma * gamma)) * t;

    // translate: u(x1 - shift) has transform e^{-i shift ξ1} û
    let mut s = forward_dft(u);
    let g = s.grid.clone();
    for (flat, c) in s.coeffs.iter_mut().enumerate() {
        let xi1 = g.frequency(flat)[0];
        *c *= Complex64::new(0.0, -shift * xi1).exp();
    }
    let mut v = inverse_dft(&s);

    // pointwise gauge phase
    let phase_t = Complex64::new(0.0, -theta * t).exp();
    for (flat, val) in v.values.iter_mut().enumerate() {
        let x1 = g.position(flat)[0];
        *val *= phase_t * Complex64::new(0.0, kappa * x1).exp();
    }
    Ok(v)
}
