//! Direct high-accuracy quadrature of the 1d oscillatory kernel
//! `(1/√(2π)) ∫ e^{-iφ(ξ)} ψ(ξ) dξ` with the quartic phase
//! `φ(ξ) = tξ⁴/4 + tξ²/2 - x1ξ`, plus the integration-by-parts rewrite
//! used as an analytic cross-check. This is the independent oracle the
//! spectral propagator and the stationary-phase leading term are validated
//! against.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::asymptotics::stationary_point;
use crate::profiles::gauss_legendre;
use crate::{Error, Result};

/// Real polynomial phase `φ(ξ) = c4 ξ⁴ + c2 ξ² + c1 ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub c4: f64,
    pub c2: f64,
    pub c1: f64,
}

impl Phase {
    /// Kernel phase at time t and observation point x1.
    pub fn kernel(t: f64, x1: f64) -> Self {
        Phase {
            c4: t / 4.0,
            c2: t / 2.0,
            c1: -x1,
        }
    }

    /// Quadratic-only phase (Fresnel regime).
    pub fn fresnel(t: f64, z: f64) -> Self {
        Phase {
            c4: 0.0,
            c2: t / 2.0,
            c1: -z,
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        ((self.c4 * xi * xi + self.c2) * xi + self.c1) * xi
    }

    pub fn d1(&self, xi: f64) -> f64 {
        (4.0 * self.c4 * xi * xi + 2.0 * self.c2) * xi + self.c1
    }

    pub fn d2(&self, xi: f64) -> f64 {
        12.0 * self.c4 * xi * xi + 2.0 * self.c2
    }
}

type AmpFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Complex amplitude with an optional derivative evaluator and a radius
/// beyond which it is negligible (|ψ| < 1e-14).
#[derive(Clone)]
pub struct Amplitude {
    pub f: AmpFn,
    pub df: Option<AmpFn>,
    pub radius: f64,
}

impl Amplitude {
    pub fn new(
        radius: f64,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        df: Option<AmpFn>,
    ) -> Self {
        Amplitude {
            f: Arc::new(f),
            df,
            radius,
        }
    }

    /// `scale · e^{-w²ξ²/2}` with its derivative.
    pub fn gaussian(scale: f64, width: f64) -> Self {
        let w2 = width * width;
        // scale·e^{-w²ξ²/2} < 1e-14·scale at ξ² = 2·ln(1e14)/w²
        let radius = (2.0 * 1e14f64.ln() / w2).sqrt();
        Amplitude {
            f: Arc::new(move |xi| Complex64::new(scale * (-w2 * xi * xi / 2.0).exp(), 0.0)),
            df: Some(Arc::new(move |xi| {
                Complex64::new(-w2 * xi * scale * (-w2 * xi * xi / 2.0).exp(), 0.0)
            })),
            radius,
        }
    }

    /// Multiply by a cosine taper falling from 1 to 0 over the outer
    /// `1 - inner` fraction of `[-r, r]`; derivative tracked by the product
    /// rule so integration by parts stays exact.
    pub fn tapered(&self, r: f64, inner: f64) -> Self {
        let r0 = inner * r;
        let taper = move |xi: f64| -> f64 {
            let a = xi.abs();
            if a <= r0 {
                1.0
            } else if a >= r {
                0.0
            } else {
                0.5 * (1.0 + (PI * (a - r0) / (r - r0)).cos())
            }
        };
        let dtaper = move |xi: f64| -> f64 {
            let a = xi.abs();
            if a <= r0 || a >= r {
                0.0
            } else {
                -0.5 * PI / (r - r0) * (PI * (a - r0) / (r - r0)).sin() * xi.signum()
            }
        };
        let f = self.f.clone();
        let fd = self.f.clone();
        let new_df = self.df.clone().map(|df| -> AmpFn {
            Arc::new(move |xi| df(xi) * taper(xi) + fd(xi) * dtaper(xi))
        });
        Amplitude {
            f: Arc::new(move |xi| f(xi) * taper(xi)),
            df: new_df,
            radius: r,
        }
    }
}

/// `∫_a^b e^{-iφ(ξ)} ψ(ξ) dξ` with an explicit window and a pivot `c`
/// (the stationary point) for the integration-by-parts rewrite. No
/// `1/√(2π)` prefactor at this level.
#[derive(Clone)]
pub struct OscillatoryIntegral {
    pub phase: Phase,
    pub amp: Amplitude,
    pub window: (f64, f64),
    pub center: f64,
}

const QUAD_TOL: f64 = 1e-8;
const MAX_POINTS: usize = 1 << 23;
const PANEL_ORDER: usize = 16;

impl OscillatoryIntegral {
    /// Adaptive value: uniform Gauss panels over the window, panel count
    /// doubled until two successive levels agree within 1e-8 absolute.
    pub fn value(&self) -> Result<Complex64> {
        let (a, b) = self.window;
        let (nodes, weights) = gauss_legendre(PANEL_ORDER);
        // seed the panel count from the total phase variation so the first
        // level already resolves most oscillations
        let swing = (self.phase.eval(a) - self.phase.eval(self.center)).abs()
            + (self.phase.eval(b) - self.phase.eval(self.center)).abs();
        // a 16-point panel resolves several oscillation cycles
        let mut panels = ((swing / (8.0 * PI)) as usize).max(8).next_power_of_two();
        let mut prev = self.level(panels, &nodes, &weights);
        loop {
            panels *= 2;
            if panels * PANEL_ORDER > MAX_POINTS {
                return Err(Error::QuadratureStall(format!(
                    "no convergence below {MAX_POINTS} evaluations"
                )));
            }
            let cur = self.level(panels, &nodes, &weights);
            if (cur - prev).norm() < QUAD_TOL {
                return Ok(cur);
            }
            prev = cur;
        }
    }

    fn level(&self, panels: usize, nodes: &[f64], weights: &[f64]) -> Complex64 {
        let (a, b) = self.window;
        let h = (b - a) / panels as f64;
        let f = &self.amp.f;
        let mut partials: Vec<Complex64> = Vec::with_capacity(panels);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + h / 2.0;
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, w) in nodes.iter().zip(weights) {
                let xi = mid + x * h / 2.0;
                acc += w * Complex64::new(0.0, -self.phase.eval(xi)).exp() * f(xi);
            }
            partials.push(acc * (h / 2.0));
        }
        // pairwise reduction keeps the sum order deterministic
        while partials.len() > 1 {
            let mut next = Vec::with_capacity(partials.len() / 2 + 1);
            for chunk in partials.chunks(2) {
                next.push(chunk.iter().sum());
            }
            partials = next;
        }
        partials[0]
    }

    /// One integration-by-parts step about the pivot:
    /// `∫ e^{-iφ}ψ = boundary - ∫ e^{-iφ}·first - i ∫ e^{-iφ}·second` with
    /// `first = (ξ-c)ψ′/D`, `second = (ξ-c){φ′+(ξ-c)φ″}ψ/D²`,
    /// `D = 1 - i(ξ-c)φ′`. Requires the amplitude's derivative.
    pub fn ibp_transform(&self) -> Result<(Complex64, OscillatoryIntegral, OscillatoryIntegral)> {
        let df = self.amp.df.clone().ok_or(Error::MissingDerivative)?;
        let f = self.amp.f.clone();
        let phase = self.phase;
        let c = self.center;
        let denom = move |xi: f64| Complex64::new(1.0, -(xi - c) * phase.d1(xi));

        let bterm = |xi: f64| {
            Complex64::new(0.0, -phase.eval(xi)).exp() * (xi - c) * (self.amp.f)(xi)
                / Complex64::new(1.0, -(xi - c) * phase.d1(xi))
        };
        let boundary = bterm(self.window.1) - bterm(self.window.0);

        let d1 = denom.clone();
        let first = Amplitude {
            f: Arc::new(move |xi| (xi - c) * df(xi) / d1(xi)),
            df: None,
            radius: self.amp.radius,
        };
        let second = Amplitude {
            f: Arc::new(move |xi| {
                let d = denom(xi);
                (xi - c) * (phase.d1(xi) + (xi - c) * phase.d2(xi)) * f(xi) / (d * d)
            }),
            df: None,
            radius: self.amp.radius,
        };
        let mk = |amp: Amplitude| OscillatoryIntegral {
            phase,
            amp,
            window: self.window,
            center: c,
        };
        Ok((boundary, mk(first), mk(second)))
    }
}

/// `(1/√(2π)) ∫ e^{-iφ(t,x1;ξ)} ψ(ξ) dξ`: the exact 1d solution value at
/// (t, x1) when ψ is the datum's Fourier transform. The window covers the
/// amplitude support and the stationary point; the outer 10% is tapered.
pub fn kernel_integral(t: f64, x1: f64, amp: &Amplitude) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let mu1 = stationary_point(t, &[x1])?.mu1;
    let r = (amp.radius.max(2.0 * mu1.abs() + 1.0)) / 0.9;
    let oi = OscillatoryIntegral {
        phase: Phase::kernel(t, x1),
        amp: amp.tapered(r, 0.9),
        window: (-r, r),
        center: mu1,
    };
    Ok(oi.value()? / (2.0 * PI).sqrt())
}

/// Closed-form Fresnel value `t^{-1/2} e^{iz²/(2t) - iπ/4}` of
/// `(1/√(2π)) ∫ e^{izξ - itξ²/2} dξ`.
pub fn fresnel_exact(t: f64, z: f64) -> Complex64 {
    t.powf(-0.5) * Complex64::new(0.0, z * z / (2.0 * t) - PI / 4.0).exp()
}

/// The same Fresnel integral by quadrature: the unit amplitude is
/// regularized by `e^{-εξ²}`, integrated at ε, ε/2, ε/4, and Richardson
/// extrapolated to ε = 0 (the regularized value is analytic in ε).
pub fn fresnel_value(t: f64, z: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let eps0 = 0.005;
    let one_eps = |eps: f64| -> Result<Complex64> {
        let radius = (1e14f64.ln() / eps).sqrt();
        let amp = Amplitude {
            f: Arc::new(move |xi| Complex64::new((-eps * xi * xi).exp(), 0.0)),
            df: None,
            radius,
        };
        let r = radius / 0.9;
        let oi = OscillatoryIntegral {
            phase: Phase::fresnel(t, z),
            amp: amp.tapered(r, 0.9),
            window: (-r, r),
            center: z / t,
        };
        Ok(oi.value()? / (2.0 * PI).sqrt())
    };
    let v1 = one_eps(eps0)?;
    let v2 = one_eps(eps0 / 2.0)?;
    let v3 = one_eps(eps0 / 4.0)?;
    let w1 = 2.0 * v2 - v1;
    let w2 = 2.0 * v3 - v2;
    Ok((4.0 * w2 - w1) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{free_solution, ModelParams};
    use crate::grid::Grid;
    use crate::profiles::AnalyticProfile;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_amplitude() {
        let amp = Amplitude::new(5.0, |_| Complex64::new(0.0, 0.0), None);
        let v = kernel_integral(1.0, 0.0, &amp).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn matches_spectral_route() {
        // same integral through the DFT propagator: ψ = e^{-x²/2} has
        // ψ̂ = e^{-ξ²/2}. The torus wraps the dispersive tails, whose
        // amplitude at the image distance 2L is ~ t^{-1/2}ψ̂(μ(2L/t)); the
        // box is sized so this sits below the comparison tolerance at t=64.
        let g = Grid::cubic(1, 6144.0, 32768).unwrap();
        let psi = AnalyticProfile::isotropic_gaussian(1, 1.0).unwrap();
        let m = ModelParams::linear_canonical();
        let amp = Amplitude::gaussian(psi.eval_fourier(&[0.0]).re, 1.0);
        for (t, x1) in [(1.0, 0.0), (1.0, 3.0), (8.0, -2.0), (64.0, 10.0)] {
            let u = free_solution(&psi, t, &g, &m);
            // snap the probe to the nearest grid site
            let i = ((x1 + 6144.0) / g.spacing(0)).round() as usize;
            let x1 = g.coord(0, i);
            let spectral = u.values[i];
            let oracle = kernel_integral(t, x1, &amp).unwrap();
            assert!(
                (spectral - oracle).norm() < 1e-7,
                "mismatch at t={t}, x1={x1}: {:.2e}",
                (spectral - oracle).norm()
            );
        }
    }

    #[test]
    fn fresnel_closed_form() {
        for (t, z) in [(1.0, 0.0), (1.0, 1.5), (2.0, -0.7)] {
            let num = fresnel_value(t, z).unwrap();
            let exact = fresnel_exact(t, z);
            assert!(
                (num - exact).norm() < 1e-6,
                "Fresnel mismatch at t={t}, z={z}: {:.2e}",
                (num - exact).norm()
            );
        }
    }

    #[test]
    fn ibp_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for case in 0..6 {
            let (t, x1) = match case {
                0 => (1.0, 0.0),
                1 => (1.0, 5.0),
                2 => (10.0, 0.0),
                3 => (10.0, 5.0),
                4 => (100.0, 0.0),
                _ => (100.0, 5.0),
            };
            let scale: f64 = rng.gen_range(0.5..2.0);
            let width: f64 = rng.gen_range(0.7..1.5);
            let mu1 = stationary_point(t, &[x1]).unwrap().mu1;
            let r = Amplitude::gaussian(scale, width).radius / 0.9;
            let oi = OscillatoryIntegral {
                phase: Phase::kernel(t, x1),
                amp: Amplitude::gaussian(scale, width).tapered(r, 0.9),
                window: (-r, r),
                center: mu1,
            };
            let direct = oi.value().unwrap();
            let (boundary, first, second) = oi.ibp_transform().unwrap();
            let via_ibp =
                boundary - first.value().unwrap() - Complex64::new(0.0, 1.0) * second.value().unwrap();
            assert!(
                (direct - via_ibp).norm() < 1e-7,
                "identity off by {:.2e} at t={t}, x1={x1}",
                (direct - via_ibp).norm()
            );
        }
    }

    #[test]
    fn ibp_integrands_bounded_at_pivot() {
        let t = 4.0;
        let x1 = 8.0;
        let mu1 = stationary_point(t, &[x1]).unwrap().mu1;
        let oi = OscillatoryIntegral {
            phase: Phase::kernel(t, x1),
            amp: Amplitude::gaussian(1.0, 1.0),
            window: (-9.0, 9.0),
            center: mu1,
        };
        let (_, first, second) = oi.ibp_transform().unwrap();
        assert!((oi.phase.d1(mu1)).abs() < 1e-10, "pivot is not stationary");
        for k in -20..=20 {
            let xi = mu1 + k as f64 * 1e-3;
            assert!((first.amp.f)(xi).norm() < 10.0);
            assert!((second.amp.f)(xi).norm() < 10.0);
        }
    }

    #[test]
    fn ibp_requires_derivative() {
        let oi = OscillatoryIntegral {
            phase: Phase::kernel(1.0, 0.0),
            amp: Amplitude::new(5.0, |_| Complex64::new(1.0, 0.0), None),
            window: (-5.0, 5.0),
            center: 0.0,
        };
        assert!(matches!(oi.ibp_transform(), Err(Error::MissingDerivative)));
    }

    #[test]
    fn leading_term_agreement_at_large_time() {
        // stationary-phase approximation at x1 = 0, d = 1. A broad ψ̂
        // (position width 1/2) keeps the amplitude-curvature part of the
        // next-order term small; the phase-curvature part contributes
        // ~ 0.75/t regardless of the datum.
        let psi = AnalyticProfile::wide_gaussian(1, 1.0, 0.5).unwrap();
        let amp = Amplitude::gaussian(psi.eval_fourier(&[0.0]).re, 0.5);
        let t = 50.0;
        let oracle = kernel_integral(t, 0.0, &amp).unwrap();
        let lead = t.powf(-0.5) * psi.eval_fourier(&[0.0])
            * Complex64::new(0.0, -PI / 4.0).exp();
        let rel = (oracle - lead).norm() / oracle.norm();
        assert!(rel < 0.02, "leading-term relative error {rel:.3}");
    }

    #[test]
    fn stationary_phase_error_rate() {
        // |oracle - leading| · t^{1/2 + 3/8} stays bounded along a fixed ray
        let psi = AnalyticProfile::isotropic_gaussian(1, 1.0).unwrap();
        let a0 = psi.eval_fourier(&[0.0]).re;
        let amp = Amplitude::gaussian(a0, 1.0);
        let ray = 2.0; // x1/t = 2 so μ1 = 1
        let mut scaled = Vec::new();
        let mut t = 4.0;
        while t <= 256.0 {
            let x1 = ray * t;
            let oracle = kernel_integral(t, x1, &amp).unwrap();
            let mu1 = 1.0f64;
            let phase = 0.75 * t * mu1.powi(4) + 0.5 * t * mu1 * mu1 - PI / 4.0;
            let lead = t.powf(-0.5) / (3.0f64 + 1.0).sqrt()
                * psi.eval_fourier(&[mu1])
                * Complex64::new(0.0, phase).exp();
            scaled.push((oracle - lead).norm() * t.powf(0.5 + 0.375));
            t *= 2.0;
        }
        let max = scaled.iter().cloned().fold(0.0f64, f64::max);
        let first = scaled[0];
        assert!(
            max <= 2.0 * first.max(1e-6),
            "scaled error grows: {scaled:?}"
        );
    }

    #[test]
    fn taper_sensitivity_is_small() {
        let amp = Amplitude::gaussian(1.0, 1.0);
        let base = kernel_integral(4.0, 1.0, &amp).unwrap();
        // widen the window by hand; the tapered tail carries < 1e-12 mass
        let r = amp.radius * 1.5;
        let oi = OscillatoryIntegral {
            phase: Phase::kernel(4.0, 1.0),
            amp: amp.tapered(r, 0.9),
            window: (-r, r),
            center: stationary_point(4.0, &[1.0]).unwrap().mu1,
        };
        let wide = oi.value().unwrap() / (2.0 * PI).sqrt();
        assert!((base - wide).norm() < 1e-8);
    }
}
