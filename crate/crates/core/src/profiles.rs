//! Closed-form final data: profiles with exact position-space and
//! Fourier-space evaluators, so off-lattice transform values are available
//! without interpolation.

use num_complex::Complex64;

use crate::grid::pairwise_sum;
use crate::{Error, Result};

/// One separable term of a profile.
#[derive(Debug, Clone)]
pub enum ProfileKind {
    /// `A ∏_j e^{-(x_j - c_j)²/(2 w_j²)} · e^{i k·x}`
    Gaussian {
        amplitude: f64,
        width: Vec<f64>,
        center: Vec<f64>,
        carrier: Vec<f64>,
    },
    /// `∏_j H_{n_j}(x_j / w_j) e^{-x_j²/(2 w_j²)}` with physicists' Hermite
    /// polynomials.
    HermiteGaussian { order: Vec<usize>, width: Vec<f64> },
}

/// Finite sum of closed-form terms with exact transforms under the
/// `(2π)^{-d/2}` convention.
#[derive(Debug, Clone)]
pub struct AnalyticProfile {
    d: usize,
    terms: Vec<ProfileKind>,
}

fn hermite(n: usize, x: f64) -> f64 {
    // H_0 = 1, H_1 = 2x, H_{k+1} = 2x H_k - 2k H_{k-1}
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

impl ProfileKind {
    fn eval_position(&self, x: &[f64]) -> Complex64 {
        match self {
            ProfileKind::Gaussian {
                amplitude,
                width,
                center,
                carrier,
            } => {
                let mut arg = 0.0;
                let mut phase = 0.0;
                for j in 0..width.len() {
                    let dx = x[j] - center[j];
                    arg += dx * dx / (2.0 * width[j] * width[j]);
                    phase += carrier[j] * x[j];
                }
                *amplitude * (-arg).exp() * Complex64::new(0.0, phase).exp()
            }
            ProfileKind::HermiteGaussian { order, width } => {
                let mut v = 1.0;
                for j in 0..width.len() {
                    let u = x[j] / width[j];
                    v *= hermite(order[j], u) * (-u * u / 2.0).exp();
                }
                Complex64::new(v, 0.0)
            }
        }
    }

    fn eval_fourier(&self, xi: &[f64]) -> Complex64 {
        match self {
            ProfileKind::Gaussian {
                amplitude,
                width,
                center,
                carrier,
            } => {
                // per axis: F[e^{ikx} g((x-c))](ξ) = e^{-ic(ξ-k)} w e^{-w²(ξ-k)²/2}
                let mut v = Complex64::new(*amplitude, 0.0);
                for j in 0..width.len() {
                    let s = xi[j] - carrier[j];
                    v *= width[j]
                        * (-width[j] * width[j] * s * s / 2.0).exp()
                        * Complex64::new(0.0, -center[j] * s).exp();
                }
                v
            }
            ProfileKind::HermiteGaussian { order, width } => {
                // F[H_n(x)e^{-x²/2}] = (-i)^n H_n(ξ)e^{-ξ²/2}; dilation gives
                // an extra factor w per axis with argument wξ.
                let mut v = Complex64::new(1.0, 0.0);
                for j in 0..width.len() {
                    let u = width[j] * xi[j];
                    let phase = Complex64::new(0.0, -1.0).powu(order[j] as u32);
                    v *= phase * width[j] * hermite(order[j], u) * (-u * u / 2.0).exp();
                }
                v
            }
        }
    }

    /// Conservative half-width of the box outside which |ψ| < 1e-16.
    fn support_radius(&self, axis: usize) -> f64 {
        match self {
            ProfileKind::Gaussian { width, center, .. } => center[axis].abs() + 9.0 * width[axis],
            ProfileKind::HermiteGaussian { order, width } => {
                (9.0 + order[axis] as f64) * width[axis]
            }
        }
    }
}

impl AnalyticProfile {
    pub fn gaussian(amplitude: f64, width: &[f64], center: &[f64], carrier: &[f64]) -> Result<Self> {
        let d = width.len();
        if d == 0 || d > 3 || center.len() != d || carrier.len() != d {
            return Err(Error::InvalidParams("gaussian profile axis mismatch".into()));
        }
        if width.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidParams("gaussian width must be positive".into()));
        }
        Ok(AnalyticProfile {
            d,
            terms: vec![ProfileKind::Gaussian {
                amplitude,
                width: width.to_vec(),
                center: center.to_vec(),
                carrier: carrier.to_vec(),
            }],
        })
    }

    /// Isotropic centered Gaussian `A e^{-|x|²/2}`.
    pub fn isotropic_gaussian(d: usize, amplitude: f64) -> Result<Self> {
        AnalyticProfile::gaussian(amplitude, &vec![1.0; d], &vec![0.0; d], &vec![0.0; d])
    }

    /// Isotropic centered Gaussian with per-axis width `w`.
    pub fn wide_gaussian(d: usize, amplitude: f64, w: f64) -> Result<Self> {
        AnalyticProfile::gaussian(amplitude, &vec![w; d], &vec![0.0; d], &vec![0.0; d])
    }

    pub fn hermite_gaussian(order: &[usize], width: &[f64]) -> Result<Self> {
        let d = width.len();
        if d == 0 || d > 3 || order.len() != d {
            return Err(Error::InvalidParams("hermite profile axis mismatch".into()));
        }
        Ok(AnalyticProfile {
            d,
            terms: vec![ProfileKind::HermiteGaussian {
                order: order.to_vec(),
                width: width.to_vec(),
            }],
        })
    }

    /// Sum of existing profiles over the same dimension.
    pub fn sum(parts: &[AnalyticProfile]) -> Result<Self> {
        let d = parts
            .first()
            .ok_or_else(|| Error::InvalidParams("empty profile sum".into()))?
            .d;
        if parts.iter().any(|p| p.d != d) {
            return Err(Error::InvalidParams("profile sum dimension mismatch".into()));
        }
        Ok(AnalyticProfile {
            d,
            terms: parts.iter().flat_map(|p| p.terms.iter().cloned()).collect(),
        })
    }

    /// Default small experiment datum: `A e^{-|x|²/2}` with `A` calibrated so
    /// `‖ψ‖_{H^{0,s}} = target` (contraction-regime data).
    pub fn small_gaussian(d: usize, s: f64, target: f64) -> Result<Self> {
        let unit = AnalyticProfile::isotropic_gaussian(d, 1.0)?;
        let norm = unit.sobolev_h0s_norm(s)?;
        AnalyticProfile::isotropic_gaussian(d, target / norm)
    }

    /// Width-`w` Gaussian with the amplitude calibrated so
    /// `‖ψ‖_{H^{0,s}} = target`.
    pub fn calibrated_gaussian(d: usize, w: f64, s: f64, target: f64) -> Result<Self> {
        let unit = AnalyticProfile::wide_gaussian(d, 1.0, w)?;
        let norm = unit.sobolev_h0s_norm(s)?;
        AnalyticProfile::wide_gaussian(d, target / norm, w)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn eval_position(&self, x: &[f64]) -> Complex64 {
        self.terms.iter().map(|t| t.eval_position(x)).sum()
    }

    pub fn eval_fourier(&self, xi: &[f64]) -> Complex64 {
        self.terms.iter().map(|t| t.eval_fourier(xi)).sum()
    }

    /// Per-axis half-width of a box that captures the profile to 1e-16.
    pub fn support_radius(&self, axis: usize) -> f64 {
        self.terms
            .iter()
            .map(|t| t.support_radius(axis))
            .fold(0.0, f64::max)
    }

    /// `‖⟨x⟩^s ψ‖_{L²}` by tensor Gauss-Legendre quadrature of the closed
    /// form; spectrally accurate for these analytic profiles.
    pub fn sobolev_h0s_norm(&self, s: f64) -> Result<f64> {
        if s < 0.0 {
            return Err(Error::InvalidParams(format!("H^{{0,s}} norm needs s >= 0, got {s}")));
        }
        let n = 96;
        let (nodes, weights) = gauss_legendre(n);
        let radii: Vec<f64> = (0..self.d).map(|a| self.support_radius(a)).collect();
        let mut total = Vec::new();
        let counts = vec![n; self.d];
        let mut idx = vec![0usize; self.d];
        loop {
            let mut x = vec![0.0; self.d];
            let mut w = 1.0;
            for a in 0..self.d {
                x[a] = radii[a] * nodes[idx[a]];
                w *= radii[a] * weights[idx[a]];
            }
            let r2: f64 = x.iter().map(|c| c * c).sum();
            let v = self.eval_position(&x).norm_sqr();
            total.push(w * (1.0 + r2).powf(s) * v);
            // odometer over the tensor indices
            let mut a = 0;
            loop {
                idx[a] += 1;
                if idx[a] < counts[a] {
                    break;
                }
                idx[a] = 0;
                a += 1;
                if a == self.d {
                    return Ok(pairwise_sum(&total).sqrt());
                }
            }
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}
