//! Periodic spatial/spectral discretization, discrete Fourier transforms and
//! the norms used by the rest of the crate.
//!
//! Transforms are calibrated to the continuum convention
//! `ψ̂(ξ) = (2π)^{-d/2} ∫ ψ(x) e^{-ixξ} dx`, so coefficients of a
//! well-resolved field agree with the analytic transform and Parseval holds
//! with the dual lattice spacing `π/L` as measure.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Relative spectral mass allowed in the top octave of frequencies before a
/// field is reported as unresolved.
pub const TAIL_TOL: f64 = 1e-10;

/// Uniform periodic lattice on the box `∏_j [-L_j, L_j)` with its dual
/// frequency lattice `ξ_k = π k / L_j`, `k ∈ [-N_j/2, N_j/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    half_length: Vec<f64>,
    n_points: Vec<usize>,
}

impl Grid {
    pub fn new(half_length: &[f64], n_points: &[usize]) -> Result<Self> {
        let d = half_length.len();
        if d == 0 || d > 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 1..=3, got {d}")));
        }
        if n_points.len() != d {
            return Err(Error::InvalidGrid("half_length/n_points length mismatch".into()));
        }
        for (&l, &n) in half_length.iter().zip(n_points) {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::InvalidGrid(format!("half length must be positive, got {l}")));
            }
            if n < 8 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!("axis count must be even and >= 8, got {n}")));
            }
        }
        Ok(Grid {
            half_length: half_length.to_vec(),
            n_points: n_points.to_vec(),
        })
    }

    /// Cubic grid: the same box half-width and sample count on every axis.
    pub fn cubic(d: usize, half_length: f64, n: usize) -> Result<Self> {
        Grid::new(&vec![half_length; d], &vec![n; d])
    }

    pub fn dim(&self) -> usize {
        self.half_length.len()
    }

    pub fn half_length(&self, axis: usize) -> f64 {
        self.half_length[axis]
    }

    pub fn n_points(&self, axis: usize) -> usize {
        self.n_points[axis]
    }

    pub fn shape(&self) -> &[usize] {
        &self.n_points
    }

    /// Total number of lattice sites.
    pub fn len(&self) -> usize {
        self.n_points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice spacing `2 L_j / N_j` on one axis.
    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_length[axis] / self.n_points[axis] as f64
    }

    /// Volume element `∏_j spacing_j`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Dual lattice spacing `π / L_j`.
    pub fn freq_spacing(&self, axis: usize) -> f64 {
        std::f64::consts::PI / self.half_length[axis]
    }

    /// Dual volume element.
    pub fn freq_cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.freq_spacing(a)).product()
    }

    /// Position of storage index `i` on one axis: `x_i = -L + i h`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        -self.half_length[axis] + i as f64 * self.spacing(axis)
    }

    /// Frequency of storage index `i` on one axis, in FFT storage order
    /// (non-negative frequencies first, then negative ones).
    pub fn freq(&self, axis: usize, i: usize) -> f64 {
        let n = self.n_points[axis];
        let k = if i < n / 2 { i as isize } else { i as isize - n as isize };
        k as f64 * self.freq_spacing(axis)
    }

    /// Frequencies along one axis in storage order.
    pub fn freq_lattice(&self, axis: usize) -> Vec<f64> {
        (0..self.n_points[axis]).map(|i| self.freq(axis, i)).collect()
    }

    /// Decompose a flat row-major index (x1 slowest) into per-axis indices.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let d = self.dim();
        let mut idx = vec![0usize; d];
        for a in (0..d).rev() {
            idx[a] = flat % self.n_points[a];
            flat /= self.n_points[a];
        }
        idx
    }

    /// Position vector of a flat index.
    pub fn position(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.coord(a, i))
            .collect()
    }

    /// Frequency vector of a flat index.
    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.freq(a, i))
            .collect()
    }

    /// Sample a complex-valued function of position onto the lattice.
    pub fn sample(&self, time: f64, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Field {
        let values = map_points(self, |x| f(x), CoordKind::Position);
        Field {
            grid: self.clone(),
            time,
            values,
        }
    }

    /// Sample a complex-valued function of frequency onto the dual lattice.
    pub fn sample_spectral(&self, time: f64, f: impl Fn(&[f64]) -> Complex64 + Sync) -> SpectralField {
        let coeffs = map_points(self, |xi| f(xi), CoordKind::Frequency);
        SpectralField {
            grid: self.clone(),
            time,
            coeffs,
        }
    }
}

pub(crate) enum CoordKind {
    Position,
    Frequency,
}

/// Evaluate `f` at every lattice point (position or frequency space),
/// in parallel, preserving storage order.
pub(crate) fn map_points(
    grid: &Grid,
    f: impl Fn(&[f64]) -> Complex64 + Sync,
    kind: CoordKind,
) -> Vec<Complex64> {
    use rayon::prelude::*;
    (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let p = match kind {
                CoordKind::Position => grid.position(flat),
                CoordKind::Frequency => grid.frequency(flat),
            };
            f(&p)
        })
        .collect()
}

/// Complex field sampled on a [`Grid`] at a model time.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Grid,
    pub time: f64,
    pub values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid, time: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if !time.is_finite() {
            return Err(Error::InvalidGrid(format!("time must be finite, got {time}")));
        }
        Ok(Field { grid, time, values })
    }

    pub fn zeros(grid: Grid, time: f64) -> Self {
        let n = grid.len();
        Field {
            grid,
            time,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Discrete L2 norm, `(Σ |f|^2 ∏h)^{1/2}` with pairwise summation.
    pub fn l2_norm(&self) -> f64 {
        lp_norm(self, 2.0).expect("p = 2 is always valid")
    }

    /// Pointwise difference, keeping the time stamp of `self`.
    pub fn sub(&self, other: &Field) -> Field {
        assert_eq!(self.grid, other.grid, "field difference requires matching grids");
        Field {
            grid: self.grid.clone(),
            time: self.time,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Fourier coefficients indexed by the dual lattice, continuum-calibrated.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: Grid,
    pub time: f64,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// Discrete L2 norm with the dual-lattice measure; equals the field's
    /// L2 norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        let dv = self.grid.freq_cell_volume();
        (pairwise_sum_by(&self.coeffs, |c| c.norm_sqr()) * dv).sqrt()
    }

    /// Relative spectral mass in the top octave of frequencies (any axis
    /// index with `|k| >= N/4`). Used as the resolution guard.
    pub fn tail_fraction(&self) -> f64 {
        let g = &self.grid;
        let mut tail = 0.0f64;
        let mut total = 0.0f64;
        for (flat, c) in self.coeffs.iter().enumerate() {
            let m = c.norm_sqr();
            total += m;
            let idx = g.unravel(flat);
            let in_tail = idx.iter().enumerate().any(|(a, &i)| {
                let n = g.n_points(a) as isize;
                let k = if (i as isize) < n / 2 { i as isize } else { i as isize - n };
                k.unsigned_abs() >= (n as usize) / 4
            });
            if in_tail {
                tail += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

/// Pairwise (cascade) summation; deterministic and accurate for long sums.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn pairwise_sum_by(values: &[Complex64], f: impl Fn(&Complex64) -> f64 + Copy) -> f64 {
    fn go(v: &[Complex64], f: impl Fn(&Complex64) -> f64 + Copy) -> f64 {
        if v.len() <= 32 {
            return v.iter().map(f).sum();
        }
        let mid = v.len() / 2;
        go(&v[..mid], f) + go(&v[mid..], f)
    }
    go(values, f)
}

/// Apply 1d FFTs along `axis` of a row-major array (x1 slowest).
fn fft_axis(values: &mut [Complex64], shape: &[usize], axis: usize, forward: bool) {
    let n = shape[axis];
    let mut planner = FftPlanner::new();
    let fft = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };

    // stride between consecutive entries along `axis`, and number of lines
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let inner = stride;
    let mut line = vec![Complex64::new(0.0, 0.0); n];

    for o in 0..outer {
        let base_o = o * n * stride;
        for i in 0..inner {
            let base = base_o + i;
            for k in 0..n {
                line[k] = values[base + k * stride];
            }
            fft.process(&mut line);
            for k in 0..n {
                values[base + k * stride] = line[k];
            }
        }
    }
}

/// Forward transform, calibrated to `(2π)^{-d/2} ∫ f e^{-ixξ} dx`.
///
/// With `x_j = -L + j h` and `ξ_k = πk/L` the continuum Riemann sum reduces
/// to the plain DFT times `h (2π)^{-1/2} (-1)^j` per axis.
pub fn forward_dft(f: &Field) -> SpectralField {
    let g = &f.grid;
    let d = g.dim();
    let mut values = f.values.clone();
    for axis in 0..d {
        fft_axis(&mut values, g.shape(), axis, true);
    }
    let scale: f64 = (0..d)
        .map(|a| g.spacing(a) / (2.0 * std::f64::consts::PI).sqrt())
        .product();
    for (flat, v) in values.iter_mut().enumerate() {
        let idx = g.unravel(flat);
        let parity: usize = idx.iter().sum();
        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
        *v *= scale * sign;
    }
    SpectralField {
        grid: g.clone(),
        time: f.time,
        coeffs: values,
    }
}

/// Inverse of [`forward_dft`] up to round-off.
pub fn inverse_dft(s: &SpectralField) -> Field {
    let g = &s.grid;
    let d = g.dim();
    let mut values: Vec<Complex64> = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(flat, c)| {
            let idx = g.unravel(flat);
            let parity: usize = idx.iter().sum();
            if parity % 2 == 0 {
                *c
            } else {
                -*c
            }
        })
        .collect();
    for axis in 0..d {
        fft_axis(&mut values, g.shape(), axis, false);
    }
    let scale: f64 = (0..d)
        .map(|a| g.freq_spacing(a) / (2.0 * std::f64::consts::PI).sqrt())
        .product();
    for v in values.iter_mut() {
        *v *= scale;
    }
    Field {
        grid: g.clone(),
        time: s.time,
        values,
    }
}

/// Riemann-sum L^p norm; `p = f64::INFINITY` gives the max norm.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if p.is_infinite() {
        return Ok(f
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let dv = f.grid.cell_volume();
    if (p - 2.0).abs() < 1e-15 {
        return Ok((pairwise_sum_by(&f.values, |c| c.norm_sqr()) * dv).sqrt());
    }
    let powers: Vec<f64> = f.values.iter().map(|v| v.norm().powf(p)).collect();
    Ok((pairwise_sum(&powers) * dv).powf(1.0 / p))
}

/// Apply a real spectral multiplier `m(ξ)` and return the transformed field.
pub fn apply_multiplier(f: &Field, m: impl Fn(&[f64]) -> f64 + Sync) -> Field {
    let mut s = forward_dft(f);
    let g = s.grid.clone();
    for (flat, c) in s.coeffs.iter_mut().enumerate() {
        *c *= m(&g.frequency(flat));
    }
    inverse_dft(&s)
}

fn warn_if_unresolved(f: &Field, what: &str) {
    let frac = forward_dft(f).tail_fraction();
    if frac > TAIL_TOL {
        log::warn!("{what}: spectral tail mass {frac:.3e} exceeds {TAIL_TOL:.1e}; result unreliable");
    }
}

/// `‖⟨∂_{x1}⟩^s f‖_{L^p}`: the Bessel multiplier `(1+ξ1²)^{s/2}` along the
/// anisotropy axis followed by an L^p norm.
pub fn weighted_x1_norm(f: &Field, s: f64, p: f64) -> Result<f64> {
    if !(p >= 1.0) && !p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    warn_if_unresolved(f, "weighted_x1_norm");
    if s == 0.0 {
        return lp_norm(f, p);
    }
    let weighted = apply_multiplier(f, |xi| (1.0 + xi[0] * xi[0]).powf(s / 2.0));
    lp_norm(&weighted, p)
}

/// `‖⟨x⟩^s ⟨∇⟩^m f‖_{L²}`: full-gradient Bessel multiplier, then the
/// position-space weight.
pub fn weighted_position_norm(f: &Field, m: f64, s: f64) -> Result<f64> {
    warn_if_unresolved(f, "weighted_position_norm");
    let smoothed = if m == 0.0 {
        f.clone()
    } else {
        apply_multiplier(f, |xi| {
            let q: f64 = xi.iter().map(|x| x * x).sum();
            (1.0 + q).powf(m / 2.0)
        })
    };
    let g = &smoothed.grid;
    let weighted_vals: Vec<Complex64> = smoothed
        .values
        .iter()
        .enumerate()
        .map(|(flat, v)| {
            let x = g.position(flat);
            let q: f64 = x.iter().map(|c| c * c).sum();
            v * (1.0 + q).powf(s / 2.0)
        })
        .collect();
    let wf = Field {
        grid: g.clone(),
        time: smoothed.time,
        values: weighted_vals,
    };
    lp_norm(&wf, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn gaussian_1d(l: f64, n: usize) -> Field {
        let g = Grid::cubic(1, l, n).unwrap();
        g.sample(0.0, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0))
    }

    #[test]
    fn dc_only_spectrum_of_constant() {
        let g = Grid::cubic(1, std::f64::consts::PI, 16).unwrap();
        let f = g.sample(0.0, |_| Complex64::new(1.0, 0.0));
        let s = forward_dft(&f);
        for (flat, c) in s.coeffs.iter().enumerate() {
            if flat == 0 {
                assert!(c.norm() > 1.0);
            } else {
                assert!(c.norm() < 1e-12, "mode {flat} should vanish, got {c}");
            }
        }
    }

    #[test]
    fn pure_mode_is_single_coefficient() {
        let g = Grid::cubic(1, std::f64::consts::PI, 16).unwrap();
        let f = g.sample(0.0, |x| Complex64::new(0.0, x[0]).exp());
        let s = forward_dft(&f);
        let nonzero: Vec<usize> = (0..s.coeffs.len())
            .filter(|&i| s.coeffs[i].norm() > 1e-10)
            .collect();
        assert_eq!(nonzero.len(), 1);
        assert_relative_eq!(g.freq(0, nonzero[0]), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // F[e^{-x²/2}](ξ) = e^{-ξ²/2} under the unitary convention
        let f = gaussian_1d(20.0, 512);
        let s = forward_dft(&f);
        for flat in 0..s.coeffs.len() {
            let xi = s.grid.freq(0, flat);
            let expected = (-xi * xi / 2.0).exp();
            assert!(
                (s.coeffs[flat].re - expected).abs() < 1e-10
                    && s.coeffs[flat].im.abs() < 1e-10,
                "mismatch at xi = {xi}"
            );
        }
    }

    #[test]
    fn round_trip_identity_on_random_field() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = Grid::new(&[3.0, 5.0], &[32, 16]).unwrap();
        let f = Field::new(
            g.clone(),
            0.0,
            (0..g.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let back = inverse_dft(&forward_dft(&f));
        let max_err = f
            .values
            .iter()
            .zip(&back.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-12, "round trip error {max_err}");
    }

    #[test]
    fn zero_spectrum_gives_zero_field() {
        let g = Grid::cubic(1, 1.0, 8).unwrap();
        let s = SpectralField {
            grid: g.clone(),
            time: 0.0,
            coeffs: vec![Complex64::new(0.0, 0.0); g.len()],
        };
        let f = inverse_dft(&s);
        assert!(f.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn single_mode_synthesis() {
        // unit coefficient at ξ=2 -> (2π)^{-1/2} Δξ e^{2ix}
        let g = Grid::cubic(1, std::f64::consts::PI, 32).unwrap();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); g.len()];
        let k = (0..g.len()).find(|&i| (g.freq(0, i) - 2.0).abs() < 1e-12).unwrap();
        coeffs[k] = Complex64::new(1.0, 0.0);
        let f = inverse_dft(&SpectralField { grid: g.clone(), time: 0.0, coeffs });
        let norm = g.freq_spacing(0) / (2.0 * std::f64::consts::PI).sqrt();
        for (flat, v) in f.values.iter().enumerate() {
            let x = g.coord(0, flat);
            let expected = Complex64::new(0.0, 2.0 * x).exp() * norm;
            assert!((v - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_holds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g = Grid::new(&[2.0, 3.0, 1.5], &[16, 8, 8]).unwrap();
        let f = Field::new(
            g.clone(),
            0.0,
            (0..g.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let s = forward_dft(&f);
        assert_relative_eq!(s.l2_norm(), f.l2_norm(), max_relative = 1e-12);
    }

    #[test]
    fn l1_norm_of_indicator_box() {
        let g = Grid::cubic(1, 2.0, 64).unwrap();
        let f = g.sample(0.0, |x| {
            if x[0].abs() < 1.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let n = lp_norm(&f, 1.0).unwrap();
        assert!((n - 2.0).abs() <= g.spacing(0) + 1e-12, "L1 = {n}");
    }

    #[test]
    fn l2_norm_of_gaussian() {
        // ∫ e^{-x²} dx = √π, so ‖e^{-x²/2}‖₂ = π^{1/4}
        let f = gaussian_1d(20.0, 512);
        assert_relative_eq!(
            lp_norm(&f, 2.0).unwrap(),
            std::f64::consts::PI.powf(0.25),
            epsilon = 1e-8
        );
    }

    #[test]
    fn linf_norm_is_max() {
        let f = gaussian_1d(10.0, 64);
        let max = f.values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), max);
    }

    #[test]
    fn rejects_sub_unit_exponent() {
        let f = gaussian_1d(10.0, 64);
        assert!(lp_norm(&f, 0.5).is_err());
        assert!(weighted_x1_norm(&f, 1.0, 0.0).is_err());
    }

    #[test]
    fn weighted_x1_s0_is_plain_norm() {
        let f = gaussian_1d(20.0, 256);
        assert_eq!(
            weighted_x1_norm(&f, 0.0, 2.0).unwrap(),
            lp_norm(&f, 2.0).unwrap()
        );
    }

    #[test]
    fn weighted_x1_pure_mode() {
        // ⟨∂⟩ e^{ix} = √2 e^{ix}
        let g = Grid::cubic(1, std::f64::consts::PI, 64).unwrap();
        let f = g.sample(0.0, |x| Complex64::new(0.0, x[0]).exp());
        let w = weighted_x1_norm(&f, 1.0, 2.0).unwrap();
        let base = lp_norm(&f, 2.0).unwrap();
        assert_relative_eq!(w, std::f64::consts::SQRT_2 * base, epsilon = 1e-10);
    }

    #[test]
    fn weighted_x1_gaussian_second_order() {
        // ‖(1-∂²)e^{-x²/2}‖₂ via the analytic derivative (1 - (x²-1))e^{-x²/2}
        let f = gaussian_1d(20.0, 512);
        let w = weighted_x1_norm(&f, 2.0, 2.0).unwrap();
        let g = f.grid.clone();
        let direct = g.sample(0.0, |x| {
            let x2 = x[0] * x[0];
            Complex64::new((2.0 - x2) * (-x2 / 2.0).exp(), 0.0)
        });
        assert_relative_eq!(w, lp_norm(&direct, 2.0).unwrap(), epsilon = 1e-8);
    }

    #[test]
    fn weighted_position_norm_cases() {
        let f = gaussian_1d(20.0, 512);
        // m=0, s=0 -> plain L²
        assert_relative_eq!(
            weighted_position_norm(&f, 0.0, 0.0).unwrap(),
            lp_norm(&f, 2.0).unwrap(),
            epsilon = 1e-13
        );
        // ∫ (1+x²) e^{-x²} dx = (3/2)√π
        let expected = (1.5 * std::f64::consts::PI.sqrt()).sqrt();
        assert_relative_eq!(weighted_position_norm(&f, 0.0, 1.0).unwrap(), expected, epsilon = 1e-8);
    }

    #[test]
    fn weighted_position_vs_quadrature_for_smooth_profile() {
        // ⟨∇⟩ of a Gaussian against brute-force quadrature of the closed form:
        // F⁻¹[(1+ξ²)^{1/2} e^{-ξ²/2}] evaluated by direct Riemann sum.
        let f = gaussian_1d(20.0, 512);
        let w = weighted_position_norm(&f, 1.0, 0.0).unwrap();
        // ‖⟨∇⟩ψ‖₂² = ∫ (1+ξ²)|ψ̂|² dξ = ∫ (1+ξ²) e^{-ξ²} dξ = (3/2)√π
        let expected = (1.5 * std::f64::consts::PI.sqrt()).sqrt();
        assert_relative_eq!(w, expected, epsilon = 1e-8);
    }

    #[test]
    fn norm_monotone_in_s() {
        let f = gaussian_1d(20.0, 256);
        let mut prev = 0.0;
        for s in [0.0, 0.5, 1.0, 1.7, 2.4] {
            let w = weighted_x1_norm(&f, s, 2.0).unwrap();
            assert!(w >= prev);
            prev = w;
        }
    }

    #[test]
    fn grid_refinement_consistency() {
        let coarse = gaussian_1d(20.0, 256);
        let fine = gaussian_1d(20.0, 512);
        for (a, b) in [
            (lp_norm(&coarse, 2.0).unwrap(), lp_norm(&fine, 2.0).unwrap()),
            (
                weighted_x1_norm(&coarse, 1.0, 2.0).unwrap(),
                weighted_x1_norm(&fine, 1.0, 2.0).unwrap(),
            ),
        ] {
            assert!((a - b).abs() / b < 1e-8, "refinement changed norm {a} -> {b}");
        }
    }

    #[test]
    fn tail_fraction_flags_rough_field() {
        let g = Grid::cubic(1, 10.0, 64).unwrap();
        let smooth = g.sample(0.0, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0));
        assert!(forward_dft(&smooth).tail_fraction() < TAIL_TOL);
        let rough = g.sample(0.0, |x| Complex64::new(0.0, 14.0 * x[0]).exp());
        assert!(forward_dft(&rough).tail_fraction() > 0.5);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::cubic(1, 1.0, 7).is_err());
        assert!(Grid::cubic(1, 1.0, 6).is_err());
        assert!(Grid::cubic(1, -1.0, 16).is_err());
        assert!(Grid::cubic(4, 1.0, 16).is_err());
        let g = Grid::cubic(2, 3.0, 16).unwrap();
        // spacing · N = 2L exactly
        assert_eq!(g.spacing(0) * 16.0, 6.0);
        // dual lattice symmetric about 0 except the Nyquist mode
        let freqs = g.freq_lattice(0);
        for &xi in &freqs {
            if (xi - freqs.iter().cloned().fold(f64::INFINITY, f64::min)).abs() > 1e-12 {
                assert!(freqs.iter().any(|&o| (o + xi).abs() < 1e-12));
            }
        }
    }
}
