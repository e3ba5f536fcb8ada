//! Microbenchmarks for the hot kernels: the DFT pair, one propagator
//! application, one split-step, the cubic stationary-point solve, and the
//! oscillatory kernel quadrature.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use num_complex::Complex64;
use std::hint::black_box;

use aniso4nls::asymptotics::stationary_point;
use aniso4nls::dispersion::{propagate, ModelParams};
use aniso4nls::grid::{forward_dft, inverse_dft, Field, Grid};
use aniso4nls::oscillatory::{kernel_integral, Amplitude};
use aniso4nls::solver::step_strang;

fn gaussian_field(g: &Grid) -> Field {
    g.sample(0.0, |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        Complex64::new((-r2 / 2.0).exp(), 0.0)
    })
}

fn bench_dft(c: &mut Criterion) {
    let mut group = c.benchmark_group("dft");
    for (label, g) in [
        ("1d_4096", Grid::cubic(1, 32.0, 4096).unwrap()),
        ("2d_256", Grid::cubic(2, 32.0, 256).unwrap()),
        ("3d_48", Grid::cubic(3, 32.0, 48).unwrap()),
    ] {
        let f = gaussian_field(&g);
        let s = forward_dft(&f);
        group.bench_function(format!("forward_{label}"), |b| {
            b.iter(|| forward_dft(black_box(&f)))
        });
        group.bench_function(format!("inverse_{label}"), |b| {
            b.iter(|| inverse_dft(black_box(&s)))
        });
    }
    group.finish();
}

fn bench_propagate(c: &mut Criterion) {
    let m = ModelParams::canonical(1.0, 3.0).unwrap();
    let g = Grid::cubic(2, 32.0, 256).unwrap();
    let f = gaussian_field(&g);
    c.bench_function("propagate_2d_256", |b| {
        b.iter(|| propagate(black_box(&f), 0.01, &m))
    });
    c.bench_function("strang_step_2d_256", |b| {
        b.iter_batched(
            || f.clone(),
            |u| step_strang(&u, 0.01, &m),
            BatchSize::LargeInput,
        )
    });
}

fn bench_stationary_point(c: &mut Criterion) {
    // one solve per decade of x1/t across the full sweep range
    let rays: Vec<f64> = (-6..=6).map(|k| 10f64.powi(k)).collect();
    c.bench_function("stationary_point_sweep", |b| {
        b.iter(|| {
            for &r in &rays {
                black_box(stationary_point(1.0, black_box(&[r])).unwrap());
            }
        })
    });
}

fn bench_kernel_integral(c: &mut Criterion) {
    let amp = Amplitude::gaussian(1.0, 1.0);
    c.bench_function("kernel_integral_t50", |b| {
        b.iter(|| kernel_integral(50.0, black_box(25.0), &amp).unwrap())
    });
}

criterion_group!(
    benches,
    bench_dft,
    bench_propagate,
    bench_stationary_point,
    bench_kernel_integral
);
criterion_main!(benches);
