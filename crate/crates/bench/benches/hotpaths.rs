//! Hot-path benchmarks: rotation-row evaluation, block distributions, the
//! closed-form QFI double sum, and one posterior update at production grid
//! size.

use std::f64::consts::FRAC_PI_2;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use qmzi_core::bayes::{bayes_update, uniform_prior};
use qmzi_core::fisher::{cfi, qfi_closed_form};
use qmzi_core::mzi::{full_distribution, likelihood_grid, TwoModeInput};
use qmzi_core::wigner::PreparedRow;
use qmzi_core::{q_cat, q_coherent, CatParity, DeformationParameter};

fn fig_input(n_max: usize) -> TwoModeInput {
    let q = DeformationParameter::new(0.9).unwrap();
    let a = q_coherent(Complex64::new(1.8, 0.0), q, n_max).unwrap();
    let b = q_cat(Complex64::new(1.6, 0.0), q, CatParity::Even, n_max).unwrap();
    TwoModeInput::new(a, b).unwrap()
}

fn bench_wigner_row(c: &mut Criterion) {
    let row = PreparedRow::new(60, 10).unwrap();
    c.bench_function("wigner_row_eval_two_j_60", |b| {
        b.iter(|| row.eval(black_box(1.1)))
    });
    c.bench_function("wigner_row_prepare_two_j_60", |b| {
        b.iter(|| PreparedRow::new(black_box(60), black_box(10)).unwrap())
    });
}

fn bench_full_distribution(c: &mut Criterion) {
    let input = fig_input(30);
    c.bench_function("full_distribution_n_max_30", |b| {
        b.iter(|| full_distribution(black_box(FRAC_PI_2), &input, 60).unwrap())
    });
}

fn bench_fisher(c: &mut Criterion) {
    let input = fig_input(30);
    c.bench_function("qfi_closed_form_n_max_30", |b| {
        b.iter(|| qfi_closed_form(black_box(&input)))
    });
    c.bench_function("cfi_n_max_30", |b| {
        b.iter(|| cfi(black_box(&input), black_box(FRAC_PI_2)).unwrap())
    });
}

fn bench_bayes_update(c: &mut Criterion) {
    let input = fig_input(20);
    let prior = uniform_prior(2048).unwrap();
    c.bench_function("bayes_update_grid_2048", |b| {
        b.iter(|| bayes_update(&prior, black_box((3, 2)), &input).unwrap())
    });
    let phis: Vec<f64> = prior.grid().to_vec();
    c.bench_function("likelihood_grid_2048", |b| {
        b.iter(|| likelihood_grid(3, 2, black_box(&phis), &input).unwrap())
    });
}

criterion_group!(
    benches,
    bench_wigner_row,
    bench_full_distribution,
    bench_fisher,
    bench_bayes_update
);
criterion_main!(benches);
