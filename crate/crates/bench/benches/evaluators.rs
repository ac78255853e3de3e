use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use helm_core::fixtures::{mixed_with_jumps, unit_bump};
use helm_core::hexp::{eval_ode, eval_opuc, eval_series};
use helm_core::opuc::{recurrence_eval, VerblunskyChain};
use helm_core::outer::{outer_reconstruct, power_spectrum, DEFAULT_DELTA};
use helm_core::scattering::{linear_grid, sweep};
use helm_core::transfer::Transfer;
use helm_core::{Complex64, Evaluator};

fn hexp_methods(c: &mut Criterion) {
    let p = unit_bump();
    let seg = &p.segments()[0];
    let s = Complex64::new(5.0, 0.0);
    let mut g = c.benchmark_group("hexp");
    for steps in [256usize, 1024, 4096] {
        g.bench_with_input(BenchmarkId::new("ode", steps), &steps, |b, &n| {
            b.iter(|| eval_ode(seg, black_box(s), n).unwrap())
        });
    }
    g.bench_function("series/25x4096", |b| b.iter(|| eval_series(seg, black_box(s), 25, 4096).unwrap()));
    g.bench_function("opuc/100000", |b| b.iter(|| eval_opuc(seg, black_box(s), 100_000).unwrap()));
    g.finish();
}

fn transfer_total(c: &mut Criterion) {
    let p = mixed_with_jumps();
    c.bench_function("transfer/mixed_total", |b| {
        b.iter(|| Transfer::new(&p, Evaluator::Ode { steps: 1024 }).total(black_box(7.0)).unwrap())
    });
}

fn smatrix_sweep(c: &mut Criterion) {
    let p = unit_bump();
    let grid = linear_grid(0.1, 30.0, 128);
    c.bench_function("smatrix/sweep_128", |b| {
        b.iter(|| sweep(&p, black_box(&grid), Evaluator::Ode { steps: 1024 }).unwrap())
    });
}

fn szego(c: &mut Criterion) {
    let coeffs: Vec<f64> = (0..10_000).map(|k| 0.3 * (k as f64 * 0.01).sin()).collect();
    let chain = VerblunskyChain::new(coeffs, 1e-4, Complex64::from_polar(1.0, 0.3)).unwrap();
    c.bench_function("opuc/recurrence_10000", |b| b.iter(|| recurrence_eval(black_box(&chain), 10_000).unwrap()));
}

fn outer(c: &mut Criterion) {
    let p = unit_bump();
    let data = power_spectrum(&p, &linear_grid(-100.0, 100.0, 4097), Evaluator::Ode { steps: 1024 }).unwrap();
    c.bench_function("outer/reconstruct_4097", |b| {
        b.iter(|| outer_reconstruct(&data, black_box(Complex64::new(0.5, 0.5)), DEFAULT_DELTA).unwrap())
    });
}

criterion_group!(benches, hexp_methods, transfer_total, smatrix_sweep, szego, outer);
criterion_main!(benches);
