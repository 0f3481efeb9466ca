use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use visco_bench::{fixture, fixture_params};
use visco_core::diagnostics::{effective_flux, energy_report};
use visco_core::dynamics::{rhs, Integrator};

const SIZES: [usize; 3] = [64, 128, 256];

fn fft_round_trip(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_round_trip");
    for n in SIZES {
        let s = fixture(n);
        let g = s.grid().clone();
        let values = s.f.c[0].values.clone();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| g.inverse(&g.forward(black_box(&values))))
        });
    }
    group.finish();
}

fn right_hand_side(c: &mut Criterion) {
    let mut group = c.benchmark_group("rhs");
    let params = fixture_params();
    for n in SIZES {
        let s = fixture(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| rhs(black_box(&s), &params))
        });
    }
    group.finish();
}

fn rk3_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    group.sample_size(20);
    for n in SIZES {
        let s = fixture(n);
        let integ = Integrator::new(s.grid(), fixture_params(), 1e-3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| integ.step(black_box(&s)).unwrap())
        });
    }
    group.finish();
}

fn diagnostics(c: &mut Criterion) {
    let mut group = c.benchmark_group("diagnostics");
    let s = fixture(128);
    let params = fixture_params();
    group.bench_function("energy_report/128", |b| {
        b.iter(|| energy_report(black_box(&s), &params))
    });
    group.bench_function("effective_flux/128", |b| {
        b.iter(|| effective_flux(black_box(&s)))
    });
    group.finish();
}

criterion_group!(
    benches,
    fft_round_trip,
    right_hand_side,
    rk3_step,
    diagnostics
);
criterion_main!(benches);
