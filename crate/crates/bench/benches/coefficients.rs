use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kthprice_core::equilibrium::{psi_closed_form, psi_ladder_oracle};
use kthprice_core::{catalan, omega, theta_table, LinearDensity};

fn exact_coefficients(c: &mut Criterion) {
    c.bench_function("catalan 0..=60", |b| {
        b.iter(|| (0..=60).map(|l| catalan(black_box(l))).collect::<Vec<_>>())
    });
    let mut group = c.benchmark_group("theta_omega");
    for n in [10u32, 30, 60] {
        group.bench_with_input(BenchmarkId::new("theta_table", n), &n, |b, &n| {
            b.iter(|| theta_table(black_box(n), n / 2).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("omega_sweep", n), &n, |b, &n| {
            b.iter(|| (3..=n).map(|k| omega(n, k).unwrap()).collect::<Vec<_>>())
        });
    }
    group.finish();
}

fn symbolic_ladder(c: &mut Criterion) {
    let dist = LinearDensity::linear(1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("psi");
    for (n, k) in [(6u32, 4u32), (8, 6), (10, 8)] {
        let id = format!("n{n}_k{k}");
        group.bench_with_input(BenchmarkId::new("ladder_oracle", &id), &(n, k), |b, &(n, k)| {
            b.iter(|| psi_ladder_oracle(&dist, n, k).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("closed_form", &id), &(n, k), |b, &(n, k)| {
            b.iter(|| psi_closed_form(&dist, n, k).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exact_coefficients, symbolic_ladder);
criterion_main!(benches);
