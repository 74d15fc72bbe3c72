use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use bwcurve::curve::k_norm;
use bwcurve::diophantine::scan;
use bwcurve::lower::vanishing_poly;
use bwcurve::upper::beta_table;
use bwcurve::Cone;
use bwcurve_bench::{context, dense_poly, golden, planar};

fn beta(c: &mut Criterion) {
    let mut g = c.benchmark_group("beta_table");
    let ctx = context(256);
    for n in [8u32, 16, 32] {
        g.bench_with_input(BenchmarkId::new("golden", n), &n, |b, &n| b.iter(|| beta_table(black_box(n), &golden(), &ctx)));
    }
    for n in [4u32, 8] {
        g.bench_with_input(BenchmarkId::new("planar", n), &n, |b, &n| b.iter(|| beta_table(black_box(n), &planar(), &ctx)));
    }
    g.finish();
}

fn scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    let ctx = context(256);
    g.bench_function("golden_Q10000", |b| b.iter(|| scan(&golden(), black_box(10_000), Cone::All, &ctx)));
    g.bench_function("planar_Q100", |b| b.iter(|| scan(&planar(), black_box(100), Cone::All, &ctx)));
    g.finish();
}

fn curve_norm(c: &mut Criterion) {
    let mut g = c.benchmark_group("k_norm");
    g.sample_size(10);
    let ctx = context(256);
    let x = golden();
    let dense = dense_poly(6, 1);
    let vanishing = vanishing_poly(6, &x, &ctx).expect("golden is independent");
    for m in [1usize << 10, 1 << 12] {
        g.bench_with_input(BenchmarkId::new("dense_n6", m), &m, |b, &m| b.iter(|| k_norm(&dense, &x, m, &ctx)));
        g.bench_with_input(BenchmarkId::new("vanishing_n6", m), &m, |b, &m| b.iter(|| k_norm(&vanishing, &x, m, &ctx)));
    }
    g.finish();
}

criterion_group!(benches, beta, scans, curve_norm);
criterion_main!(benches);
