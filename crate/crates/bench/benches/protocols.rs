use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcomm_bench::{bench_matrix, single_overlap};
use qcomm_core::engine::{acceptance_matrix, simulate};
use qcomm_core::linalg::svd;
use qcomm_core::rank::canonical;
use qcomm_core::zoo::{
    bcw_config, ndet_svd_protocol, qsearch, recursive_intersection, uniform_prepare, QSearchConfig, RecursionConfig,
};
use std::hint::black_box;

fn bench_svd(c: &mut Criterion) {
    let mut g = c.benchmark_group("svd");
    for dim in [8usize, 32, 128] {
        let m = bench_matrix(dim, 1);
        g.bench_with_input(BenchmarkId::from_parameter(dim), &m, |b, m| b.iter(|| svd(black_box(m)).unwrap()));
    }
    g.finish();
}

fn bench_simulate(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    for n in [2usize, 4, 6] {
        let p = ndet_svd_protocol(&canonical::identity(n)).unwrap().protocol;
        g.bench_with_input(BenchmarkId::new("svd-eq-pair", n), &p, |b, p| b.iter(|| simulate(p, 1, 1).unwrap()));
    }
    let p = ndet_svd_protocol(&canonical::common_ones(4)).unwrap().protocol;
    g.bench_function("svd-int4-table", |b| b.iter(|| acceptance_matrix(&p).unwrap()));
    g.finish();
}

fn bench_qsearch(c: &mut Criterion) {
    let mut g = c.benchmark_group("qsearch");
    for n in [16usize, 64, 256] {
        let a = uniform_prepare(n);
        let cfg = QSearchConfig::for_space(n, 0);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                qsearch(&a, &|i| i == n / 2, &cfg.with_seed(seed)).unwrap()
            })
        });
    }
    let (x, y) = single_overlap(64);
    let rcfg = RecursionConfig { base_threshold: 36, ..RecursionConfig::default() };
    g.bench_function("recursive-intersection-64", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            recursive_intersection(&x, &y, &rcfg, &bcw_config(64, seed)).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, bench_svd, bench_simulate, bench_qsearch);
criterion_main!(benches);
