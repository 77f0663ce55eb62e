use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dwpf_bench::{fixture, restricted_fixture};
use dwpf_core::bethe::{dwpf_bethe, dwpf_product_general, dwpf_twisted};
use dwpf_core::enumeration::{dwpf_brute, dwpf_transfer};
use dwpf_core::izergin::{dwpf_homogeneous, dwpf_restricted_det};
use dwpf_core::numeric::re;

fn general_routes(c: &mut Criterion) {
    let mut group = c.benchmark_group("general");
    for n in [4usize, 8, 10] {
        let p = fixture(n);
        group.bench_with_input(BenchmarkId::new("transfer", n), &p, |b, p| {
            b.iter(|| dwpf_transfer(black_box(p)))
        });
        group.bench_with_input(BenchmarkId::new("bethe", n), &p, |b, p| {
            b.iter(|| dwpf_bethe(black_box(p)))
        });
        group.bench_with_input(BenchmarkId::new("twisted", n), &p, |b, p| {
            b.iter(|| dwpf_twisted(black_box(p)))
        });
        group.bench_with_input(BenchmarkId::new("product", n), &p, |b, p| {
            b.iter(|| dwpf_product_general(black_box(p)))
        });
    }
    let p = fixture(5);
    group.bench_function("brute/5", |b| b.iter(|| dwpf_brute(black_box(&p))));
    group.finish();
}

fn restricted_routes(c: &mut Criterion) {
    let mut group = c.benchmark_group("restricted");
    for n in [4usize, 8] {
        let r = restricted_fixture(n);
        group.bench_with_input(BenchmarkId::new("det", n), &r, |b, r| {
            b.iter(|| dwpf_restricted_det(black_box(r)))
        });
    }
    for n in [3usize, 6] {
        group.bench_with_input(BenchmarkId::new("homogeneous", n), &n, |b, &n| {
            b.iter(|| dwpf_homogeneous(black_box(re(0.3)), black_box(re(-0.4)), n))
        });
    }
    group.finish();
}

criterion_group!(benches, general_routes, restricted_routes);
criterion_main!(benches);
