use criterion::{criterion_group, criterion_main, Criterion};
use risop_core::specfun::{bessel_j0, bessel_k0, hyp_1f2, kummer_1f1, ln_gamma, pcf_d, reg_lower_gamma};
use std::hint::black_box;

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("specfun");
    g.bench_function("ln_gamma", |b| b.iter(|| ln_gamma(black_box(17.3))));
    g.bench_function("reg_lower_gamma", |b| b.iter(|| reg_lower_gamma(black_box(6.4), black_box(5.1))));
    g.bench_function("bessel_j0/small", |b| b.iter(|| bessel_j0(black_box(3.7))));
    g.bench_function("bessel_j0/large", |b| b.iter(|| bessel_j0(black_box(123.4))));
    g.bench_function("bessel_k0", |b| b.iter(|| bessel_k0(black_box(2.2))));
    g.bench_function("kummer_1f1", |b| b.iter(|| kummer_1f1(black_box(2.5), black_box(4.0), black_box(-12.0))));
    g.bench_function("hyp_1f2", |b| {
        b.iter(|| hyp_1f2(black_box(1.5), black_box(2.0), black_box(3.5), black_box(-20.0)))
    });
    g.bench_function("pcf_d", |b| b.iter(|| pcf_d(black_box(-6.3), black_box(2.4))));
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
