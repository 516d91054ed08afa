use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nlc_core::bessel::{bessel_j_two_term_asymptotic, bessel_j_with, Method};
use nlc_core::kinematics::{Channel, ElectronIn, LaserParams};
use nlc_core::modes::{mode_u_n, ModeQuantumNumbers};
use nlc_core::xsec::{dsigma_spin_averaged, XSecContext};

fn bessel(c: &mut Criterion) {
    let mut g = c.benchmark_group("bessel");
    g.bench_function("series_j3_2", |b| {
        b.iter(|| bessel_j_with(black_box(3), black_box(2.0), Method::Series).unwrap())
    });
    g.bench_function("miller_j523_511", |b| {
        b.iter(|| bessel_j_with(black_box(523), black_box(511.0), Method::Recurrence).unwrap())
    });
    g.bench_function("miller_j200_100_underflow", |b| {
        b.iter(|| bessel_j_with(black_box(200), black_box(100.0), Method::Recurrence).unwrap())
    });
    g.bench_function("asymptotic_j523", |b| {
        b.iter(|| bessel_j_two_term_asymptotic(black_box(523), black_box(0.977)).unwrap())
    });
    g.finish();
}

fn cross_section(c: &mut Criterion) {
    let mut g = c.benchmark_group("xsec");
    let low = XSecContext::new(
        LaserParams::new(1.5e-2, 3.09e-6).unwrap(),
        ElectronIn::head_on(7000.0, 1).unwrap(),
        Channel::new(1, 3.14, 0).unwrap(),
    )
    .unwrap();
    g.bench_function("spin_averaged_harmonic_1", |b| {
        b.iter(|| dsigma_spin_averaged(black_box(&low), 1).unwrap())
    });
    let high = XSecContext::new(
        LaserParams::new(10.5, 4.43e-9).unwrap(),
        ElectronIn::head_on(7000.0, 1).unwrap(),
        Channel::new(523, 3.14, 0).unwrap(),
    )
    .unwrap();
    g.bench_function("spin_averaged_harmonic_523", |b| {
        b.iter(|| dsigma_spin_averaged(black_box(&high), 1).unwrap())
    });
    g.finish();
}

fn modes(c: &mut Criterion) {
    let laser = LaserParams::new(0.5, 0.9).unwrap();
    let q = ModeQuantumNumbers::new(2, 1, 1, 0.3, 1.0).unwrap();
    c.bench_function("mode_u_n_point", |b| {
        b.iter(|| mode_u_n(black_box(&[0.7, -0.4, 0.9]), &q, &laser).unwrap())
    });
}

criterion_group!(benches, bessel, cross_section, modes);
criterion_main!(benches);
