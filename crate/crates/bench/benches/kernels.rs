use criterion::{criterion_group, criterion_main, Criterion};
use qkz_core::hyperelliptic::{check_bilinear, elliptic_ke, HyperellipticCurve};
use qkz_core::pairing::{pairing, PairingSpec, Poly};
use qkz_core::poly::mpoly::{check_polynomiality, MSpec, Strategy};
use qkz_core::qkz::{residual_exchange, two_point_level4, Gauge};
use qkz_core::quantum_group::{build_generators, build_hrxxz, invariance_residual, HamiltonianSpec};
use qkz_core::rmatrix::{r0, r_matrix, Anisotropy};
use qkz_core::special_functions::chi;
use qkz_core::C64;
use std::hint::black_box;

fn rmatrix(c: &mut Criterion) {
    let a = Anisotropy::new(0.3).unwrap();
    c.bench_function("r0", |b| b.iter(|| r0(black_box(C64::new(0.7, 0.2)), 0.3).unwrap()));
    c.bench_function("r_matrix", |b| b.iter(|| r_matrix(black_box(C64::new(0.7, 0.0)), &a).unwrap()));
    c.bench_function("chi", |b| b.iter(|| chi(black_box(C64::new(0.4, 0.0)), 0.3).unwrap()));
}

fn chains(c: &mut Criterion) {
    let a = Anisotropy::new(0.3).unwrap();
    c.bench_function("invariance_n6", |b| {
        b.iter(|| {
            let g = build_generators(6, &a).unwrap();
            let h = build_hrxxz(&HamiltonianSpec::open(6, &a)).unwrap();
            invariance_residual(&h, &g).unwrap()
        })
    });
}

fn pairings(c: &mut Criterion) {
    let spec = PairingSpec::real(&[0.3, -0.3, 0.8, -0.8], 0.3).unwrap();
    c.bench_function("pairing_n2", |b| b.iter(|| pairing(&Poly::monomial(0), &Poly::monomial(1), black_box(&spec)).unwrap()));
    let curve = HyperellipticCurve::real(&[-2.0, -1.0, 0.5, 1.5, 3.0, 4.0]).unwrap();
    c.bench_function("bilinear_genus2", |b| b.iter(|| check_bilinear(black_box(&curve), 1e-8).unwrap()));
    c.bench_function("agm", |b| b.iter(|| elliptic_ke(black_box(0.7)).unwrap()));
}

fn qkz(c: &mut Criterion) {
    let a = Anisotropy::new(0.3).unwrap();
    let g = two_point_level4(&a, Gauge::Hatted).unwrap();
    let pts = [C64::new(0.3, -0.2), C64::new(-0.4, 0.1)];
    c.bench_function("n1_exchange_residual", |b| b.iter(|| residual_exchange(&g, 0, black_box(&pts), &[], &a).unwrap()));
}

fn polynomiality(c: &mut Criterion) {
    let mut g = c.benchmark_group("mpoly");
    g.sample_size(10);
    g.bench_function("certify_2_2_symbolic", |b| b.iter(|| check_polynomiality(&MSpec::new(2, 2), Strategy::SymbolicCancellation, 7).unwrap()));
    g.finish();
}

criterion_group!(benches, rmatrix, chains, pairings, qkz, polynomiality);
criterion_main!(benches);
