use qkz_core::quantum_group::*;
use qkz_core::rmatrix::Anisotropy;
use qkz_core::tensor_core::{commutator, ChainOperator};
use qkz_core::C64;
use std::f64::consts::PI;

#[test]
fn cartan_relations() {
    for nu in [0.1, 0.3, 0.7] {
        for n in 1..=6 {
            for conv in QConvention::ALL {
                let g = build_generators_with(n, nu, conv).unwrap();
                let p = commutator(&g.s3, &g.splus).unwrap();
                let m = commutator(&g.s3, &g.sminus).unwrap();
                assert!((p.entries - g.splus.entries.clone() * C64::new(2.0, 0.0)).norm() < 1e-12);
                assert!((m.entries + g.sminus.entries.clone() * C64::new(2.0, 0.0)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn undeformed_limit() {
    // q = 1 in the plain convention at ν → integer is outside (0,1); use the Shifted
    // convention angle 2π(ν+1) with ν = 0 via the dressing directly
    let g = build_generators_with(3, 1e-300, QConvention::Plain).unwrap();
    let mut sum = ChainOperator::zeros(3).unwrap();
    for k in 1..=3 {
        sum = sum.add(&qkz_core::tensor_core::embed(&qkz_core::tensor_core::sigma_plus(), k, 3).unwrap()).unwrap();
    }
    assert!((g.splus.entries - sum.entries).norm() < 1e-14);
}

#[test]
fn calibration_selects_minus_i_sin() {
    for nu in [0.1, 0.3, 0.7] {
        let a = Anisotropy::new(nu).unwrap();
        for n in 2..=6 {
            let rep = calibrate_invariance(n, &a, &default_candidates(nu), 1e-10).unwrap();
            assert!(!rep.accepted.is_empty(), "none accepted at N={n}, nu={nu}");
            for c in &rep.candidates {
                let ok = c.res_splus.max(c.res_sminus).max(c.res_s3) <= 1e-10;
                let is_default = (c.coeff - default_boundary_coeff(nu)).norm() < 1e-6 && c.convention == QConvention::Plain;
                assert_eq!(ok, is_default, "N={n} nu={nu} {}: {:e}", c.label, c.res_splus);
            }
        }
    }
}

#[test]
fn negative_controls() {
    let a = Anisotropy::new(0.3).unwrap();
    let g = build_generators(4, &a).unwrap();
    let hp = build_hxxz(&HamiltonianSpec::periodic(4, a.delta)).unwrap();
    assert!(commutator(&hp, &g.splus).unwrap().norm() > 0.1);
    let mut spec = HamiltonianSpec::open(4, &a);
    spec.boundary_coeff = C64::new(0.0, 0.0);
    let h0 = build_hrxxz(&spec).unwrap();
    assert!(commutator(&h0, &g.splus).unwrap().norm() > 0.1);
    assert_eq!(commutator(&hp, &g.s3).unwrap().norm(), 0.0);
    assert_eq!(commutator(&h0, &g.s3).unwrap().norm(), 0.0);
}

#[test]
fn periodic_spectra() {
    let h = build_hxxz(&HamiltonianSpec::periodic(2, 0.0)).unwrap();
    let ev: Vec<f64> = spectrum(&h).unwrap().iter().map(|z| z.re).collect();
    for (x, y) in ev.iter().zip([-4.0, 0.0, 0.0, 4.0]) {
        assert!((x - y).abs() < 1e-12);
    }
    let h = build_hxxz(&HamiltonianSpec::periodic(2, 1.0)).unwrap();
    assert!((h.entries.clone() - h.entries.adjoint()).norm() < 1e-13);
    let ev: Vec<f64> = spectrum(&h).unwrap().iter().map(|z| z.re).collect();
    for (x, y) in ev.iter().zip([-6.0, 2.0, 2.0, 2.0]) {
        assert!((x - y).abs() < 1e-12);
    }
    let id = ChainOperator::identity(3).unwrap();
    assert!(spectrum(&id).unwrap().iter().all(|z| (z - 1.0).norm() < 1e-14));
}

#[test]
fn open_two_site_matrix() {
    let a = Anisotropy::new(0.3).unwrap();
    let h = build_hrxxz(&HamiltonianSpec::open(2, &a)).unwrap();
    let d = (0.3 * PI).cos();
    let b = default_boundary_coeff(0.3);
    let e = &h.entries;
    assert!((e[(0, 0)] - d).norm() < 1e-15);
    assert!((e[(1, 1)] - (-d + 2.0 * b)).norm() < 1e-15);
    assert!((e[(2, 2)] - (-d - 2.0 * b)).norm() < 1e-15);
    assert!((e[(1, 2)] - 2.0).norm() < 1e-15);
    assert!((e[(3, 3)] - d).norm() < 1e-15);
}

#[test]
fn open_spectrum_is_real_with_singlet_multiplets() {
    let a = Anisotropy::new(0.3).unwrap();
    for n in [2usize, 4, 6] {
        let h = build_hrxxz(&HamiltonianSpec::open(n, &a)).unwrap();
        let ev = spectrum(&h).unwrap();
        assert!(ev.iter().all(|z| z.im.abs() < 1e-9), "N={n}");
        let g = build_generators(n, &a).unwrap();
        assert_eq!(highest_weight_count(&g, 0).unwrap(), singlet_count(n));
    }
}

#[test]
fn spectrum_checks() {
    for nu in [0.1, 0.3, 0.7] {
        let a = Anisotropy::new(nu).unwrap();
        for n in 2..=6 {
            let reps = check_spectrum(n, &a, 1e-8).unwrap();
            assert!(reps.iter().all(|r| r.pass), "{reps:?}");
        }
    }
    // periodic chain: multiplets of the open chain do not survive
    let a = Anisotropy::new(0.3).unwrap();
    let h = build_hxxz(&HamiltonianSpec::periodic(4, a.delta)).unwrap();
    let s0 = sector_spectrum(&h, 0).unwrap();
    let s2 = sector_spectrum(&h, 2).unwrap();
    assert_eq!(s0.len(), 6);
    assert_eq!(s2.len(), 4);
}
