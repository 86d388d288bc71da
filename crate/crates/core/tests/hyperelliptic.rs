use nalgebra::DMatrix;
use proptest::prelude::*;
use qkz_core::hyperelliptic::*;
use qkz_core::pairing::Poly;
use qkz_core::{Error, C64};

#[test]
fn agm_matches_known_values() {
    let (k, e) = elliptic_ke(0.0).unwrap();
    assert!((k - std::f64::consts::FRAC_PI_2).abs() < 1e-15 && (e - k).abs() < 1e-15);
    // K(1/√2) = Γ(1/4)²/(4√π)
    let (k, _) = elliptic_ke(0.5f64.sqrt()).unwrap();
    assert!((k - 1.854_074_677_301_372).abs() < 1e-13);
    assert!(elliptic_ke(1.0).is_err());
}

#[test]
fn genus1_periods_are_complete_integrals() {
    let (rep, rows) = check_genus1(&[0.1, 0.3, 0.5, 0.7, 0.9], 1e-8).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert_eq!(rows.len(), 5);
}

#[test]
fn legendre_relation() {
    for k in [0.2, 0.5, 0.9] {
        assert!(check_legendre(k, 1e-10).unwrap().pass);
    }
}

#[test]
fn genus2_bilinear_relation() {
    for b in [
        vec![-2.0, -1.0, 0.5, 1.5, 3.0, 4.0],
        vec![0.1, 0.7, 1.2, 2.0, 2.9, 3.5],
    ] {
        let c = HyperellipticCurve::real(&b).unwrap();
        let r = check_bilinear(&c, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn complex_branch_points() {
    // collinear along a tilted line: all stadia are valid
    let dir = C64::new(1.0, 0.6);
    let b: Vec<C64> = [-1.0, -0.2, 1.0, 2.0, 3.1, 4.0].iter().map(|&x| dir * x + C64::new(0.0, 0.2)).collect();
    let c = HyperellipticCurve::new(b).unwrap();
    assert!(check_bilinear(&c, 1e-8).unwrap().pass);
    // scattered points: the stadium b-cycle would cross a cut, which must be refused
    let b = vec![C64::new(-1.0, 0.3), C64::new(-0.2, -0.4), C64::new(1.0, 0.5), C64::new(2.0, -0.2), C64::new(3.1, 0.6), C64::new(4.0, 0.0)];
    let c = HyperellipticCurve::new(b).unwrap();
    assert!(matches!(check_bilinear(&c, 1e-8), Err(Error::Parameter(_))));
}

#[test]
fn wrong_residue_sign_is_detected() {
    let c = HyperellipticCurve::real(&[-2.0, -1.0, 0.5, 1.5, 3.0, 4.0]).unwrap();
    let basis = second_kind_basis(&c);
    let per = periods(&c, &basis, &CycleBasis::standard(3), &PeriodSpec::default()).unwrap();
    let expected = residue_matrix(&c, &basis);
    assert!(expected.iter().any(|z| z.norm() > 1e-3));
    assert!(check_classical_riemann(&per, &expected, 2, 1e-8).unwrap().pass);
    assert!(!check_classical_riemann(&per, &(-expected), 2, 1e-8).unwrap().pass);
}

#[test]
fn identity_normalized_data_is_consistent() {
    // A = I, B = symmetric τ: holomorphic bilinear form vanishes
    let a = DMatrix::<C64>::identity(2, 2);
    let b = DMatrix::from_row_slice(2, 2, &[C64::new(0.3, 1.0), C64::new(0.1, 0.2), C64::new(0.1, 0.2), C64::new(-0.2, 1.4)]);
    let p = Periods { a, b };
    let r = check_classical_riemann(&p, &DMatrix::zeros(2, 2), 2, 1e-12).unwrap();
    assert_eq!(r.max_residual, 0.0);
    let short = Periods { a: DMatrix::identity(2, 1), b: DMatrix::identity(2, 1) };
    assert!(matches!(check_classical_riemann(&short, &DMatrix::zeros(2, 2), 2, 1e-8), Err(Error::Dimension(_))));
}

#[test]
fn cut_crossing_contour_is_rejected() {
    let c = HyperellipticCurve::real(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    // odd number of points
    assert!(cycle_integrals(&c, Cycle { first: 0, last: 0 }, &[Poly::from_real(&[1.0])], &PeriodSpec::default()).is_err());
    // clearance so wide that the stadium swallows a neighbour
    let wide = PeriodSpec { clearance: 0.8, ..Default::default() };
    assert!(cycle_integrals(&c, Cycle { first: 0, last: 1 }, &[Poly::from_real(&[1.0])], &wide).is_err());
}

#[test]
fn bad_curves() {
    assert!(HyperellipticCurve::real(&[0.0, 1.0, 2.0]).is_err());
    assert!(HyperellipticCurve::real(&[0.0, 1.0, 1.0, 2.0]).is_err());
    let c = HyperellipticCurve::real(&[0.0, 1.0, 2.0, 3.0]).unwrap();
    assert!(periods(&c, &[Poly::monomial(3)], &CycleBasis::standard(2), &PeriodSpec::default()).is_err());
}

#[test]
fn form_enumeration() {
    for n in 2..=6 {
        let f = enumerate_forms(n).unwrap();
        assert_eq!(f.len() as u128, qkz_core::poly::binomial(2 * n as i64 - 1, n as i64 - 1));
        assert!(f.iter().all(|t| t.len() == n - 1 && t.windows(2).all(|w| w[0] < w[1]) && t.iter().all(|&x| x <= 2 * n - 2)));
        assert!(f.windows(2).all(|w| w[0] < w[1]));
    }
    assert!(enumerate_forms(1).is_err());
}

#[test]
fn classical_limit_gap_shrinks() {
    let (rep, rows) = classical_limit_scan(&[0.5, 1.0, 2.0, 3.5], &[0.05, 0.02, 0.01], 0.05).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert_eq!(snap_constant(C64::new(0.01, 0.49)), C64::new(0.0, 0.5));
    assert!(rows.iter().all(|r| r.gap.is_finite()));
    assert!(classical_limit_pairing(&Poly::from_real(&[1.0]), &[0.5, 1.0, 2.0, 3.5], 0.3, None).is_err());
    let zero = classical_limit_pairing(&Poly::from_real(&[0.0]), &[0.5, 1.0, 2.0, 3.5], 0.01, None).unwrap();
    assert_eq!(zero.deformed, C64::new(0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn legendre_curves(k in 0.05f64..0.95) {
        let (kp, ep) = ke_from_periods(k, &PeriodSpec::default()).unwrap();
        let (ka, ea) = elliptic_ke(k).unwrap();
        prop_assert!((kp.norm() - ka).abs() < 1e-10 * ka);
        prop_assert!((ep.norm() - ea).abs() < 1e-10 * ea);
    }

    #[test]
    fn random_genus2_bilinear(gaps in proptest::collection::vec(0.3f64..2.0, 6)) {
        let mut x = -3.0;
        let b: Vec<f64> = gaps.iter().map(|g| { x += g; x }).collect();
        let c = HyperellipticCurve::real(&b).unwrap();
        prop_assert!(check_bilinear(&c, 1e-8).unwrap().pass);
    }
}
