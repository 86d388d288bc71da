use qkz_core::report::rng;
use qkz_core::special_functions::*;
use qkz_core::C64;
use rand::Rng;

fn cz(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn phi_oracle_and_representations() {
    let v = phi(cz(0.3, 0.0), cz(-0.2, 0.0), 0.4).unwrap();
    assert!((v - 0.837609062709461929321).norm() < 1e-12, "{v}");
    let mut g = rng(21);
    for _ in 0..20 {
        let (a, b) = (cz(g.gen_range(-3.0..3.0), 0.0), cz(g.gen_range(-3.0..3.0), 0.0));
        let nu = g.gen_range(0.1..0.9);
        let x = phi(a, b, nu).unwrap();
        assert!((x - phi(b, a, nu).unwrap()).norm() < 1e-13 * x.norm().max(1.0));
        let y = log_phi_integral(a, b, nu).unwrap().exp();
        assert!((x - y).norm() < 1e-11 * x.norm().max(1.0), "{a} {b} {nu}: {x} vs {y}");
    }
    // complex arguments inside the strip
    let a = cz(0.4, 0.9);
    let b = cz(-0.1, -0.3);
    let x = phi(a, b, 0.3).unwrap();
    let y = log_phi_integral(a, b, 0.3).unwrap().exp();
    assert!((x - y).norm() < 1e-10);
    assert!(phi(cz(0.0, 1.6), cz(0.0, 0.0), 0.3).is_err());
}

#[test]
fn psi_nominal_forms() {
    assert!((psi(cz(0.0, 0.0), cz(0.0, 0.0)).unwrap() - 2f64.powf(-0.75)).norm() < 1e-13);
    let r = check_psi_equations(20, 5, 1e-8).unwrap();
    // the nominal forms are off by a sign and by a constant; the corrected
    // forms hold to quadrature accuracy
    assert!(!r.nominal_shift.pass && (r.nominal_shift.max_residual - 2.0).abs() < 1e-8);
    assert!(!r.nominal_product.pass);
    assert!(r.corrected_shift.pass, "{:?}", r.corrected_shift);
    assert!(r.corrected_product.pass, "{:?}", r.corrected_product);
    assert!((r.product_constant - cz(0.0, -0.279076598395409414867)).norm() < 1e-11);
}

#[test]
fn chi_forms() {
    let c0 = chi(cz(0.0, 0.0), 0.3).unwrap();
    assert!((c0 - cz(0.0, -0.395363960864077015097)).norm() < 1e-12);
    assert!((chi(cz(0.37, 0.0), 0.3).unwrap() - chi(cz(-0.37, 0.0), 0.3).unwrap()).norm() < 1e-10);
    for nu in [0.2, 0.3, 0.5] {
        let r = check_chi_series(nu, 20, 0.5, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
    }
    let r = check_chi_log_derivative(0.3, 10, 1e-7).unwrap();
    assert!(r.pass, "{r:?}");
    let s = chi_series(0.3, 6).unwrap();
    assert_eq!(s.eval(cz(0.0, 0.0)), cz(0.0, s.coefficients[0]));
}

#[test]
fn chi_series_regression_small_nu() {
    let s = chi_series(0.01, 3).unwrap();
    let want = [
        -0.441218842149990588969,
        0.0581522683573416336340,
        -0.00635331528510300988454,
        0.000657283081519517501825,
    ];
    for (c, w) in s.coefficients.iter().zip(want) {
        assert!((c - w).abs() < 1e-12 * w.abs().max(1e-3), "{c} vs {w}");
    }
}

#[test]
fn dispersion_values() {
    let (p, e) = dispersion(cz(2.0, 0.0)).unwrap();
    assert!((p - cz(0.0, -0.269035990748881519355)).norm() < 1e-14);
    assert!((e - cz(0.0, 0.265802228834079692121)).norm() < 1e-14);
    assert!(check_dispersion(20, 1e-8).unwrap().pass);
}
