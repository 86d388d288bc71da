use qkz_core::pairing::*;
use qkz_core::report::rng;
use qkz_core::{Error, C64};
use rand::Rng;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn random_betas(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    loop {
        let b: Vec<f64> = (0..2 * n).map(|_| r.gen_range(-1.2..1.2)).collect();
        let ok = (0..b.len()).all(|i| (i + 1..b.len()).all(|j| (b[i] - b[j]).abs() > 0.15));
        if ok {
            return b;
        }
    }
}

#[test]
fn base_pairing_oracle() {
    let spec = PairingSpec::real(&[0.3, -0.3, 0.8, -0.8], 0.3).unwrap();
    let v = pairing(&Poly::monomial(0), &Poly::monomial(0), &spec).unwrap();
    assert!((v.value - c(1.189398431626816)).norm() < 1e-11, "{:?}", v);
    assert!(v.error < 1e-10);
}

#[test]
fn pairing_trivial_and_linear() {
    let spec = PairingSpec::real(&[0.3, -0.3, 0.8, -0.8], 0.3).unwrap();
    let z = pairing(&Poly::zero(), &Poly::monomial(1), &spec).unwrap();
    assert_eq!(z.value, c(0.0));
    let big = Poly::from_real(&[0.5, -1.0]);
    let p1 = Poly::from_real(&[1.0, 2.0]);
    let p2 = Poly::new(vec![C64::new(0.0, 1.0), c(0.0), c(-0.5)]);
    let lhs = pairing(&big, &p1.add(&p2), &spec).unwrap().value;
    let rhs = pairing(&big, &p1, &spec).unwrap().value + pairing(&big, &p2, &spec).unwrap().value;
    assert!((lhs - rhs).norm() < 1e-10);
}

#[test]
fn decay_budget_enforced() {
    let spec = PairingSpec::real(&[0.3, -0.3, 0.8, -0.8], 0.3).unwrap();
    // 2n(1+ν) = 5.2; (3+1) + 0.6·(1+1) = 5.2 is not strictly inside
    let e = pairing(&Poly::monomial(3), &Poly::monomial(1), &spec);
    assert!(matches!(e, Err(Error::Parameter(_))));
}

#[test]
fn bases_have_stated_degrees() {
    let spec = PairingSpec::real(&random_betas(3, 1), 0.3).unwrap();
    let b = build_bases(3, &spec).unwrap();
    for j in -2..=2 {
        assert_eq!(b.s(j).degree(), Some((j + 2) as usize));
    }
    for k in 1..=2 {
        assert_eq!(b.big_s(k).degree(), Some(2 * k as usize - 2));
        assert_eq!(b.big_s(-k).degree(), Some(2 * k as usize - 1));
        assert!((b.big_s(-k).coeffs.last().unwrap() - c(1.0)).norm() < 1e-14);
    }
}

#[test]
fn riemann_relations_and_inversion() {
    let cases: Vec<(usize, f64, u64)> =
        [2usize, 3].iter().flat_map(|&n| [0.2, 0.3].into_iter().flat_map(move |nu| (0..5u64).map(move |s| (n, nu, s)))).collect();
    std::thread::scope(|sc| {
        let handles: Vec<_> = cases
            .iter()
            .map(|&(n, nu, seed)| {
                sc.spawn(move || {
                    let spec = PairingSpec::real(&random_betas(n, 100 * n as u64 + seed), nu).unwrap();
                    (n, nu, seed, check_periods(n, &spec, 1e-6).unwrap())
                })
            })
            .collect();
        for h in handles {
            let (n, nu, seed, out) = h.join().unwrap();
            assert!(out.riemann.pass(), "n={n} nu={nu} seed={seed}: {:?}", out.riemann);
            assert!(out.inversion.identity_residual < 1e-6);
            assert!(out.inversion.lu_residual < 1e-6);
            assert_eq!(out.period.nrows(), irreducible_dim(n));
            assert!(out.report.pass);
        }
    });
}

#[test]
fn n2_canonical_normalization() {
    let spec = PairingSpec::real(&[0.3, -0.3, 0.8, -0.8], 0.3).unwrap();
    let b = build_bases(2, &spec).unwrap();
    // direct solve: ⟨S₁|s₁⟩⟨S₋₁|s₋₁⟩ − ⟨S₁|s₋₁⟩⟨S₋₁|s₁⟩ = 1
    let p = |x: &Poly, y: &Poly| pairing(x, y, &spec).unwrap().value;
    let det = p(b.big_s(1), b.s(1)) * p(b.big_s(-1), b.s(-1)) - p(b.big_s(1), b.s(-1)) * p(b.big_s(-1), b.s(1));
    assert!((det - c(1.0)).norm() < 1e-8, "{det}");
}

#[test]
fn shifted_rapidities_reconstruct() {
    let base = random_betas(2, 7);
    let shifted: Vec<f64> = base.iter().map(|b| b + 0.6).collect();
    let spec = PairingSpec::real(&shifted, 0.25).unwrap();
    let b = build_bases(2, &spec).unwrap();
    assert!(check_deformed_riemann(&b, &spec, 1e-8).unwrap().pass());
}

#[test]
fn negative_controls() {
    let spec = PairingSpec::real(&[0.3, -0.3, 0.8, -0.8], 0.3).unwrap();
    let mut b = build_bases(2, &spec).unwrap();
    let idx = labels(2).iter().position(|&l| l == 1).unwrap();
    b.upper[idx] = b.upper[idx].scale(c(2.0));
    let r = check_deformed_riemann(&b, &spec, 1e-8).unwrap();
    assert!(!r.pass());
    assert!((r.lower_identity.max_residual - 1.0).abs() < 1e-6);

    let dup = PairingSpec::real(&[0.3, 0.3, 0.8, -0.8], 0.3).unwrap();
    assert!(matches!(build_bases(2, &dup), Err(Error::Singular(_))));
}

#[test]
fn period_dimensions_and_empty_case() {
    assert_eq!(irreducible_dim(2), 2);
    assert_eq!(irreducible_dim(3), 5);
    assert_eq!(irreducible_dim(4), 14);
    let b1 = PolyBasisPair { n: 1, lower: vec![Poly::monomial(0)], upper: vec![] };
    let spec = PairingSpec::real(&[0.1, -0.1], 0.3).unwrap();
    let p = period_matrix(&b1, &spec).unwrap();
    assert_eq!(p.nrows(), 0);
    let inv = invert_period(&p, &b1, &spec, 1e-6).unwrap();
    assert_eq!(inv.inverse.nrows(), 0);
}

#[test]
fn primitive_subspace_is_symplectic_invariant() {
    // random symplectic g = exp-free product of shears; Λ(g) must preserve span(E)
    let n = 4;
    let m = 2 * n - 2;
    let om = omega(n);
    let mut r = rng(3);
    let mut g = nalgebra::DMatrix::<C64>::identity(m, m);
    for _ in 0..4 {
        let s = nalgebra::DMatrix::<C64>::from_fn(m, m, |_, _| c(r.gen_range(-0.5..0.5)));
        let sym = &s + s.transpose();
        // I + Ω·sym is symplectic to first order; use the Cayley transform for exactness
        let x = &om * sym;
        let id = nalgebra::DMatrix::<C64>::identity(m, m);
        let cay = (&id - &x * c(0.5)).try_inverse().unwrap() * (&id + &x * c(0.5));
        g = cay * g;
    }
    assert!((g.transpose() * &om * &g - &om).camax() < 1e-10);
    let e = irreducible_basis(n).map(|v| c(v));
    let lg = compound(&g, n - 1);
    let img = &lg * &e;
    let proj = &e * (e.transpose() * &img);
    assert!((img - proj).camax() < 1e-9);
}

#[test]
fn determinant_under_symplectic_rescaling() {
    // S_k → t S_k, S_{−k} → S_{−k}/t preserves the relations; det P scales by det(EᵀΛ(T)E)
    let n = 3;
    let spec = PairingSpec::real(&random_betas(n, 42), 0.3).unwrap();
    let b = build_bases(n, &spec).unwrap();
    let p0 = period_matrix(&b, &spec).unwrap();
    let lab = labels(n);
    let ts = [c(1.7), C64::new(0.4, -0.9)];
    let mut b2 = b.clone();
    let mut t = nalgebra::DMatrix::<C64>::zeros(lab.len(), lab.len());
    for (i, &l) in lab.iter().enumerate() {
        let f = if l > 0 { ts[(l - 1) as usize] } else { 1.0 / ts[(-l - 1) as usize] };
        b2.upper[i] = b.upper[i].scale(f);
        t[(i, i)] = f;
    }
    let p1 = period_matrix(&b2, &spec).unwrap();
    let e = irreducible_basis(n).map(|v| c(v));
    let factor = (e.transpose() * compound(&t, n - 1) * &e).determinant();
    assert!((p1.determinant() - factor * p0.determinant()).norm() < 1e-8 * p1.determinant().norm().max(1.0));
    assert!(check_deformed_riemann(&b2, &spec, 1e-8).unwrap().pass());
}
