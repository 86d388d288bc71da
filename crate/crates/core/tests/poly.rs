use proptest::prelude::*;
use qkz_core::poly::mpoly::*;
use qkz_core::poly::mpoly::Strategy;
use qkz_core::poly::{binomial, dims, GaussQ, LaurentPoly};
use qkz_core::report::rng;
use rand::Rng;
use std::collections::HashMap;

const VARS: [&str; 3] = ["x", "y", "z"];

fn random_poly<R: Rng>(r: &mut R) -> LaurentPoly {
    let mut p = LaurentPoly::zero(&VARS);
    for _ in 0..r.gen_range(0..5) {
        let e = (0..3).map(|_| r.gen_range(-2..=2)).collect();
        let c = GaussQ::new(GaussQ::ratio(r.gen_range(-5..=5), r.gen_range(1..=4)).re, GaussQ::ratio(r.gen_range(-5..=5), r.gen_range(1..=4)).re);
        p = p.add(&LaurentPoly::monomial(&VARS, e, c).unwrap()).unwrap();
    }
    p
}

/// Slow multiplication: expand into a list of terms, then collect in a hash map.
fn slow_mul(a: &LaurentPoly, b: &LaurentPoly) -> HashMap<Vec<i32>, GaussQ> {
    let mut raw = Vec::new();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            raw.push((ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect::<Vec<_>>(), ca * cb));
        }
    }
    let mut out: HashMap<Vec<i32>, GaussQ> = HashMap::new();
    for (e, c) in raw {
        *out.entry(e).or_insert_with(GaussQ::zero) += &c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn as_map(p: &LaurentPoly) -> HashMap<Vec<i32>, GaussQ> {
    p.terms().map(|(m, c)| (m.0.clone(), c.clone())).collect()
}

#[test]
fn ring_identities_on_fuzz_cases() {
    let mut r = rng(17);
    for _ in 0..100 {
        let (a, b, c) = (random_poly(&mut r), random_poly(&mut r), random_poly(&mut r));
        let ab = a.mul(&b).unwrap();
        assert_eq!(as_map(&ab), slow_mul(&a, &b));
        assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), ab.add(&a.mul(&c).unwrap()).unwrap());
        assert!(a.sub(&a).unwrap().is_zero());
    }
}

#[test]
fn laurent_basics() {
    let v = ["x"];
    let x = LaurentPoly::var(&v, "x").unwrap();
    let inv = LaurentPoly::monomial(&v, vec![-1], GaussQ::one()).unwrap();
    let p = x.add(&inv).unwrap().mul(&x).unwrap();
    assert_eq!(p.degree_in("x").unwrap(), Some((0, 2)));
    assert!(p.evaluate_exact(&[GaussQ::i()]).unwrap().is_zero());
    assert!(inv.evaluate_exact(&[GaussQ::zero()]).is_err());
    let other = LaurentPoly::var(&["y"], "y").unwrap();
    assert!(x.add(&other).is_err());
}

fn random_kernel_point<R: Rng>(r: &mut R, n: usize, m: usize) -> (Vec<GaussQ>, Vec<GaussQ>) {
    let (_, _, b, t) = random_point(r, n, m);
    (b, t)
}

#[test]
fn x_kernel_matches_brute_force() {
    let mut r = rng(23);
    for (n, m) in [(2, 1), (2, 2), (3, 2)] {
        let pairs = SubsetPair::all(n, m).unwrap();
        for k in 0..50 {
            let (b, t) = random_kernel_point(&mut r, n, m);
            let p = &pairs[k % pairs.len()];
            for pr in [PairReading::Ordered, PairReading::Distinct] {
                let rd = KernelReading { denominators: DenominatorReading::SComplement, pairs: pr };
                assert_eq!(x_kernel(p, &b, &t, rd).unwrap(), x_kernel_brute(p, &b, &t, rd).unwrap());
            }
        }
    }
}

#[test]
fn x_kernel_fixed_point_and_enumeration() {
    // n = 2, m = 1: S∖T has three elements, nine ordered pairs
    let b: Vec<GaussQ> = (1..=4).map(GaussQ::from).collect();
    let t: Vec<GaussQ> = (5..=6).map(GaussQ::from).collect();
    let p = SubsetPair::new(2, 1, vec![0], vec![]).unwrap();
    assert_eq!(p.complement().len(), 3);
    let rd = KernelReading::default();
    let x = x_kernel(&p, &b, &t, rd).unwrap();
    assert_eq!(x, x_kernel_brute(&p, &b, &t, rd).unwrap());

    // unordered pairs twice plus the diagonal
    let comp = p.complement();
    let summand = |i1: usize, i2: usize| -> GaussQ {
        let i = GaussQ::i();
        let mut acc = GaussQ::one();
        for ip in [i1, i2] {
            let mut num = &(&b[ip] + &b[p.t[0]]) * &GaussQ::one();
            let mut den = GaussQ::one();
            for &j in &comp {
                if j != i1 && j != i2 {
                    den = &den * &(&b[ip] - &b[j]);
                }
            }
            for j in 0..2 {
                den = &den * &(&b[ip] - &(&i * &t[j]));
            }
            num = num.checked_div(&den).unwrap();
            acc = &acc * &num;
        }
        acc
    };
    let mut alt = GaussQ::zero();
    for (k, &i1) in comp.iter().enumerate() {
        alt += &summand(i1, i1);
        for &i2 in &comp[k + 1..] {
            alt += &(&GaussQ::int(2, 0) * &summand(i1, i2));
        }
    }
    assert_eq!(alt, x);
}

#[test]
fn single_element_complement_is_one_diagonal_term() {
    let b: Vec<GaussQ> = [3, -2, 5].iter().map(|&v| GaussQ::from(v)).collect();
    let t: Vec<GaussQ> = [7, 1].iter().map(|&v| GaussQ::from(v)).collect();
    let rd = KernelReading::default();
    let x = x_kernel_sets(&[0], &[1, 2], &[0], &[1], &b, &t, PairReading::Ordered).unwrap();
    // g² with g = (B₀+B₁)(B₀+B₂)(B₀+iT₀)/(B₀−iT₁)
    let i = GaussQ::i();
    let g = (&(&(&b[0] + &b[1]) * &(&b[0] + &b[2])) * &(&b[0] + &(&i * &t[0]))).checked_div(&(&b[0] - &(&i * &t[1]))).unwrap();
    assert_eq!(x, &g * &g);
    assert_eq!(x, x_kernel_generic(&[0], &[1, 2], &[0], &[1], &b, &t, rd).unwrap());
    assert!(x_kernel_sets(&[0], &[1, 2], &[0], &[1], &b, &t, PairReading::Distinct).unwrap().is_zero());
}

#[test]
fn expansion_matches_term_by_term_sum() {
    let mut r = rng(5);
    let spec = MSpec::new(2, 2).with_pairs(PairReading::Distinct);
    let (a, s, b, t) = random_point(&mut r, 2, 2);
    let p = m_polynomial(&spec, &b, &t).unwrap();
    let mut pt = a.clone();
    pt.extend(s.clone());
    assert_eq!(p.evaluate_exact(&pt).unwrap(), m_value_brute(&spec, &a, &s, &b, &t).unwrap());
    assert_eq!(m_value(&spec, &a, &s, &b, &t).unwrap(), m_value_brute(&spec, &a, &s, &b, &t).unwrap());
    // each A_i carries the Vandermonde, ∏A and the (A_i + iB_j), j ∈ T
    assert_eq!(p.degree_in("A1").unwrap().unwrap().1, 2);
    assert_eq!(p.degree_in("S1").unwrap().unwrap().1, 1);
}

#[test]
fn skew_symmetry_exact() {
    let a_swap = skew_symmetry_defect(&MSpec::new(3, 2).with_pairs(PairReading::Distinct), false, 20, 9).unwrap();
    let s_swap = skew_symmetry_defect(&MSpec::new(2, 3).with_pairs(PairReading::Distinct), true, 20, 9).unwrap();
    assert_eq!(a_swap, 0.0);
    assert_eq!(s_swap, 0.0);
    assert!(skew_symmetry_defect(&MSpec::new(2, 2), false, 1, 9).is_err());
}

#[test]
fn smallest_case_certified_both_ways() {
    for st in [Strategy::SymbolicCancellation, Strategy::Interpolation] {
        let c = check_polynomiality(&MSpec::new(2, 2), st, 3).unwrap();
        assert!(c.pass, "{st:?}: {:?}", c.slices);
        // the literal ordered reading keeps B-coincidence poles; distinct pairs cancel them
        assert!(c.switched);
        assert!(c.rejected.as_ref().is_some_and(|s| !s.pass));
        assert!(c.report().pass);
    }
}

#[test]
fn single_subset_breaks_cancellation() {
    let mut spec = MSpec::new(2, 2).with_pairs(PairReading::Distinct);
    spec.restrict_t = Some(vec![0]);
    let c = check_polynomiality(&spec, Strategy::SymbolicCancellation, 3).unwrap();
    assert!(!c.pass);
    let b1 = &c.slices[0];
    assert!(b1.claimed_poles > 0 && b1.residual > 0.0);
}

#[test]
fn alternative_denominator_reading_fails() {
    let mut spec = MSpec::new(2, 2).with_pairs(PairReading::Distinct);
    spec.reading.denominators = DenominatorReading::SPrimeComplement;
    assert!(!check_polynomiality(&spec, Strategy::SymbolicCancellation, 3).unwrap().pass);
}

#[test]
fn cap_and_subset_validation() {
    let mut r = rng(1);
    let (a, s, b, t) = random_point(&mut r, 4, 4);
    assert!(m_value(&MSpec::new(4, 4), &a, &s, &b, &t).is_err());
    assert!(SubsetPair::new(2, 2, vec![0, 1], vec![0]).is_err());
    assert_eq!(combinations(6, 2).len(), 15);
}

#[test]
fn dimension_ledger() {
    for n in 1..=12 {
        let d = dims(n);
        assert!(d.equal, "n = {n}");
    }
    assert_eq!((dims(2).singlet_dim, dims(2).irr_dim), (2, 2));
    assert_eq!(dims(3).singlet_dim, 5);
    assert_eq!(dims(1).singlet_dim, 1);
    assert_eq!(dims(4).hh_exponent, binomial(4, 2) as i128 - 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn swap_twice_is_identity(seed in 0u64..500) {
        let mut r = rng(seed);
        let p = random_poly(&mut r);
        prop_assert_eq!(p.swap_vars("x", "z").unwrap().swap_vars("x", "z").unwrap(), p);
    }

    #[test]
    fn evaluation_is_a_ring_map(seed in 0u64..500) {
        let mut r = rng(seed);
        let (a, b) = (random_poly(&mut r), random_poly(&mut r));
        let pt: Vec<GaussQ> = (0..3).map(|_| GaussQ::int(r.gen_range(1..5), r.gen_range(-3..3))).collect();
        let lhs = a.mul(&b).unwrap().evaluate_exact(&pt).unwrap();
        prop_assert_eq!(lhs, &a.evaluate_exact(&pt).unwrap() * &b.evaluate_exact(&pt).unwrap());
    }
}
