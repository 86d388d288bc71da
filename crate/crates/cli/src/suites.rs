//! One function per subcommand; each returns the checks it ran.

use crate::config::RunConfig;
use nalgebra::DMatrix;
use qkz_core::correlator::{check_correlator_n1, limit_specialize, n1_regularized, ChiExpansion, LimitSpec};
use qkz_core::hyperelliptic::{check_bilinear, check_genus1, check_legendre, classical_limit_scan, HyperellipticCurve};
use qkz_core::pairing::{check_periods, PairingSpec};
use qkz_core::poly::mpoly::{
    check_polynomiality, random_point, skew_symmetry_defect, x_kernel, x_kernel_brute, DenominatorReading, KernelReading, MSpec,
    PairReading, Strategy, SubsetPair,
};
use qkz_core::poly::dims;
use qkz_core::qkz::{check_n1, singlet_projector};
use qkz_core::quantum_group::{
    build_generators, build_hxxz, calibrate_invariance, check_spectrum, default_candidates, HamiltonianSpec,
};
use qkz_core::report::{rng, CheckReport};
use qkz_core::rmatrix::{check_ybe, check_ybe_pairs, constant_rq, gauge_r, r0, r_matrix, s_matrix, Anisotropy};
use qkz_core::special_functions::{check_chi_log_derivative, check_chi_series, check_dispersion, check_psi_equations};
use qkz_core::tensor_core::{commutator, permutation4};
use qkz_core::{Error, Result, C64};
use rand::Rng;
use serde_json::json;

pub const SUITES: &[&str] =
    &["ybe", "qg-invariance", "spectrum", "special-fns", "riemann", "qkz-check", "mpoly", "dims", "periods", "classical-limit", "correlator-n1"];

pub fn run(name: &str, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    match name {
        "ybe" => ybe(cfg),
        "qg-invariance" => qg_invariance(cfg),
        "spectrum" => spectrum(cfg),
        "special-fns" => special_fns(cfg),
        "riemann" => riemann(cfg),
        "qkz-check" => qkz_check(cfg),
        "mpoly" => mpoly(cfg),
        "dims" => dimensions(cfg),
        "periods" => periods(cfg),
        "classical-limit" => classical_limit(cfg),
        "correlator-n1" => correlator_n1(cfg),
        _ => Err(Error::Parameter(format!("unknown suite `{name}`"))),
    }
}

fn aniso(nu: f64) -> Result<Anisotropy> {
    Anisotropy::new(nu)
}

fn tag(r: CheckReport, suffix: &str) -> CheckReport {
    CheckReport { check: format!("{}@{suffix}", r.check), ..r }
}

/// Yang–Baxter for all four families, R₀ reflection and unitarity.
pub fn ybe(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let samples = cfg.samples_or(100);
    let tol = cfg.tol("ybe");
    let mut out = Vec::new();
    for nu in cfg.nus(&[0.1, 0.3, 0.5, 0.7]) {
        let a = aniso(nu)?;
        let s = format!("nu={nu}");
        out.push(tag(check_ybe("r_matrix", |b| Ok(r_matrix(b, &a)?.entries), samples, cfg.seed, tol)?, &s));
        out.push(tag(check_ybe_pairs("gauge_r", |x, y| gauge_r(x, y, &a), samples, cfg.seed + 1, tol)?, &s));
        let rq = constant_rq(&a);
        out.push(tag(check_ybe("constant_rq", |_| Ok(rq.clone()), samples, cfg.seed + 2, tol)?, &s));
        out.push(tag(check_ybe("s_matrix", |b| s_matrix(b, &a), samples, cfg.seed + 3, tol)?, &s));

        let mut g = rng(cfg.seed + 4);
        let (mut refl, mut unit) = (0.0f64, 0.0f64);
        let p = permutation4();
        let id = DMatrix::<C64>::identity(4, 4);
        let n_ref = 50;
        for _ in 0..n_ref {
            let b = C64::new(g.gen_range(-2.0..2.0), 0.0);
            refl = refl.max((r0(b, nu)? * r0(-b, nu)? - 1.0).norm());
            let r12 = r_matrix(b, &a)?.entries;
            let r21 = &p * r_matrix(-b, &a)?.entries * &p;
            unit = unit.max((r12 * r21 - &id).camax());
        }
        out.push(CheckReport::new(format!("r0-reflection@{s}"), refl, cfg.tol("r0-reflection"), n_ref));
        out.push(CheckReport::new(format!("unitarity@{s}"), unit, cfg.tol("unitarity"), n_ref));
    }
    Ok(out)
}

/// Boundary-term calibration, [H, S³] and the periodic negative control.
pub fn qg_invariance(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for nu in cfg.nus(&[0.1, 0.3, 0.7]) {
        let a = aniso(nu)?;
        for n in cfg.ns(&[2, 3, 4, 5, 6]) {
            let cal = calibrate_invariance(n, &a, &default_candidates(nu), cfg.tol("qg-invariance"))?;
            let best = cal.candidates.iter().map(|c| c.res_splus.max(c.res_sminus)).fold(f64::INFINITY, f64::min);
            let s3 = cal.candidates.iter().map(|c| c.res_s3).fold(0.0, f64::max);
            let mut rep = CheckReport::new(format!("qg-calibration:N={n},nu={nu}"), best, cfg.tol("qg-invariance"), cal.candidates.len())
                .with_details(json!({ "accepted": cal.accepted }));
            rep.pass = rep.pass && !cal.accepted.is_empty();
            out.push(rep);
            out.push(CheckReport::new(format!("qg-s3:N={n},nu={nu}"), s3, cfg.tol("qg-s3"), cal.candidates.len()));
            let g = build_generators(n, &a)?;
            let hp = build_hxxz(&HamiltonianSpec::periodic(n, a.delta))?;
            let r = commutator(&hp, &g.splus)?.norm().max(commutator(&hp, &g.sminus)?.norm());
            let mut neg = CheckReport::new(format!("qg-negative-control:N={n},nu={nu}"), r, cfg.tol("qg-negative-control"), 1)
                .with_details(json!({ "bound": "lower" }));
            neg.pass = r > cfg.tol("qg-negative-control");
            out.push(neg);
            let s3p = commutator(&hp, &g.s3)?.norm();
            out.push(CheckReport::new(format!("qg-s3-periodic:N={n},nu={nu}"), s3p, cfg.tol("qg-s3"), 1));
        }
    }
    Ok(out)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for nu in cfg.nus(&[0.1, 0.3, 0.7]) {
        for n in cfg.ns(&[2, 3, 4, 5, 6]) {
            out.extend(check_spectrum(n, &aniso(nu)?, cfg.tol("spectrum"))?);
        }
    }
    Ok(out)
}

/// ψ equations (the forms ψ satisfies; nominal forms as diagnostics), χ representations, dispersion.
pub fn special_fns(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let psi = check_psi_equations(cfg.samples_or(20), cfg.seed, cfg.tol("psi"))?;
    out.push(psi.corrected_shift.clone());
    out.push(psi.corrected_product.clone());
    let diag = |r: &CheckReport| {
        let mut d = r.clone();
        d.check = format!("{}[diagnostic]", d.check);
        d.details = json!({ "nominal_form_pass": d.pass, "note": "nominal form, reported only" });
        d.pass = true;
        d
    };
    out.push(diag(&psi.nominal_shift));
    out.push(diag(&psi.nominal_product));
    for nu in cfg.nus(&[0.2, 0.3, 0.5]) {
        out.push(tag(check_chi_series(nu, 20, 0.5, cfg.tol("chi-series"))?, &format!("nu={nu}")));
    }
    out.push(tag(check_chi_log_derivative(0.3, 10, cfg.tol("chi-log-derivative"))?, "nu=0.3"));
    out.push(check_dispersion(20, cfg.tol("dispersion"))?);
    Ok(out)
}

/// Well-separated seeded rapidities in (−1.2, 1.2).
pub fn random_betas(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    loop {
        let b: Vec<f64> = (0..2 * n).map(|_| r.gen_range(-1.2..1.2)).collect();
        if (0..b.len()).all(|i| (i + 1..b.len()).all(|j| (b[i] - b[j]).abs() > 0.15)) {
            return b;
        }
    }
}

/// Both deformed bilinear identities and period-matrix inversion.
pub fn riemann(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let sets = cfg.samples_or(5) as u64;
    let mut out = Vec::new();
    for nu in cfg.nus(&[0.2, 0.3]) {
        for n in cfg.ns(&[2, 3]) {
            for s in 0..sets {
                let betas = random_betas(n, cfg.seed.wrapping_mul(1000) + 100 * n as u64 + s);
                let o = check_periods(n, &PairingSpec::real(&betas, nu)?, cfg.tol("riemann"))?;
                let suffix = format!("n={n},nu={nu},set={s}");
                out.push(tag(o.riemann.lower_identity.clone(), &suffix));
                out.push(tag(o.riemann.upper_identity.clone(), &suffix));
                out.push(CheckReport::new(format!("period-inversion@{suffix}"), o.inversion.identity_residual, cfg.tol("riemann"), 1)
                    .with_details(json!({ "betas": betas, "inverse_vs_lu": o.inversion.lu_residual })));
            }
        }
    }
    Ok(out)
}

pub fn qkz_check(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for nu in cfg.nus(&[0.2, 0.3, 0.7]) {
        let reps = check_n1(&aniso(nu)?, cfg.samples_or(10), cfg.seed, cfg.tol("qkz"))?;
        out.extend(reps.into_iter().map(|r| tag(r, &format!("nu={nu}"))));
    }
    Ok(out)
}

/// Polynomiality certificates, exact skew-symmetry and the X kernel against brute force.
pub fn mpoly(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let cases: Vec<(usize, usize)> =
        [(2, 2), (3, 2), (2, 3)].into_iter().filter(|(n, _)| cfg.n.as_ref().is_none_or(|ns| ns.contains(n))).collect();
    for &(n, m) in &cases {
        for strategy in [Strategy::Interpolation, Strategy::SymbolicCancellation] {
            let c = check_polynomiality(&MSpec::new(n, m), strategy, cfg.seed)?;
            out.push(c.report());
        }
    }
    let pts = cfg.samples_or(20);
    let distinct = |n, m| MSpec::new(n, m).with_pairs(PairReading::Distinct);
    let a = skew_symmetry_defect(&distinct(3, 2), false, pts, cfg.seed)?;
    out.push(CheckReport::new("m-skew-symmetry-A:n=3,m=2", a, 0.0, pts));
    let s = skew_symmetry_defect(&distinct(2, 3), true, pts, cfg.seed + 1)?;
    out.push(CheckReport::new("m-skew-symmetry-S:n=2,m=3", s, 0.0, pts));

    let mut r = rng(cfg.seed + 2);
    let kernel_points = 50;
    for (n, m) in [(2, 2), (3, 2), (2, 3)] {
        let pairs = SubsetPair::all(n, m)?;
        let mut mismatches = 0usize;
        for k in 0..kernel_points {
            let (_, _, b, tv) = random_point(&mut r, n, m);
            let p = &pairs[k % pairs.len()];
            for pr in [PairReading::Ordered, PairReading::Distinct] {
                let rd = KernelReading { denominators: DenominatorReading::SComplement, pairs: pr };
                if x_kernel(p, &b, &tv, rd)? != x_kernel_brute(p, &b, &tv, rd)? {
                    mismatches += 1;
                }
            }
        }
        out.push(CheckReport::new(format!("x-kernel-brute-force:n={n},m={m}"), mismatches as f64, 0.0, kernel_points));
    }
    Ok(out)
}

/// Binomial identities and the rank of the singlet projector.
pub fn dimensions(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let ns = cfg.ns(&(1..=12).collect::<Vec<_>>());
    let mut bad = Vec::new();
    for &n in &ns {
        let d = dims(n);
        if !d.equal {
            bad.push(n);
        }
    }
    out.push(
        CheckReport::new("dims-identity", bad.len() as f64, 0.0, ns.len())
            .with_details(json!({ "n": ns, "ledger": ns.iter().map(|&n| dims(n)).collect::<Vec<_>>(), "failures": bad })),
    );
    let a = aniso(0.3)?;
    for n in ns.iter().copied().filter(|&n| n <= 3) {
        let p = singlet_projector(n, &a)?;
        let sv = p.entries.singular_values();
        let rank = sv.iter().filter(|&&s| s > 1e-8).count();
        let expected = dims(n).singlet_dim;
        out.push(
            CheckReport::new(format!("singlet-projector-rank:n={n}"), (rank as i128 - expected).abs() as f64, 0.0, 1)
                .with_details(json!({ "rank": rank, "expected": expected })),
        );
    }
    Ok(out)
}

/// Classical periods: genus 1 against AGM, Legendre, genus-2 bilinear relation.
pub fn periods(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    out.push(check_genus1(&[0.1, 0.3, 0.5, 0.7, 0.9], cfg.tol("genus1"))?.0);
    for k in [0.3, 0.6, 0.8] {
        out.push(tag(check_legendre(k, cfg.tol("legendre"))?, &format!("k={k}")));
    }
    let mut r = rng(cfg.seed + 5);
    for s in 0..cfg.samples_or(5) {
        let mut x = -3.0;
        let b: Vec<f64> = (0..6)
            .map(|_| {
                x += r.gen_range(0.3..2.0);
                x
            })
            .collect();
        let curve = HyperellipticCurve::real(&b)?;
        out.push(tag(check_bilinear(&curve, cfg.tol("bilinear"))?, &format!("set={s}")));
    }
    Ok(out)
}

pub fn classical_limit(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let nus = cfg.nus(&[0.05, 0.02, 0.01]);
    Ok(vec![classical_limit_scan(&[0.5, 1.0, 2.0, 3.5], &nus, cfg.tol("classical-limit"))?.0])
}

/// n = 1 correlator from the two-point solution; optionally evaluates a supplied Q table.
pub fn correlator_n1(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for nu in cfg.nus(&[0.2, 0.3, 0.7]) {
        let a = aniso(nu)?;
        let (reps, d) = check_correlator_n1(&a, cfg.tol("correlator"))?;
        let table = qkz_core::correlator::n1_table(&d)?;
        out.extend(reps.into_iter().map(|r| {
            let r = tag(r, &format!("nu={nu}"));
            if r.check.starts_with("derive-n1-table-roundtrip") {
                r.with_details(json!({ "q_table": table.to_json(), "note": "defined up to the omitted zeta prefactor" }))
            } else {
                r
            }
        }));
        if let Some(deltas) = &cfg.quadrature.deltas {
            let l = limit_specialize(&n1_regularized(&a)?, &[0.0], &LimitSpec { deltas: deltas.clone(), rtol: 1e-3 })?;
            let r = (&l.value - &d.value).norm() / d.value.norm();
            out.push(CheckReport::new(format!("derive-n1-custom-ladder@nu={nu}"), r, cfg.tol("correlator"), deltas.len())
                .with_details(json!({ "extrapolation_error": l.error })));
        }
        if let Some(path) = &cfg.q_table {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            let t = ChiExpansion::from_json(&text)?;
            let lambdas = vec![0.0; t.n];
            let v = t.eval(&lambdas, nu)?;
            let (res, tol) = if t.n == 1 { ((&v - &d.value).norm() / d.value.norm(), cfg.tol("correlator")) } else { (0.0, 0.0) };
            out.push(CheckReport::new(format!("q-table@nu={nu}"), res, tol, 1).with_details(json!({
                "path": path.display().to_string(),
                "n": t.n,
                "value": v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            })));
        }
    }
    Ok(out)
}
