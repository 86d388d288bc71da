//! U_q(sl₂) generators on (ℂ²)^⊗N and the periodic / open XXZ Hamiltonians.

use crate::report::CheckReport;
use crate::rmatrix::Anisotropy;
use crate::tensor_core::*;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);

/// Which q enters the dressing factors q^{±σ³/4}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QConvention {
    /// q = e^{2πi(ν+1)}
    Shifted,
    /// q = e^{2πiν}
    Plain,
    /// q = e^{iπν}
    Half,
}

impl QConvention {
    pub const ALL: [QConvention; 3] = [QConvention::Shifted, QConvention::Plain, QConvention::Half];

    /// Phase angle θ with q = e^{iθ}.
    pub fn angle(self, nu: f64) -> f64 {
        match self {
            QConvention::Shifted => 2.0 * PI * (nu + 1.0),
            QConvention::Plain => 2.0 * PI * nu,
            QConvention::Half => PI * nu,
        }
    }

    pub fn q_pow(self, nu: f64, x: f64) -> C64 {
        (I * self.angle(nu) * x).exp()
    }
}

#[derive(Clone, Debug)]
pub struct QGGenerators {
    pub n: usize,
    pub convention: QConvention,
    pub s3: ChainOperator,
    pub splus: ChainOperator,
    pub sminus: ChainOperator,
}

fn dressing(conv: QConvention, nu: f64, sign: f64) -> SiteOperator {
    let z = C64::new(0.0, 0.0);
    Matrix2::new(conv.q_pow(nu, sign * 0.25), z, z, conv.q_pow(nu, -sign * 0.25))
}

fn string_op(factors: &[SiteOperator]) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for f in factors {
        let m = DMatrix::from_iterator(2, 2, f.iter().cloned());
        out = out.kronecker(&m);
    }
    out
}

/// S³ = Σσ³_k, S^± = Σ_k q^{−σ³/4}⊗…⊗σ^±_k⊗q^{σ³/4}⊗….
pub fn build_generators_with(n: usize, nu: f64, conv: QConvention) -> Result<QGGenerators> {
    let mut s3 = ChainOperator::zeros(n)?;
    let mut sp = ChainOperator::zeros(n)?;
    let mut sm = ChainOperator::zeros(n)?;
    let left = dressing(conv, nu, -1.0);
    let right = dressing(conv, nu, 1.0);
    for k in 1..=n {
        s3 = s3.add(&embed(&sigma3(), k, n)?)?;
        let mut fp = vec![left; k - 1];
        fp.push(sigma_plus());
        fp.extend(std::iter::repeat(right).take(n - k));
        let mut fm = fp.clone();
        fm[k - 1] = sigma_minus();
        sp.entries += string_op(&fp);
        sm.entries += string_op(&fm);
    }
    Ok(QGGenerators { n, convention: conv, s3, splus: sp, sminus: sm })
}

/// Generators in the convention selected by calibration (plain q = e^{2πiν}).
pub fn build_generators(n: usize, aniso: &Anisotropy) -> Result<QGGenerators> {
    build_generators_with(n, aniso.nu, QConvention::Plain)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n: usize,
    pub delta: f64,
    pub boundary: Boundary,
    pub boundary_coeff: C64,
}

/// Boundary coefficient that makes H_RXXZ commute with the plain-convention generators: −i sin πν.
pub fn default_boundary_coeff(nu: f64) -> C64 {
    C64::new(0.0, -(PI * nu).sin())
}

impl HamiltonianSpec {
    pub fn periodic(n: usize, delta: f64) -> Self {
        Self { n, delta, boundary: Boundary::Periodic, boundary_coeff: C64::new(0.0, 0.0) }
    }

    pub fn open(n: usize, aniso: &Anisotropy) -> Self {
        Self { n, delta: aniso.delta, boundary: Boundary::Open, boundary_coeff: default_boundary_coeff(aniso.nu) }
    }
}

fn bond(j: usize, k: usize, n: usize, delta: f64) -> Result<ChainOperator> {
    let mut h = ChainOperator::zeros(n)?;
    for (s, w) in [(sigma1(), 1.0), (sigma2(), 1.0), (sigma3(), delta)] {
        let t = embed(&s, j, n)?.mul(&embed(&s, k, n)?)?;
        h = h.add(&t.scale(C64::new(w, 0.0)))?;
    }
    Ok(h)
}

pub fn build_hxxz(spec: &HamiltonianSpec) -> Result<ChainOperator> {
    if spec.boundary != Boundary::Periodic {
        return Err(Error::Parameter("open boundary: use build_hrxxz".into()));
    }
    let n = spec.n;
    if n < 2 {
        return Err(Error::Parameter("periodic chain needs N ≥ 2".into()));
    }
    let mut h = ChainOperator::zeros(n)?;
    for k in 1..=n {
        h = h.add(&bond(k, k % n + 1, n, spec.delta)?)?;
    }
    Ok(h)
}

pub fn build_hrxxz(spec: &HamiltonianSpec) -> Result<ChainOperator> {
    if spec.boundary != Boundary::Open {
        return Err(Error::Parameter("periodic boundary: use build_hxxz".into()));
    }
    let n = spec.n;
    if n < 2 {
        return Err(Error::Parameter("open chain needs N ≥ 2".into()));
    }
    let mut h = ChainOperator::zeros(n)?;
    for k in 1..n {
        h = h.add(&bond(k, k + 1, n, spec.delta)?)?;
    }
    let b = embed(&sigma3(), 1, n)?.add(&embed(&sigma3(), n, n)?.scale(C64::new(-1.0, 0.0)))?;
    h.add(&b.scale(spec.boundary_coeff))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Candidate {
    pub label: String,
    pub coeff: C64,
    pub convention: QConvention,
    pub res_splus: f64,
    pub res_sminus: f64,
    pub res_s3: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub n: usize,
    pub nu: f64,
    pub candidates: Vec<Candidate>,
    pub accepted: Vec<String>,
}

/// The default candidate set: ±i√(1−Δ), ±i√(1−Δ²), ±(q̂−q̂⁻¹)/2 for each convention q̂,
/// each tried against the generators of every convention.
pub fn default_candidates(nu: f64) -> Vec<(String, C64)> {
    let d = (PI * nu).cos();
    let mut v = vec![];
    for s in [1.0, -1.0] {
        let sg = if s > 0.0 { "+" } else { "-" };
        v.push((format!("{sg}i*sqrt(1-Delta)"), I * s * (1.0 - d).sqrt()));
        v.push((format!("{sg}i*sqrt(1-Delta^2)"), I * s * (1.0 - d * d).sqrt()));
        for c in QConvention::ALL {
            let q = c.q_pow(nu, 1.0);
            v.push((format!("{sg}(q-1/q)/2[{c:?}]"), s * (q - 1.0 / q) / 2.0));
        }
    }
    v
}

pub fn calibrate_invariance(n: usize, aniso: &Anisotropy, coeffs: &[(String, C64)], tol: f64) -> Result<CalibrationReport> {
    if !(2..=6).contains(&n) {
        return Err(Error::Parameter(format!("calibration uses N in 2..=6, got {n}")));
    }
    let mut out = vec![];
    for conv in QConvention::ALL {
        let g = build_generators_with(n, aniso.nu, conv)?;
        for (label, coeff) in coeffs {
            let spec = HamiltonianSpec { n, delta: aniso.delta, boundary: Boundary::Open, boundary_coeff: *coeff };
            let h = build_hrxxz(&spec)?;
            out.push(Candidate {
                label: format!("{label} @ {conv:?}"),
                coeff: *coeff,
                convention: conv,
                res_splus: commutator(&h, &g.splus)?.norm(),
                res_sminus: commutator(&h, &g.sminus)?.norm(),
                res_s3: commutator(&h, &g.s3)?.norm(),
            });
        }
    }
    let accepted = out
        .iter()
        .filter(|c| c.res_splus.max(c.res_sminus).max(c.res_s3) <= tol)
        .map(|c| c.label.clone())
        .collect();
    Ok(CalibrationReport { n, nu: aniso.nu, candidates: out, accepted })
}

/// ‖[H, S±]‖ and ‖[H, S³]‖ for a fixed Hamiltonian and generator set.
pub fn invariance_residual(h: &ChainOperator, g: &QGGenerators) -> Result<f64> {
    Ok(commutator(h, &g.splus)?
        .norm()
        .max(commutator(h, &g.sminus)?.norm())
        .max(commutator(h, &g.s3)?.norm()))
}

pub fn check_invariance(n: usize, aniso: &Anisotropy, tol: f64) -> Result<CheckReport> {
    let g = build_generators(n, aniso)?;
    let h = build_hrxxz(&HamiltonianSpec::open(n, aniso))?;
    let r = invariance_residual(&h, &g)?;
    Ok(CheckReport::new("qg-invariance", r, tol, 1).with_details(json!({ "n": n, "nu": aniso.nu })))
}

/// Eigenvalues of a general complex operator, sorted by (re, im).
pub fn spectrum(h: &ChainOperator) -> Result<Vec<C64>> {
    eigenvalues(h.entries.clone())
}

fn eigenvalues(m: DMatrix<C64>) -> Result<Vec<C64>> {
    let ev = m
        .try_schur(1e-14, 10_000)
        .ok_or_else(|| Error::Check("Schur iteration did not converge".into()))?
        .eigenvalues()
        .ok_or_else(|| Error::Check("eigenvalues unavailable".into()))?;
    let mut v: Vec<C64> = ev.iter().cloned().collect();
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(v)
}

/// Number of highest-weight vectors of weight 2m (S³ = 2m, S⁺v = 0).
pub fn highest_weight_count(g: &QGGenerators, m: i32) -> Result<usize> {
    let n = g.n;
    let idx: Vec<usize> = (0..1usize << n)
        .filter(|&x| (n as i32 - 2 * x.count_ones() as i32) == 2 * m)
        .collect();
    if idx.is_empty() {
        return Ok(0);
    }
    let cols = DMatrix::from_fn(1 << n, idx.len(), |r, c| g.splus.entries[(r, idx[c])]);
    let sv = cols.singular_values();
    let scale = sv.max().max(1.0);
    let rank = sv.iter().filter(|&&s| s > 1e-10 * scale).count();
    Ok(idx.len() - rank)
}

/// C(N, n) − C(N, n−1) singlets for N = 2n sites.
pub fn singlet_count(two_n: usize) -> usize {
    let n = two_n / 2;
    let c = |a: usize, b: usize| -> usize {
        if b > a {
            return 0;
        }
        (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
    };
    c(two_n, n) - if n == 0 { 0 } else { c(two_n, n - 1) }
}

/// Eigenvalues of H restricted to the S³ = s sector (H commutes with S³).
pub fn sector_spectrum(h: &ChainOperator, s: i32) -> Result<Vec<C64>> {
    let n = h.n;
    let idx: Vec<usize> = (0..1usize << n).filter(|&x| n as i32 - 2 * x.count_ones() as i32 == s).collect();
    if idx.is_empty() {
        return Ok(vec![]);
    }
    let block = DMatrix::from_fn(idx.len(), idx.len(), |r, c| h.entries[(idx[r], idx[c])]);
    eigenvalues(block)
}

/// Spectral consequences of invariance for the open chain: real spectrum, every level of
/// sector S³ = s + 2 reappears in sector s (multiplets), and the S³ = 0 highest-weight
/// count equals the singlet count.
pub fn check_spectrum(n: usize, aniso: &Anisotropy, tol: f64) -> Result<Vec<CheckReport>> {
    let h = build_hrxxz(&HamiltonianSpec::open(n, aniso))?;
    let ev = spectrum(&h)?;
    let imag = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let mut nest = 0.0f64;
    let mut s = (n % 2) as i32;
    let mut lower = sector_spectrum(&h, s)?;
    while s + 2 <= n as i32 {
        let upper = sector_spectrum(&h, s + 2)?;
        for e in &upper {
            let d = lower.iter().map(|x| (x - e).norm()).fold(f64::INFINITY, f64::min);
            nest = nest.max(d);
        }
        lower = upper;
        s += 2;
    }
    let d = json!({ "n": n, "nu": aniso.nu });
    let mut out = vec![
        CheckReport::new(format!("spectrum-real:N={n},nu={}", aniso.nu), imag, tol, ev.len()).with_details(d.clone()),
        CheckReport::new(format!("spectrum-multiplets:N={n},nu={}", aniso.nu), nest, tol, ev.len()).with_details(d.clone()),
    ];
    if n % 2 == 0 {
        let g = build_generators(n, aniso)?;
        let hw = highest_weight_count(&g, 0)?;
        let sc = singlet_count(n);
        out.push(
            CheckReport::new(format!("spectrum-singlets:N={n},nu={}", aniso.nu), (hw as f64 - sc as f64).abs(), 0.0, 1)
                .with_details(json!({ "n": n, "nu": aniso.nu, "highest_weight": hw, "expected": sc })),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_site_generators() {
        let g = build_generators_with(1, 0.3, QConvention::Shifted).unwrap();
        assert!((g.splus.entries.clone() - embed(&sigma_plus(), 1, 1).unwrap().entries).norm() < 1e-15);
        assert!((g.s3.entries.clone() - embed(&sigma3(), 1, 1).unwrap().entries).norm() < 1e-15);
    }

    #[test]
    fn singlet_counts() {
        assert_eq!(singlet_count(2), 1);
        assert_eq!(singlet_count(4), 2);
        assert_eq!(singlet_count(6), 5);
    }
}
