//! Periods of c² = ∏(a − b_j), classical bilinear relations, cohomology form indices,
//! and the small-ν degeneration of the deformed pairing.
//!
//! Branch points are sorted by real part (ties by imaginary part); cut k joins
//! b_{2k−1}, b_{2k}. The a-cycle a_k is a stadium around cut k, the b-cycle b_k a stadium
//! around b_{2k}, …, b_{2n−1}. Along every contour c is continued step by step, always
//! taking the square root nearest the previous value, with |Δ arg c| < π/4 enforced; a
//! loop that does not return to its starting sign is a monodromy error.

use crate::pairing::{pairing, PairingSpec, Poly};
use crate::quadrature::gauss_legendre;
use crate::report::CheckReport;
use crate::special_functions::ln_gamma;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperellipticCurve {
    /// sorted branch points
    pub branch_points: Vec<C64>,
}

impl HyperellipticCurve {
    pub fn new(mut b: Vec<C64>) -> Result<Self> {
        if b.len() < 4 || b.len() % 2 != 0 {
            return Err(Error::Parameter(format!("need an even number ≥ 4 of branch points, got {}", b.len())));
        }
        b.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parameter("branch points must be finite".into()));
        }
        if min_separation(&b) < 1e-10 {
            return Err(Error::Singular("coincident branch points".into()));
        }
        Ok(Self { branch_points: b })
    }

    pub fn real(b: &[f64]) -> Result<Self> {
        Self::new(b.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.branch_points.len() / 2
    }

    pub fn genus(&self) -> usize {
        self.n() - 1
    }

    /// c on the sheet where c ~ aⁿ at infinity, with cuts on the segments [b_{2k−1}, b_{2k}].
    pub fn c_cut(&self, a: C64) -> C64 {
        self.branch_points.chunks(2).map(|p| {
            let m = 0.5 * (p[0] + p[1]);
            let r = 0.5 * (p[1] - p[0]);
            let w = a - m;
            w * (1.0 - r * r / (w * w)).sqrt()
        }).product()
    }

    fn c_squared(&self, a: C64) -> C64 {
        self.branch_points.iter().map(|b| a - b).product()
    }
}

fn min_separation(b: &[C64]) -> f64 {
    let mut m = f64::INFINITY;
    for (i, x) in b.iter().enumerate() {
        for y in &b[i + 1..] {
            m = m.min((x - y).norm());
        }
    }
    m
}

/// A cycle as the set of enclosed branch points (0-based, contiguous in sorted order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub first: usize,
    pub last: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleBasis {
    pub a: Vec<Cycle>,
    pub b: Vec<Cycle>,
}

impl CycleBasis {
    /// a_k around {b_{2k−1}, b_{2k}}, b_k around {b_{2k}, …, b_{2n−1}} (1-based), k = 1…g.
    pub fn standard(n: usize) -> Self {
        let g = n - 1;
        Self {
            a: (0..g).map(|k| Cycle { first: 2 * k, last: 2 * k + 1 }).collect(),
            b: (0..g).map(|k| Cycle { first: 2 * k + 1, last: 2 * n - 2 }).collect(),
        }
    }
}

/// Stadium around the segment [z0, z1] at clearance δ, counterclockwise from the top middle.
struct Stadium {
    z0: C64,
    z1: C64,
    delta: f64,
}

impl Stadium {
    /// Pieces as (start, end, center) — center = None for straight pieces; arcs run from
    /// angle `start` to `end` (radians, measured from the axis direction).
    fn pieces(&self) -> Vec<(C64, C64, Option<(C64, f64, f64)>)> {
        let d = self.z1 - self.z0;
        let u = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let v = I * u;
        let top_mid = 0.5 * (self.z0 + self.z1) + self.delta * v;
        let (z0, z1, dl) = (self.z0, self.z1, self.delta);
        vec![
            (top_mid, z0 + dl * v, None),
            (z0 + dl * v, z0 - dl * v, Some((z0, FRAC_PI_2, 3.0 * FRAC_PI_2))),
            (z0 - dl * v, z1 - dl * v, None),
            (z1 - dl * v, z1 + dl * v, Some((z1, -FRAC_PI_2, FRAC_PI_2))),
            (z1 + dl * v, top_mid, None),
        ]
    }

    fn axis(&self) -> C64 {
        let d = self.z1 - self.z0;
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    }

    /// Nodes a_k, weights da_k for Gauss panels of length ≤ h.
    fn rule(&self, h: f64, order: usize) -> Vec<(C64, C64)> {
        let (x, w) = gauss_legendre(order);
        let u = self.axis();
        let mut out = Vec::new();
        for (s, e, arc) in self.pieces() {
            match arc {
                None => {
                    let len = (e - s).norm();
                    let panels = ((len / h).ceil() as usize).max(1);
                    for p in 0..panels {
                        let a = s + (e - s) * (p as f64 / panels as f64);
                        let b = s + (e - s) * ((p + 1) as f64 / panels as f64);
                        for (xi, wi) in x.iter().zip(&w) {
                            out.push((a + (b - a) * (0.5 * (xi + 1.0)), (b - a) * (0.5 * wi)));
                        }
                    }
                }
                Some((c, t0, t1)) => {
                    let len = self.delta * (t1 - t0);
                    let panels = ((len / h).ceil() as usize).max(2);
                    for p in 0..panels {
                        let ta = t0 + (t1 - t0) * p as f64 / panels as f64;
                        let tb = t0 + (t1 - t0) * (p + 1) as f64 / panels as f64;
                        for (xi, wi) in x.iter().zip(&w) {
                            let t = ta + (tb - ta) * 0.5 * (xi + 1.0);
                            let e = u * (I * t).exp();
                            out.push((c + self.delta * e, I * self.delta * e * (0.5 * (tb - ta) * wi)));
                        }
                    }
                }
            }
        }
        out
    }
}

fn dist_to_segment(p: C64, z0: C64, z1: C64) -> f64 {
    let d = z1 - z0;
    if d.norm() == 0.0 {
        return (p - z0).norm();
    }
    let t = ((p - z0) * d.conj()).re / d.norm_sqr();
    (p - (z0 + d * t.clamp(0.0, 1.0))).norm()
}

/// Settings for contour quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodSpec {
    /// clearance as a fraction of the minimal branch separation
    pub clearance: f64,
    pub order: usize,
    pub tol: f64,
}

impl Default for PeriodSpec {
    fn default() -> Self {
        Self { clearance: 0.1, order: 16, tol: 1e-13 }
    }
}

/// Integrals ∮ p(a)/c da of several numerators over one cycle.
pub fn cycle_integrals(curve: &HyperellipticCurve, cycle: Cycle, polys: &[Poly], spec: &PeriodSpec) -> Result<Vec<C64>> {
    let b = &curve.branch_points;
    if cycle.first > cycle.last || cycle.last >= b.len() || (cycle.last - cycle.first) % 2 == 0 {
        return Err(Error::Parameter(format!("cycle {cycle:?} must enclose an even number of branch points")));
    }
    let delta = spec.clearance * min_separation(b);
    let st = Stadium { z0: b[cycle.first], z1: b[cycle.last], delta };
    for (k, p) in b.iter().enumerate() {
        let d = dist_to_segment(*p, st.z0, st.z1);
        let inside = (cycle.first..=cycle.last).contains(&k);
        if (inside && d > 0.5 * delta) || (!inside && d < 2.0 * delta) {
            return Err(Error::Parameter(format!("contour for {cycle:?} crosses or misses branch point {k}")));
        }
    }
    let mut h = 0.5 * delta;
    let mut prev: Option<Vec<C64>> = None;
    for _ in 0..8 {
        let cur = integrate_loop(curve, &st, polys, h, spec.order)?;
        if let Some(p) = &prev {
            let scale = cur.iter().chain(p).map(|z| z.norm()).fold(1e-300, f64::max);
            let err = cur.iter().zip(p).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            if err <= spec.tol * scale * 10.0 {
                return Ok(cur);
            }
        }
        prev = Some(cur);
        h *= 0.5;
    }
    Err(Error::Quadrature(format!("period over {cycle:?} did not converge")))
}

fn integrate_loop(curve: &HyperellipticCurve, st: &Stadium, polys: &[Poly], h: f64, order: usize) -> Result<Vec<C64>> {
    let rule = st.rule(h, order);
    let start = rule[0].0;
    let mut c = curve.c_cut(start);
    let c_start = c;
    let mut acc = vec![C64::new(0.0, 0.0); polys.len()];
    for (a, da) in &rule {
        let r = curve.c_squared(*a).sqrt();
        let next = if (r - c).norm() <= (r + c).norm() { r } else { -r };
        if (next / c).arg().abs() >= FRAC_PI_4 {
            return Err(Error::Quadrature("sheet step too large; refine the contour".into()));
        }
        c = next;
        for (k, p) in polys.iter().enumerate() {
            acc[k] += p.eval(*a) / c * da;
        }
    }
    // closing step back to the start point
    let back = if (c_start - c).norm() <= (c_start + c).norm() { 1.0 } else { -1.0 };
    if back < 0.0 || (c_start / c).arg().abs() >= FRAC_PI_4 {
        return Err(Error::Check("monodromy closure failed: c changed sheet around the loop".into()));
    }
    Ok(acc)
}

/// Period matrix: rows = differentials, columns = cycles (a-cycles then b-cycles).
#[derive(Clone, Debug, PartialEq)]
pub struct Periods {
    pub a: DMatrix<C64>,
    pub b: DMatrix<C64>,
}

pub fn periods(curve: &HyperellipticCurve, differentials: &[Poly], cycles: &CycleBasis, spec: &PeriodSpec) -> Result<Periods> {
    let n = curve.n();
    for p in differentials {
        if p.degree().is_some_and(|d| d > 2 * n - 2) {
            return Err(Error::Parameter(format!("numerator degree above 2n − 2 = {}", 2 * n - 2)));
        }
    }
    let mut a = DMatrix::zeros(differentials.len(), cycles.a.len());
    let mut b = DMatrix::zeros(differentials.len(), cycles.b.len());
    for (k, cy) in cycles.a.iter().enumerate() {
        for (r, v) in cycle_integrals(curve, *cy, differentials, spec)?.into_iter().enumerate() {
            a[(r, k)] = v;
        }
    }
    for (k, cy) in cycles.b.iter().enumerate() {
        for (r, v) in cycle_integrals(curve, *cy, differentials, spec)?.into_iter().enumerate() {
            b[(r, k)] = v;
        }
    }
    Ok(Periods { a, b })
}

/// Complete elliptic integrals K(k), E(k) by the arithmetic–geometric mean.
pub fn elliptic_ke(k: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Parameter(format!("modulus {k} outside [0, 1)")));
    }
    let (mut a, mut g) = (1.0f64, (1.0 - k * k).sqrt());
    let mut sum = 0.5 * k * k;
    let mut pow = 0.5;
    for _ in 0..60 {
        let c = 0.5 * (a - g);
        pow *= 2.0;
        sum += pow * c * c;
        let an = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = an;
        if c.abs() < 1e-17 {
            break;
        }
    }
    let kk = PI / (2.0 * a);
    Ok((kk, kk * (1.0 - sum)))
}

/// Legendre normal form (1 − a²)(1 − k²a²): a-period of da/c and of (1 − k²a²)da/c are
/// 4K and 4E up to orientation.
pub fn legendre_curve(k: f64) -> Result<HyperellipticCurve> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Parameter(format!("modulus {k} outside (0, 1)")));
    }
    HyperellipticCurve::real(&[-1.0 / k, -1.0, 1.0, 1.0 / k])
}

/// K and E read off the contour periods of the middle cut [−1, 1].
pub fn ke_from_periods(k: f64, spec: &PeriodSpec) -> Result<(C64, C64)> {
    let curve = legendre_curve(k)?;
    // c² = (a²−1)(k²a²−1)·… normalized: ∏(a−b_j) = k^{−2}(1−a²)(1−k²a²)
    let polys = [Poly::from_real(&[1.0]), Poly::from_real(&[1.0, 0.0, -k * k])];
    let v = cycle_integrals(&curve, Cycle { first: 1, last: 2 }, &polys, spec)?;
    // on the middle cut c = ±i·√((1−a²)(1−k²a²))/k: ∮ = 2·(±i/k)^{-1}·2∫₀¹
    let scale = 4.0 * k;
    Ok((v[0] / scale, v[1] / scale))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticComparison {
    pub k: f64,
    pub k_period: f64,
    pub k_agm: f64,
    pub e_period: f64,
    pub e_agm: f64,
    pub residual: f64,
}

/// |period-derived K, E| against the AGM values for each modulus.
pub fn check_genus1(moduli: &[f64], tol: f64) -> Result<(CheckReport, Vec<EllipticComparison>)> {
    let spec = PeriodSpec::default();
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &k in moduli {
        let (kp, ep) = ke_from_periods(k, &spec)?;
        let (ka, ea) = elliptic_ke(k)?;
        let r = ((kp.norm() - ka).abs() / ka).max((ep.norm() - ea).abs() / ea);
        // phases must agree between the two differentials
        let phase = (kp / kp.norm() - ep / ep.norm()).norm();
        let r = r.max(phase);
        worst = worst.max(r);
        rows.push(EllipticComparison { k, k_period: kp.norm(), k_agm: ka, e_period: ep.norm(), e_agm: ea, residual: r });
    }
    let rep = CheckReport::new("genus1-elliptic", worst, tol, moduli.len()).with_details(json!({ "cases": rows }));
    Ok((rep, rows))
}

/// Legendre's relation EK′ + E′K − KK′ = π/2 with all four integrals from contour periods.
pub fn check_legendre(k: f64, tol: f64) -> Result<CheckReport> {
    let spec = PeriodSpec::default();
    let kp = (1.0 - k * k).sqrt();
    let (kk, ee) = ke_from_periods(k, &spec)?;
    let (kk2, ee2) = ke_from_periods(kp, &spec)?;
    let (kk, ee, kk2, ee2) = (kk.norm(), ee.norm(), kk2.norm(), ee2.norm());
    let r = (ee * kk2 + ee2 * kk - kk * kk2 - FRAC_PI_2).abs();
    Ok(CheckReport::new("legendre-relation", r, tol, 1).with_details(json!({ "k": k, "K": kk, "E": ee, "K'": kk2, "E'": ee2 })))
}

/// Laurent coefficients of 1/c = a^{−n} Σ e_m a^{−m} at infinity (sheet c ~ aⁿ).
fn inverse_c_series(b: &[C64], terms: usize) -> Vec<C64> {
    // ∏(1 − b_j t)^{−1/2}
    let mut s = vec![C64::new(0.0, 0.0); terms];
    s[0] = C64::new(1.0, 0.0);
    for bj in b {
        // (1 − bt)^{−1/2} = Σ C(2m, m)/4^m (bt)^m
        let mut f = vec![C64::new(0.0, 0.0); terms];
        let mut coef = 1.0;
        for (m, fm) in f.iter_mut().enumerate() {
            *fm = coef * bj.powu(m as u32);
            coef *= (2 * m + 1) as f64 / (2 * m + 2) as f64;
        }
        let mut out = vec![C64::new(0.0, 0.0); terms];
        for i in 0..terms {
            for j in 0..terms - i {
                out[i + j] += s[i] * f[j];
            }
        }
        s = out;
    }
    s
}

/// Second-kind basis for the bilinear relation: a^0…a^{g−1} (holomorphic) and
/// a^i − e_{i−n+1}a^{n−1}, i = n…2n−2 (residues at infinity removed).
pub fn second_kind_basis(curve: &HyperellipticCurve) -> Vec<Poly> {
    let n = curve.n();
    let e = inverse_c_series(&curve.branch_points, 2 * n);
    let mut out: Vec<Poly> = (0..n - 1).map(|k| Poly::monomial(k)).collect();
    for i in n..=2 * n - 2 {
        let mut c = vec![C64::new(0.0, 0.0); i + 1];
        c[i] = C64::new(1.0, 0.0);
        c[n - 1] = -e[i - n + 1];
        out.push(Poly::new(c));
    }
    out
}

/// 2πi Σ_{∞±} Res(F_p ω_q) with F_p = ∫ω_p, for residue-free differentials.
pub fn residue_matrix(curve: &HyperellipticCurve, polys: &[Poly]) -> DMatrix<C64> {
    let n = curve.n() as i64;
    let terms = 4 * n as usize + 4;
    let e = inverse_c_series(&curve.branch_points, terms);
    // Laurent expansion of p(a)/c in powers a^k, k from −(n + terms) up to deg − n
    let laurent = |p: &Poly| -> Vec<(i64, C64)> {
        let mut out = Vec::new();
        for (i, ci) in p.coeffs.iter().enumerate() {
            for (m, em) in e.iter().enumerate() {
                out.push((i as i64 - n - m as i64, ci * em));
            }
        }
        out
    };
    let k = polys.len();
    DMatrix::from_fn(k, k, |r, c| {
        let f = laurent(&polys[r]);
        let g = laurent(&polys[c]);
        // F = Σ c_k a^{k+1}/(k+1); coefficient of a^{−1} in F·g
        let mut res = C64::new(0.0, 0.0);
        for (kf, cf) in &f {
            if *kf == -1 {
                continue;
            }
            for (kg, cg) in &g {
                if kf + 1 + kg == -1 {
                    res += cf / (*kf as f64 + 1.0) * cg;
                }
            }
        }
        // Res at a = ∞ is minus the a^{−1} coefficient; both sheets contribute equally
        2.0 * PI * I * (-2.0 * res)
    })
}

/// Bilinear form Σ_k (A_pk B_qk − B_pk A_qk) from period data.
pub fn bilinear_form(p: &Periods) -> DMatrix<C64> {
    &p.a * p.b.transpose() - &p.b * p.a.transpose()
}

/// Residual ‖bilinear(P) − expected‖ / max(1, ‖expected‖).
pub fn check_classical_riemann(p: &Periods, expected: &DMatrix<C64>, genus: usize, tol: f64) -> Result<CheckReport> {
    if p.a.ncols() != genus || p.b.ncols() != genus || p.a.nrows() != expected.nrows() || p.b.nrows() != expected.nrows() {
        return Err(Error::Dimension("incomplete period data".into()));
    }
    let m = bilinear_form(p);
    let scale = expected.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let r = (m - expected).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
    Ok(CheckReport::new(format!("riemann-bilinear-genus{genus}"), r, tol, 1))
}

/// Periods of the second-kind basis and the bilinear relation against the residue matrix.
pub fn check_bilinear(curve: &HyperellipticCurve, tol: f64) -> Result<CheckReport> {
    let basis = second_kind_basis(curve);
    let per = periods(curve, &basis, &CycleBasis::standard(curve.n()), &PeriodSpec::default())?;
    let expected = residue_matrix(curve, &basis);
    let rep = check_classical_riemann(&per, &expected, curve.genus(), tol)?;
    // the holomorphic block alone is the symmetric-period-matrix condition
    let g = curve.genus();
    let hol = bilinear_form(&per).view((0, 0), (g, g)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(rep.with_details(json!({
        "branch_points": curve.branch_points.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "holomorphic_block": hol,
    })))
}

/// Strictly increasing (n−1)-tuples from {0, …, 2n−2}, lexicographic.
pub fn enumerate_forms(n: usize) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(Error::Parameter("n ≥ 2".into()));
    }
    Ok(crate::poly::mpoly::combinations(2 * n - 1, n - 1))
}

/// lim (2I₁(x) − log x) for the φ decomposition: −log 2π + 2 log(Γ(1/4)/Γ(3/4)).
pub fn phi_log_constant() -> f64 {
    let g14 = ln_gamma(C64::new(0.25, 0.0)).re;
    let g34 = ln_gamma(C64::new(0.75, 0.0)).re;
    -(2.0 * PI).ln() + 2.0 * (g14 - g34)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLimit {
    pub nu: f64,
    pub deformed: C64,
    /// κ·N·∮ p/c da with the calibrated constant κ
    pub classical: C64,
    /// ratio deformed / (N ∮ p/c da) before snapping
    pub raw_ratio: C64,
    pub gap: f64,
}

/// log N with φ ≈ e^{−max(α,β)}·2√ν e^{−C/2}/√|a−b| for small ν: the weight concentrates
/// on α between the two smallest rapidities, where aA∏φ ≈ N'·1/c and dα = da/(2νa).
fn log_normalization(betas: &[f64], nu: f64) -> f64 {
    let n2 = betas.len() as f64;
    let mut s = betas.to_vec();
    s.sort_by(f64::total_cmp);
    n2 * ((2.0 * nu.sqrt()).ln() - 0.5 * phi_log_constant()) - s[1..].iter().sum::<f64>() - (2.0 * nu).ln()
}

/// Deformed pairing ⟨1|p⟩ at coupling ν against the a₁-period of p(a)/c for the curve with
/// b_j = e^{2νβ_j}; `kappa` is the calibrated constant (None: report the raw ratio only).
pub fn classical_limit_pairing(p: &Poly, b: &[f64], nu: f64, kappa: Option<C64>) -> Result<ClassicalLimit> {
    if nu > 0.05 {
        return Err(Error::Parameter(format!("classical limit needs ν ≤ 0.05, got {nu}")));
    }
    if b.iter().any(|&x| x <= 0.0) {
        return Err(Error::Parameter("branch points b_j must be positive".into()));
    }
    let curve = HyperellipticCurve::real(b)?;
    let betas: Vec<f64> = b.iter().map(|x| x.ln() / (2.0 * nu)).collect();
    if p.coeffs.iter().all(|c| c.norm() == 0.0) {
        let z = C64::new(0.0, 0.0);
        return Ok(ClassicalLimit { nu, deformed: z, classical: z, raw_ratio: C64::new(f64::NAN, 0.0), gap: 0.0 });
    }
    let spec = PairingSpec::real(&betas, nu)?;
    let deformed = pairing(&Poly::from_real(&[1.0]), p, &spec)?.value;
    let per = cycle_integrals(&curve, CycleBasis::standard(curve.n()).a[0], std::slice::from_ref(p), &PeriodSpec::default())?[0];
    let scaled = per * log_normalization(&betas, nu).exp();
    let raw_ratio = deformed / scaled;
    let classical = kappa.unwrap_or(raw_ratio) * scaled;
    let gap = (deformed - classical).norm() / deformed.norm();
    Ok(ClassicalLimit { nu, deformed, classical, raw_ratio, gap })
}

/// Snap a ratio to the nearest of ±1/2, ±i/2, ±1, ±i.
pub fn snap_constant(r: C64) -> C64 {
    let cands = [0.5, -0.5, 1.0, -1.0].iter().flat_map(|&x| [C64::new(x, 0.0), C64::new(0.0, x)]).collect::<Vec<_>>();
    *cands.iter().min_by(|x, y| (*x - r).norm().total_cmp(&(*y - r).norm())).unwrap()
}

/// Calibrate κ at the smallest ν, then record the gap over the scan.
pub fn classical_limit_scan(b: &[f64], nus: &[f64], tol: f64) -> Result<(CheckReport, Vec<ClassicalLimit>)> {
    let smallest = nus.iter().cloned().fold(f64::INFINITY, f64::min);
    let p = Poly::from_real(&[1.0]);
    let cal = classical_limit_pairing(&p, b, smallest, None)?;
    let kappa = snap_constant(cal.raw_ratio);
    let rows: Vec<ClassicalLimit> = nus.iter().map(|&nu| classical_limit_pairing(&p, b, nu, Some(kappa))).collect::<Result<_>>()?;
    let mut sorted = rows.clone();
    sorted.sort_by(|x, y| y.nu.total_cmp(&x.nu));
    let decreasing = sorted.windows(2).all(|w| w[1].gap < w[0].gap);
    let last = sorted.last().map(|r| r.gap).unwrap_or(f64::NAN);
    let mut rep = CheckReport::new("classical-limit-gap", last, tol, rows.len());
    rep.pass = rep.pass && decreasing;
    Ok((
        rep.with_details(json!({
            "kappa": [kappa.re, kappa.im],
            "calibration_ratio": [cal.raw_ratio.re, cal.raw_ratio.im],
            "decreasing": decreasing,
            "gaps": rows.iter().map(|r| json!({ "nu": r.nu, "gap": r.gap })).collect::<Vec<_>>(),
        })),
        rows,
    ))
}
