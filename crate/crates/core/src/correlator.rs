//! χ-expansion of inhomogeneous correlators from externally supplied coefficient tables,
//! the n = 1 case derived from the two-point qKZ solution, and δ → 0 specialization limits.
//!
//! Outputs are defined up to the omitted scalar prefactor ∏ζ⁻¹(β_i − β_j).

use crate::qkz::{
    residual_exchange, residual_shift, residual_specialization, singlet_hat, singlet_projector, two_point_level4,
    unit_candidate, CandidateSolution, Gauge, Level,
};
use crate::report::CheckReport;
use crate::rmatrix::Anisotropy;
use crate::special_functions::chi;
use crate::{Error, Result, C64};
use nalgebra::DVector;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);

/// term c·∏λ_k^{p_k}
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub c: C64,
    pub pow: Vec<u32>,
}

/// Coefficient Q(λ₁, …, λ_n): a constant or a ratio of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub enum QCoeff {
    Constant(C64),
    Rational { num: Vec<Term>, den: Vec<Term> },
}

impl QCoeff {
    pub fn eval(&self, lambdas: &[f64]) -> Result<C64> {
        let poly = |ts: &[Term]| -> C64 {
            ts.iter()
                .map(|t| t.c * t.pow.iter().zip(lambdas).map(|(&p, l)| l.powi(p as i32)).product::<f64>())
                .sum()
        };
        match self {
            QCoeff::Constant(c) => Ok(*c),
            QCoeff::Rational { num, den } => {
                let d = poly(den);
                if d.norm() < 1e-300 {
                    return Err(Error::Singular(format!("Q denominator vanishes at λ = {lambdas:?}")));
                }
                Ok(poly(num) / d)
            }
        }
    }

    fn max_vars(&self) -> usize {
        match self {
            QCoeff::Constant(_) => 0,
            QCoeff::Rational { num, den } => num.iter().chain(den).map(|t| t.pow.len()).max().unwrap_or(0),
        }
    }
}

/// (m, k₁…k_{2m} (1-based), ε₁…ε_{2n} ∈ {0, 1})
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QKey {
    pub m: usize,
    pub ks: Vec<usize>,
    pub eps: Vec<u8>,
}

impl std::fmt::Display for QKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(m={}, ks={:?}, eps={:?})", self.m, self.ks, self.eps)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ChiExpansion {
    pub n: usize,
    pub tables: BTreeMap<QKey, QCoeff>,
}

/// Canonical index tuples for m disjoint pairs (k₁<k₂), (k₃<k₄), … with k₁ < k₃ < ⋯.
pub fn canonical_tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(free: &[usize], m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 0 {
            out.push(cur.clone());
            return;
        }
        for (i, &a) in free.iter().enumerate() {
            for (j, &b) in free.iter().enumerate().skip(i + 1) {
                // later pairs must start after a
                let rest: Vec<usize> = free.iter().enumerate().filter(|&(t, &x)| t != i && t != j && x > a).map(|(_, &x)| x).collect();
                cur.extend([a, b]);
                rec(&rest, m - 1, cur, out);
                cur.truncate(cur.len() - 2);
            }
        }
    }
    let mut out = Vec::new();
    if 2 * m <= n {
        rec(&(1..=n).collect::<Vec<_>>(), m, &mut Vec::new(), &mut out);
    }
    out
}

impl ChiExpansion {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 6 {
            return Err(Error::OutOfRange(format!("n = {n} outside 1…6")));
        }
        Ok(Self { n, tables: BTreeMap::new() })
    }

    pub fn insert(&mut self, key: QKey, q: QCoeff) -> Result<()> {
        self.validate_key(&key)?;
        if q.max_vars() > self.n {
            return Err(Error::Dimension(format!("coefficient uses more than n = {} variables", self.n)));
        }
        self.tables.insert(key, q);
        Ok(())
    }

    fn validate_key(&self, k: &QKey) -> Result<()> {
        let n = self.n;
        if k.m > n / 2 {
            return Err(Error::Parameter(format!("m = {} exceeds ⌊n/2⌋ in {k}", k.m)));
        }
        if k.ks.len() != 2 * k.m {
            return Err(Error::Dimension(format!("index tuple must have 2m entries in {k}")));
        }
        if k.ks.iter().any(|&x| x == 0 || x > n) || k.ks.iter().collect::<BTreeSet<_>>().len() != k.ks.len() {
            return Err(Error::Parameter(format!("indices must be distinct in 1…{n} in {k}")));
        }
        if k.eps.len() != 2 * n || k.eps.iter().any(|&e| e > 1) {
            return Err(Error::Parameter(format!("ε needs 2n = {} entries in {{0, 1}} in {k}", 2 * n)));
        }
        Ok(())
    }

    /// Every canonical tuple of every m in use, for every ε in use.
    pub fn required_keys(&self) -> Vec<QKey> {
        let ms: BTreeSet<usize> = self.tables.keys().map(|k| k.m).collect();
        let eps: BTreeSet<&Vec<u8>> = self.tables.keys().map(|k| &k.eps).collect();
        let mut out = Vec::new();
        for &m in &ms {
            for ks in canonical_tuples(self.n, m) {
                for e in &eps {
                    out.push(QKey { m, ks: ks.clone(), eps: (*e).clone() });
                }
            }
        }
        out
    }

    /// Σ_m Σ_k Q_k^ε(λ) ∏ χ(λ_{k₁} − λ_{k₂})⋯ as a vector on 2n sites (site 1 slowest).
    pub fn eval(&self, lambdas: &[f64], nu: f64) -> Result<DVector<C64>> {
        if lambdas.len() != self.n {
            return Err(Error::Dimension(format!("{} spectral parameters for n = {}", lambdas.len(), self.n)));
        }
        for k in self.required_keys() {
            if !self.tables.contains_key(&k) {
                return Err(Error::Parameter(format!("missing Q table entry {k}")));
            }
        }
        let mut chis: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        let mut out = DVector::zeros(1 << (2 * self.n));
        for (k, q) in &self.tables {
            let mut prod = q.eval(lambdas)?;
            for p in k.ks.chunks(2) {
                let key = (p[0], p[1]);
                let v = match chis.get(&key) {
                    Some(v) => *v,
                    None => {
                        let v = chi(C64::new(lambdas[p[0] - 1] - lambdas[p[1] - 1], 0.0), nu)?;
                        chis.insert(key, v);
                        v
                    }
                };
                prod *= v;
            }
            let idx = k.eps.iter().fold(0usize, |acc, &e| 2 * acc + e as usize);
            out[idx] += prod;
        }
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = v["n"].as_u64().ok_or_else(|| Error::Parse("missing integer \"n\"".into()))? as usize;
        let mut out = Self::new(n)?;
        let entries = v["entries"].as_array().ok_or_else(|| Error::Parse("missing array \"entries\"".into()))?;
        for (i, e) in entries.iter().enumerate() {
            let ctx = |what: &str| Error::Parse(format!("entry {i}: {what}"));
            let m = e["m"].as_u64().ok_or_else(|| ctx("\"m\" must be an integer"))? as usize;
            let ints = |f: &str| -> Result<Vec<u64>> {
                e[f].as_array()
                    .ok_or_else(|| ctx(&format!("\"{f}\" must be an array")))?
                    .iter()
                    .map(|x| x.as_u64().ok_or_else(|| ctx(&format!("\"{f}\" must hold non-negative integers"))))
                    .collect()
            };
            let ks = ints("ks")?.into_iter().map(|x| x as usize).collect();
            let eps = ints("eps")?.into_iter().map(|x| x.min(255) as u8).collect();
            let q = parse_coeff(&e["coeff"]).map_err(|err| ctx(&err.to_string()))?;
            out.insert(QKey { m, ks, eps }, q)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .tables
            .iter()
            .map(|(k, q)| json!({ "m": k.m, "ks": k.ks, "eps": k.eps, "coeff": coeff_json(q) }))
            .collect();
        json!({ "n": self.n, "entries": entries })
    }
}

fn parse_complex(v: &Value) -> Result<C64> {
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(Error::Parse("complex numbers are [re, im]".into())),
        },
        _ => Err(Error::Parse(format!("expected a number or [re, im], got {v}"))),
    }
}

fn parse_terms(v: &Value) -> Result<Vec<Term>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("polynomial must be an array of terms".into()))?
        .iter()
        .map(|t| {
            let c = parse_complex(&t["c"])?;
            let pow = match &t["pow"] {
                Value::Null => Vec::new(),
                p => p
                    .as_array()
                    .ok_or_else(|| Error::Parse("\"pow\" must be an array".into()))?
                    .iter()
                    .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(|| Error::Parse("powers are non-negative integers".into())))
                    .collect::<Result<_>>()?,
            };
            Ok(Term { c, pow })
        })
        .collect()
}

/// number | [re, im] | {"num": [terms], "den": [terms]} with term {"c": number | [re, im], "pow": [p₁…]}
pub fn parse_coeff(v: &Value) -> Result<QCoeff> {
    if let Some(obj) = v.as_object() {
        let num = parse_terms(obj.get("num").ok_or_else(|| Error::Parse("rational coefficient needs \"num\"".into()))?)?;
        let den = match obj.get("den") {
            Some(d) => parse_terms(d)?,
            None => vec![Term { c: C64::new(1.0, 0.0), pow: vec![] }],
        };
        return Ok(QCoeff::Rational { num, den });
    }
    Ok(QCoeff::Constant(parse_complex(v)?))
}

fn coeff_json(q: &QCoeff) -> Value {
    let cj = |c: &C64| json!([c.re, c.im]);
    match q {
        QCoeff::Constant(c) => cj(c),
        QCoeff::Rational { num, den } => {
            let tj = |ts: &[Term]| ts.iter().map(|t| json!({ "c": cj(&t.c), "pow": t.pow })).collect::<Vec<_>>();
            json!({ "num": tj(num), "den": tj(den) })
        }
    }
}

// ---- δ → 0 specialization

/// Regulated rapidities β_k = λ_k − πi/2 + iδ, β_{2n−k+1} = λ_k + πi/2 − iδ.
pub fn specialized_betas(lambdas: &[f64], delta: f64) -> Vec<C64> {
    let n = lambdas.len();
    let mut b = vec![C64::new(0.0, 0.0); 2 * n];
    for (k, &l) in lambdas.iter().enumerate() {
        b[k] = C64::new(l, -0.5 * PI + delta);
        b[2 * n - 1 - k] = C64::new(l, 0.5 * PI - delta);
    }
    b
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitSpec {
    /// decreasing regulators
    pub deltas: Vec<f64>,
    /// accepted relative size of the extrapolation error estimate
    pub rtol: f64,
}

impl Default for LimitSpec {
    fn default() -> Self {
        Self { deltas: vec![1e-2, 5e-3, 2.5e-3], rtol: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Limit {
    pub value: DVector<C64>,
    pub error: f64,
}

/// Polynomial (Richardson/Neville) extrapolation of vectors to δ = 0.
fn extrapolate(deltas: &[f64], vals: &[DVector<C64>]) -> DVector<C64> {
    let mut t: Vec<DVector<C64>> = vals.to_vec();
    let k = deltas.len();
    for lvl in 1..k {
        for i in 0..k - lvl {
            let (a, b) = (deltas[i], deltas[i + lvl]);
            t[i] = (&t[i + 1] * C64::new(a, 0.0) - &t[i] * C64::new(b, 0.0)) / C64::new(a - b, 0.0);
        }
    }
    t.swap_remove(0)
}

pub fn limit_specialize(g: &CandidateSolution, lambdas: &[f64], spec: &LimitSpec) -> Result<Limit> {
    let d = &spec.deltas;
    if d.len() < 2 || d.iter().any(|&x| x <= 0.0) || d.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parameter("δ ladder must hold ≥ 2 positive, strictly decreasing values".into()));
    }
    if g.n_beta != 2 * lambdas.len() {
        return Err(Error::Dimension(format!("candidate has {} slots, specialization needs {}", g.n_beta, 2 * lambdas.len())));
    }
    let thetas = vec![C64::new(0.0, 0.0); g.n_theta];
    let vals: Vec<DVector<C64>> = d.iter().map(|&x| g.eval(&specialized_betas(lambdas, x), &thetas)).collect::<Result<_>>()?;
    let full = extrapolate(d, &vals);
    let coarse = extrapolate(&d[1..], &vals[1..]);
    let error = (&full - &coarse).norm();
    if !error.is_finite() || error > spec.rtol * full.norm().max(1e-300) {
        return Err(Error::Quadrature(format!("δ → 0 limit does not converge (estimate {error:.3e}, |value| {:.3e})", full.norm())));
    }
    Ok(Limit { value: full, error })
}

// ---- n = 1

/// The hatted two-point solution divided by (β₁ − β₂ + πi)², which removes its double zero at
/// the specialization point β₁ − β₂ = −πi.
pub fn n1_regularized(aniso: &Anisotropy) -> Result<CandidateSolution> {
    let g = two_point_level4(aniso, Gauge::Hatted)?;
    Ok(CandidateSolution::new("n1-regularized", Level::Minus4, Gauge::Hatted, 2, 0, move |b, t| {
        let e = b[0] - b[1] + PI * I;
        if e.norm() < 1e-12 {
            return Err(Error::Singular("regularized two-point value needs δ > 0".into()));
        }
        Ok(g.eval(b, t)? / (e * e))
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivedN1 {
    pub value: DVector<C64>,
    /// value = scale·ŝ
    pub scale: C64,
    pub singlet_overlap: f64,
    pub residuals: Vec<CheckReport>,
}

/// Closed-form n = 1 value at (λ − πi/2, λ + πi/2): g = F(β₁−β₂)·ŝ with F ∝ Φ cosh²(β/2),
/// F(πi) = i. Near β = −πi, Φ → E(0) = 1 and cosh²(β/2) ≈ −ε²/4, so the regularized
/// coefficient is −i/(4·Φcosh²|_{πi})·ŝ. Residuals of the system are re-checked first.
pub fn derive_n1(aniso: &Anisotropy, tol: f64) -> Result<DerivedN1> {
    let g = two_point_level4(aniso, Gauge::Hatted)?;
    let lower = unit_candidate(Level::Minus4, Gauge::Hatted, 0);
    let pts = [[C64::new(0.3, -0.2), C64::new(-0.4, 0.1)], [C64::new(1.1, 0.4), C64::new(0.2, -0.3)], [C64::new(-0.7, 0.0), C64::new(0.5, 0.2)]];
    let mut reps = Vec::new();
    for (name, f) in [
        ("exchange", &(|b: &[C64]| residual_exchange(&g, 0, b, &[], aniso)) as &dyn Fn(&[C64]) -> Result<f64>),
        ("shift", &|b: &[C64]| residual_shift(&g, b, &[], aniso)),
        ("specialization", &|b: &[C64]| residual_specialization(&g, &lower, 0, b, &[], aniso)),
    ] {
        let worst = pts.iter().map(|p| f(p)).collect::<Result<Vec<f64>>>()?.into_iter().fold(0.0, f64::max);
        let rep = CheckReport::new(format!("derive-n1-{name}"), worst, tol, pts.len());
        if !rep.pass {
            return Err(Error::Check(format!("n = 1 {name} residual {worst:.3e} above {tol:.1e}: convention drift")));
        }
        reps.push(rep);
    }
    let sc = crate::qkz::TwoPointScalar::new(aniso.nu, Gauge::Hatted)?;
    let scale = -I / (4.0 * sc.limit);
    let s = singlet_hat(aniso);
    let value = DVector::from_iterator(4, s.iter().map(|x| x * scale));
    let p = singlet_projector(1, aniso)?;
    let off = &value - &p.entries * &value;
    let singlet_overlap = off.norm() / value.norm();
    Ok(DerivedN1 { value, scale, singlet_overlap, residuals: reps })
}

/// The shipped n = 1 table: m = 0, one constant per spin component.
pub fn n1_table(d: &DerivedN1) -> Result<ChiExpansion> {
    let mut t = ChiExpansion::new(1)?;
    for (idx, v) in d.value.iter().enumerate() {
        let eps = vec![(idx >> 1) as u8 & 1, idx as u8 & 1];
        t.insert(QKey { m: 0, ks: vec![], eps }, QCoeff::Constant(*v))?;
    }
    Ok(t)
}

/// Derivation, singlet-line check, λ independence and the δ-ladder cross-check.
pub fn check_correlator_n1(aniso: &Anisotropy, tol: f64) -> Result<(Vec<CheckReport>, DerivedN1)> {
    let d = derive_n1(aniso, tol)?;
    let mut out = d.residuals.clone();
    out.push(CheckReport::new("derive-n1-singlet-overlap", d.singlet_overlap, 1e-10, 1).with_details(json!({
        "scale": [d.scale.re, d.scale.im],
        "note": "defined up to the omitted zeta prefactor",
    })));
    let reg = n1_regularized(aniso)?;
    let ladder = LimitSpec { deltas: vec![2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3], rtol: 1e-3 };
    let mut worst = 0.0f64;
    let mut spread = 0.0f64;
    let mut first: Option<DVector<C64>> = None;
    for lam in [0.0, 0.7, -1.3] {
        let l = limit_specialize(&reg, &[lam], &ladder)?;
        worst = worst.max((&l.value - &d.value).norm() / d.value.norm());
        if let Some(f) = &first {
            spread = spread.max((&l.value - f).norm() / f.norm());
        }
        first.get_or_insert(l.value);
    }
    out.push(CheckReport::new("derive-n1-limit-agreement", worst, tol, 3));
    out.push(CheckReport::new("derive-n1-lambda-independence", spread, tol, 3));
    let table = n1_table(&d)?;
    let via_table = table.eval(&[0.4], aniso.nu)?;
    out.push(CheckReport::new("derive-n1-table-roundtrip", (&via_table - &d.value).norm(), 1e-14, 1));
    Ok((out, d))
}
