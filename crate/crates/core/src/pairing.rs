//! One-fold pairings ⟨P|p⟩ = ∫ ∏φ(α,β_j) P(A) p(a) aA dα (A = e^α, a = e^{2να}),
//! bases realizing the deformed Riemann relations, and the period matrix.

use crate::quadrature::{gauss_legendre, QuadratureSpec, Rule};
use crate::report::CheckReport;
use crate::special_functions::PhiKernel;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

/// Dense univariate polynomial, ascending coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn monomial(d: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); d + 1];
        c[d] = C64::new(1.0, 0.0);
        Self { coeffs: c }
    }

    pub fn from_real(c: &[f64]) -> Self {
        Self::new(c.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = C64::new(0.0, 0.0);
        Poly::new((0..n).map(|i| *self.coeffs.get(i).unwrap_or(&z) + *o.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingSpec {
    pub betas: Vec<C64>,
    pub nu: f64,
    pub quadrature: QuadratureSpec,
}

impl PairingSpec {
    pub fn new(betas: Vec<C64>, nu: f64) -> Result<Self> {
        let s = Self {
            betas,
            nu,
            quadrature: QuadratureSpec { rule: Rule::GaussPanels, tol: 1e-12, ..QuadratureSpec::default() },
        };
        s.validate()?;
        Ok(s)
    }

    pub fn real(betas: &[f64], nu: f64) -> Result<Self> {
        Self::new(betas.iter().map(|&b| C64::new(b, 0.0)).collect(), nu)
    }

    pub fn n(&self) -> usize {
        self.betas.len() / 2
    }

    /// b_j = e^{2νβ_j}
    pub fn b(&self) -> Vec<C64> {
        self.betas.iter().map(|b| (2.0 * self.nu * b).exp()).collect()
    }

    /// B_j = e^{β_j}
    pub fn big_b(&self) -> Vec<C64> {
        self.betas.iter().map(|b| b.exp()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.betas.is_empty() || self.betas.len() % 2 != 0 {
            return Err(Error::Parameter(format!("need 2n rapidities, got {}", self.betas.len())));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::Parameter(format!("nu = {} outside (0, 1)", self.nu)));
        }
        for b in &self.betas {
            if b.im.abs() >= PI / 2.0 {
                return Err(Error::Strip(format!("rapidity {b} off the φ strip of the real α line")));
            }
        }
        Ok(())
    }

    fn distinct(&self) -> Result<()> {
        for (i, x) in self.betas.iter().enumerate() {
            for y in &self.betas[i + 1..] {
                if (x - y).norm() < 1e-9 {
                    return Err(Error::Singular(format!("coincident rapidities {x}")));
                }
            }
        }
        Ok(())
    }

    /// Decay rate at α → +∞ of the integrand with the given degrees; must be positive.
    pub fn decay_rate(&self, deg_big: usize, deg_small: usize) -> f64 {
        let n2 = self.betas.len() as f64;
        n2 * (1.0 + self.nu) - (deg_big as f64 + 1.0) - 2.0 * self.nu * (deg_small as f64 + 1.0)
    }
}

/// Quadrature nodes on the α line with the weight ∏φ(α,β_j)·aA folded in.
pub struct PairingGrid {
    pub alpha: Vec<f64>,
    pub weight: Vec<C64>,
    pub nu: f64,
}

impl PairingGrid {
    pub fn build(spec: &PairingSpec, deg_big: usize, deg_small: usize, order: usize) -> Result<Self> {
        spec.validate()?;
        let rate = spec.decay_rate(deg_big, deg_small);
        if rate <= 1e-9 {
            return Err(Error::Parameter(format!(
                "degrees ({deg_big}, {deg_small}) exceed the decay budget for n = {}, nu = {}",
                spec.n(),
                spec.nu
            )));
        }
        let tol = spec.quadrature.tol;
        let lo_re = spec.betas.iter().map(|b| b.re).fold(f64::INFINITY, f64::min);
        let hi_re = spec.betas.iter().map(|b| b.re).fold(f64::NEG_INFINITY, f64::max);
        let span = (1e3 / tol).ln();
        let a0 = lo_re - span / (1.0 + 2.0 * spec.nu) - 2.0;
        let a1 = hi_re + span / rate + 4.0;
        if a1 - a0 > 2e4 {
            return Err(Error::Quadrature(format!("integration window {:.3e} too wide (decay rate {rate:.3e})", a1 - a0)));
        }
        let (nodes, wts): (Vec<f64>, Vec<f64>) = match spec.quadrature.rule {
            Rule::GaussPanels => {
                let (x, w) = gauss_legendre(order);
                let panels = ((a1 - a0) / 0.5).ceil() as usize;
                let h = (a1 - a0) / panels as f64;
                (0..panels)
                    .flat_map(|p| {
                        let lo = a0 + p as f64 * h;
                        x.iter().zip(&w).map(move |(xi, wi)| (lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi)).collect::<Vec<_>>()
                    })
                    .unzip()
            }
            Rule::TanhSinh => {
                let h = 1.0 / (order as f64 * 4.0);
                let (c, d) = (0.5 * (a0 + a1), 0.5 * (a1 - a0));
                let m = (3.5 / h) as i64;
                (-m..=m)
                    .map(|k| {
                        let t = k as f64 * h;
                        let s = 0.5 * PI * t.sinh();
                        let w = 0.5 * PI * t.cosh() / (s.cosh() * s.cosh());
                        (c + d * s.tanh(), d * w * h)
                    })
                    .unzip()
            }
        };
        let nu = spec.nu;
        let ymax = spec.betas.iter().map(|b| b.im.abs()).fold(0.0, f64::max);
        let xmax = (a1 - lo_re).max(hi_re - a0);
        let kernel = PhiKernel::new(nu, xmax, ymax, tol.min(1e-13))?;
        let mut weight = Vec::with_capacity(nodes.len());
        for (&al, &w) in nodes.iter().zip(&wts) {
            let a = C64::new(al, 0.0);
            let mut lw = (1.0 + 2.0 * nu) * a;
            for b in &spec.betas {
                lw += kernel.log_phi(a, *b);
            }
            weight.push(lw.exp() * w);
        }
        Ok(Self { alpha: nodes, weight, nu })
    }

    pub fn pair(&self, big: &Poly, small: &Poly) -> C64 {
        self.alpha
            .iter()
            .zip(&self.weight)
            .map(|(&al, w)| {
                let big_a = C64::new(al.exp(), 0.0);
                let a = C64::new((2.0 * self.nu * al).exp(), 0.0);
                w * big.eval(big_a) * small.eval(a)
            })
            .sum()
    }

    /// Pairings of monomials A^u (u < nu_) with a^e (e < ne).
    pub fn monomial_gram(&self, nbig: usize, nsmall: usize) -> DMatrix<C64> {
        let mut g = DMatrix::zeros(nbig, nsmall);
        for (&al, w) in self.alpha.iter().zip(&self.weight) {
            let big_a = al.exp();
            let a = (2.0 * self.nu * al).exp();
            let mut pu = 1.0;
            for u in 0..nbig {
                let mut pe = 1.0;
                for e in 0..nsmall {
                    g[(u, e)] += w * (pu * pe);
                    pe *= a;
                }
                pu *= big_a;
            }
        }
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingValue {
    pub value: C64,
    pub error: f64,
}

/// ⟨P|p⟩ with an error estimate from two Gauss orders.
pub fn pairing(big: &Poly, small: &Poly, spec: &PairingSpec) -> Result<PairingValue> {
    let (Some(db), Some(ds)) = (big.degree(), small.degree()) else {
        return Ok(PairingValue { value: C64::new(0.0, 0.0), error: 0.0 });
    };
    let g1 = PairingGrid::build(spec, db, ds, 16)?;
    let g2 = PairingGrid::build(spec, db, ds, 24)?;
    let v1 = g1.pair(big, small);
    let v2 = g2.pair(big, small);
    let error = (v1 - v2).norm();
    if error > spec.quadrature.tol.max(1e-10) * v2.norm().max(1e-300) * 1e3 {
        return Err(Error::Quadrature(format!("pairing unconverged: {v1} vs {v2}")));
    }
    Ok(PairingValue { value: v2, error })
}

/// Labels ±1…±(n−1) in the order −(n−1), …, −1, 1, …, n−1.
pub fn labels(n: usize) -> Vec<i32> {
    let m = n as i32 - 1;
    (-m..=-1).chain(1..=m).collect()
}

/// Ω[i][j] = sgn(i) δ_{i,−j} over `labels(n)`.
pub fn omega(n: usize) -> DMatrix<C64> {
    let l = labels(n);
    DMatrix::from_fn(l.len(), l.len(), |r, c| {
        if l[r] == -l[c] {
            C64::new(l[r].signum() as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyBasisPair {
    pub n: usize,
    /// s_j for j = −(n−1)…(n−1); index j + n − 1
    pub lower: Vec<Poly>,
    /// S_j keyed by `labels(n)` order
    pub upper: Vec<Poly>,
}

impl PolyBasisPair {
    pub fn s(&self, j: i32) -> &Poly {
        &self.lower[(j + self.n as i32 - 1) as usize]
    }

    pub fn big_s(&self, j: i32) -> &Poly {
        let idx = labels(self.n).iter().position(|&l| l == j).expect("label");
        &self.upper[idx]
    }
}

/// deg S_k = 2k−2, deg S_{−k} = 2k−1.
pub fn upper_degree(k: i32) -> usize {
    if k > 0 {
        (2 * k - 2) as usize
    } else {
        (-2 * k - 1) as usize
    }
}

/// Lower basis: s_j = a^{j+n−1} (monic monomials). Upper basis: S_{−k} monic with no
/// A^{2k−2} term, S_k with leading coefficient fixed by the normalization, solved by a
/// triangular symplectic factorization so that ⟨S_K|s_j⟩ is canonical.
pub fn build_bases(n: usize, spec: &PairingSpec) -> Result<PolyBasisPair> {
    if n < 2 || spec.n() != n {
        return Err(Error::Parameter(format!("build_bases needs n ≥ 2 and 2n rapidities (n = {n})")));
    }
    spec.distinct()?;
    let dim = 2 * n - 2;
    let grid = PairingGrid::build(spec, 2 * n - 3, 2 * n - 2, 20)?;
    let gram = grid.monomial_gram(dim, 2 * n - 1);
    let lab = labels(n);
    // columns of G' in label order: s_j has degree j + n − 1
    let gp = DMatrix::from_fn(dim, dim, |u, c| gram[(u, (lab[c] + n as i32 - 1) as usize)]);
    let om = omega(n);
    let gi = gp.clone().try_inverse().ok_or_else(|| {
        let sv = gp.singular_values();
        Error::Singular(format!("monomial Gram singular, condition {:e}", sv.max() / sv.min()))
    })?;
    // Θ = G'^{−T} Ω G'^{−1} in monomial (position) coordinates
    let theta = gi.transpose() * &om * &gi;
    // Ω in position coordinates: S_k at 2k−2, S_{−k} at 2k−1
    let omp = DMatrix::from_fn(dim, dim, |r, c| {
        if r % 2 == 0 && c == r + 1 {
            C64::new(1.0, 0.0)
        } else if c % 2 == 0 && r == c + 1 {
            C64::new(-1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut l = DMatrix::<C64>::zeros(dim, dim);
    for i in (0..dim).rev() {
        let js: Vec<usize> = (i + 1..dim).collect();
        // unknown rows p for column i
        let unknowns: Vec<usize> =
            if i % 2 == 1 { (i + 1..dim).collect() } else { std::iter::once(i).chain(i + 2..dim).collect() };
        if i % 2 == 1 {
            l[(i, i)] = C64::new(1.0, 0.0);
        }
        if js.is_empty() {
            continue;
        }
        let mut m = DMatrix::zeros(js.len(), unknowns.len());
        let mut rhs = nalgebra::DVector::zeros(js.len());
        for (r, &j) in js.iter().enumerate() {
            let olj = &omp * l.column(j);
            for (c, &p) in unknowns.iter().enumerate() {
                m[(r, c)] = olj[p];
            }
            let fixed: C64 = (0..dim).filter(|p| !unknowns.contains(p)).map(|p| l[(p, i)] * olj[p]).sum();
            rhs[r] = theta[(i, j)] - fixed;
        }
        let sol = m.clone().lu().solve(&rhs).ok_or_else(|| {
            Error::Singular(format!("symplectic factorization breaks down at column {i}"))
        })?;
        for (c, &p) in unknowns.iter().enumerate() {
            l[(p, i)] = sol[c];
        }
        if i % 2 == 0 && l[(i, i)].norm() < 1e-300 {
            return Err(Error::Singular(format!("leading coefficient of S at degree {i} vanishes")));
        }
    }
    let upper: Vec<Poly> = lab
        .iter()
        .map(|&k| {
            let p = upper_degree(k);
            Poly::new((0..=p).map(|u| l[(p, u)]).collect())
        })
        .collect();
    let lower = (0..2 * n - 1).map(Poly::monomial).collect();
    Ok(PolyBasisPair { n, lower, upper })
}

/// V[K][j] = ⟨S_K|s_j⟩ over `labels(n)` (s₀ excluded), plus the s₀ column.
pub fn pairing_matrix(bases: &PolyBasisPair, spec: &PairingSpec) -> Result<(DMatrix<C64>, Vec<C64>)> {
    pairing_matrix_with(bases, spec, 20)
}

/// As `pairing_matrix` with an explicit Gauss order per panel.
pub fn pairing_matrix_with(bases: &PolyBasisPair, spec: &PairingSpec, order: usize) -> Result<(DMatrix<C64>, Vec<C64>)> {
    let n = bases.n;
    let lab = labels(n);
    let dbig = bases.upper.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    let dsmall = bases.lower.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    let grid = PairingGrid::build(spec, dbig, dsmall, order)?;
    let v = DMatrix::from_fn(lab.len(), lab.len(), |r, c| grid.pair(&bases.upper[r], bases.s(lab[c])));
    let s0 = bases.upper.iter().map(|p| grid.pair(p, bases.s(0))).collect();
    Ok((v, s0))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RiemannReport {
    /// Σ_k (⟨S_k|s_i⟩⟨S_{−k}|s_j⟩ − ⟨S_k|s_j⟩⟨S_{−k}|s_i⟩) = sgn(i)δ_{i,−j}, i, j ≠ 0
    pub lower_identity: CheckReport,
    /// Σ_k (⟨S_i|s_k⟩⟨S_j|s_{−k}⟩ − ⟨S_j|s_k⟩⟨S_i|s_{−k}⟩) = sgn(i)δ_{i,−j}
    pub upper_identity: CheckReport,
    /// max_j |Σ_k (⟨S_k|s_0⟩⟨S_{−k}|s_j⟩ − ⟨S_k|s_j⟩⟨S_{−k}|s_0⟩)|: the i = 0 row, diagnostic only
    pub s0_row: f64,
}

impl RiemannReport {
    pub fn pass(&self) -> bool {
        self.lower_identity.pass && self.upper_identity.pass
    }
}

pub fn riemann_residuals(v: &DMatrix<C64>, s0: &[C64], n: usize, tol: f64) -> RiemannReport {
    let om = omega(n);
    let lower = (v.transpose() * &om * v - &om).camax();
    let upper = (v * &om * v.transpose() - &om).camax();
    let lab = labels(n);
    let idx = |k: i32| lab.iter().position(|&l| l == k).unwrap();
    let mut s0_row = 0.0f64;
    for c in 0..lab.len() {
        let mut acc = C64::new(0.0, 0.0);
        for k in 1..n as i32 {
            acc += s0[idx(k)] * v[(idx(-k), c)] - v[(idx(k), c)] * s0[idx(-k)];
        }
        s0_row = s0_row.max(acc.norm());
    }
    let m = lab.len() * lab.len();
    RiemannReport {
        lower_identity: CheckReport::new("riemann:lower", lower, tol, m),
        upper_identity: CheckReport::new("riemann:upper", upper, tol, m),
        s0_row,
    }
}

/// Pairings are recomputed on a finer rule than the one used for construction.
pub fn check_deformed_riemann(bases: &PolyBasisPair, spec: &PairingSpec, tol: f64) -> Result<RiemannReport> {
    let (v, s0) = pairing_matrix_with(bases, spec, 28)?;
    Ok(riemann_residuals(&v, &s0, bases.n, tol))
}

fn binom(a: i64, b: i64) -> i64 {
    if b < 0 || b > a {
        return 0;
    }
    (0..b).fold(1i64, |acc, i| acc * (a - i) / (i + 1))
}

/// dim of the Sp(2n−2) irreducible in Λ^{n−1}: C(2n−2, n−1) − C(2n−2, n−3).
pub fn irreducible_dim(n: usize) -> usize {
    let n = n as i64;
    (binom(2 * n - 2, n - 1) - binom(2 * n - 2, n - 3)) as usize
}

/// (n−1)-subsets of label positions, lexicographic.
fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            rec(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    rec(0, len, k, &mut cur, &mut out);
    out
}

/// Orthonormal basis (columns) of the primitive subspace: the kernel of the symplectic
/// contraction Λ^{n−1} → Λ^{n−3}.
pub fn irreducible_basis(n: usize) -> DMatrix<f64> {
    let lab = labels(n);
    let m = lab.len();
    let k = n - 1;
    let top = subsets(m, k);
    if k < 2 {
        return DMatrix::identity(top.len(), top.len());
    }
    let bottom = subsets(m, k - 2);
    let mut c = DMatrix::<f64>::zeros(bottom.len(), top.len());
    for (col, s) in top.iter().enumerate() {
        for p in 0..k {
            for q in p + 1..k {
                let (x, y) = (lab[s[p]], lab[s[q]]);
                if x != -y {
                    continue;
                }
                let w = x.signum() as f64;
                let sign = if (p + q) % 2 == 1 { 1.0 } else { -1.0 };
                let rest: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != p && i != q).map(|(_, &v)| v).collect();
                let row = bottom.iter().position(|b| *b == rest).unwrap();
                c[(row, col)] += sign * w;
            }
        }
    }
    // kernel via SVD of CᵀC (exact small integers, well conditioned)
    let svd = (c.transpose() * &c).svd(true, true);
    let vt = svd.v_t.unwrap();
    let mut cols = vec![];
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < 1e-9 {
            cols.push(vt.row(i).transpose());
        }
    }
    let mut e = DMatrix::from_columns(&cols);
    // fix signs so the largest entry of each column is positive
    for mut col in e.column_iter_mut() {
        let (i, _) = col.iter().enumerate().fold((0, 0.0), |b, (i, v)| if v.abs() > b.1 + 1e-12 { (i, v.abs()) } else { b });
        if col[i] < 0.0 {
            col.neg_mut();
        }
    }
    e
}

/// Λ^{n−1}(V): minors over (n−1)-subsets of label positions.
pub fn compound(v: &DMatrix<C64>, k: usize) -> DMatrix<C64> {
    let sets = subsets(v.nrows(), k);
    DMatrix::from_fn(sets.len(), sets.len(), |r, c| {
        if k == 0 {
            return C64::new(1.0, 0.0);
        }
        DMatrix::from_fn(k, k, |i, j| v[(sets[r][i], sets[c][j])]).determinant()
    })
}

fn complexify(e: &DMatrix<f64>) -> DMatrix<C64> {
    e.map(|x| C64::new(x, 0.0))
}

/// P[I][J] = ⟨S^J|s_I⟩ from the pairing matrix V.
pub fn period_from_pairings(v: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    if n < 2 {
        return DMatrix::zeros(0, 0);
    }
    let e = complexify(&irreducible_basis(n));
    e.transpose() * compound(v, n - 1).transpose() * &e
}

pub fn period_matrix(bases: &PolyBasisPair, spec: &PairingSpec) -> Result<DMatrix<C64>> {
    if bases.n < 2 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let (v, _) = pairing_matrix(bases, spec)?;
    Ok(period_from_pairings(&v, bases.n))
}

/// Dagger rule: M[I][J] = ⟨S^I|s_J^†⟩ with s_j → sgn(j)s_{−j}; then P⁻¹ = Eᵀ Λ(Ω) E · M,
/// the prefactor being the metric between the upper- and lower-index bases.
pub fn inverse_from_pairings(v: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    if n < 2 {
        return DMatrix::zeros(0, 0);
    }
    let lab = labels(n);
    let vd = DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| {
        let j = lab[c];
        let cj = lab.iter().position(|&l| l == -j).unwrap();
        v[(r, cj)] * j.signum() as f64
    });
    let e = complexify(&irreducible_basis(n));
    let m = e.transpose() * compound(&vd, n - 1) * &e;
    let metric = e.transpose() * compound(&omega(n), n - 1) * &e;
    metric * m
}

#[derive(Clone, Debug)]
pub struct PeriodInversion {
    pub inverse: DMatrix<C64>,
    pub identity_residual: f64,
    pub lu_residual: f64,
}

/// P⁻¹ by the dagger rule, certified against `p` (‖P⁻¹P − I‖, ‖PP⁻¹ − I‖ ≤ tol) and
/// compared against LU inversion.
pub fn invert_period(p: &DMatrix<C64>, bases: &PolyBasisPair, spec: &PairingSpec, tol: f64) -> Result<PeriodInversion> {
    let n = bases.n;
    if n < 2 {
        return Ok(PeriodInversion { inverse: DMatrix::zeros(0, 0), identity_residual: 0.0, lu_residual: 0.0 });
    }
    if p.nrows() != irreducible_dim(n) || !p.is_square() {
        return Err(Error::Dimension(format!("period matrix {}×{}, expected {}", p.nrows(), p.ncols(), irreducible_dim(n))));
    }
    let (v, _) = pairing_matrix(bases, spec)?;
    let inv = inverse_from_pairings(&v, n);
    let d = p.nrows();
    let id = DMatrix::<C64>::identity(d, d);
    let identity_residual = (&inv * p - &id).camax().max((p * &inv - &id).camax());
    if !(identity_residual <= tol) {
        return Err(Error::Check(format!("dagger inverse residual {identity_residual:e} exceeds {tol:e}")));
    }
    let lu = p.clone().try_inverse().ok_or_else(|| Error::Singular("period matrix singular".into()))?;
    let lu_residual = (&inv - lu).camax();
    Ok(PeriodInversion { inverse: inv, identity_residual, lu_residual })
}

/// 2-norm condition number.
pub fn condition_number(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.singular_values();
    sv.max() / sv.min()
}

#[derive(Clone, Debug)]
pub struct PeriodsOutcome {
    pub bases: PolyBasisPair,
    pub riemann: RiemannReport,
    pub period: DMatrix<C64>,
    pub inversion: PeriodInversion,
    pub report: CheckReport,
}

pub fn check_periods(n: usize, spec: &PairingSpec, tol: f64) -> Result<PeriodsOutcome> {
    let bases = build_bases(n, spec)?;
    let riemann = check_deformed_riemann(&bases, spec, tol)?;
    let (v, _) = pairing_matrix(&bases, spec)?;
    let period = period_from_pairings(&v, n);
    let inverse = inverse_from_pairings(&v, n);
    let d = period.nrows();
    let id = DMatrix::<C64>::identity(d, d);
    let identity_residual = (&inverse * &period - &id).camax().max((&period * &inverse - &id).camax());
    let lu = period.clone().try_inverse().ok_or_else(|| Error::Singular("period matrix singular".into()))?;
    let lu_residual = (&inverse - lu).camax();
    let inversion = PeriodInversion { inverse, identity_residual, lu_residual };
    let worst = riemann
        .lower_identity
        .max_residual
        .max(riemann.upper_identity.max_residual)
        .max(identity_residual)
        .max(lu_residual);
    let report = CheckReport::new("periods", worst, tol, 1).with_details(json!({
        "n": n,
        "nu": spec.nu,
        "lower_identity": riemann.lower_identity.max_residual,
        "upper_identity": riemann.upper_identity.max_residual,
        "s0_row": riemann.s0_row,
        "inverse_identity": identity_residual,
        "inverse_vs_lu": lu_residual,
        "dim": irreducible_dim(n),
        "condition": condition_number(&period),
    }));
    Ok(PeriodsOutcome { bases, riemann, period, inversion, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        assert_eq!(irreducible_dim(2), 2);
        assert_eq!(irreducible_dim(3), 5);
        assert_eq!(irreducible_dim(4), 14);
        for n in 2..=4 {
            assert_eq!(irreducible_basis(n).ncols(), irreducible_dim(n));
        }
    }

    #[test]
    fn poly_ops() {
        let p = Poly::from_real(&[1.0, 2.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.eval(C64::new(2.0, 0.0)), C64::new(5.0, 0.0));
        assert_eq!(Poly::zero().degree(), None);
    }
}
