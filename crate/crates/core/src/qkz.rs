//! Residual checkers for the level −4, level 0 and mixed functional-equation systems,
//! the singlet projector, and closed-form two-point solutions.
//!
//! Tensor slots follow their rapidities ("labelled" convention): a candidate evaluated at
//! permuted arguments returns a vector whose factors are permuted the same way, so every
//! argument permutation in an equation is accompanied by the matching factor permutation.

use crate::quadrature::{half_line, QuadratureSpec};
use crate::quantum_group::{build_generators_with, QConvention};
use crate::report::{rng, CheckReport};
use crate::rmatrix::{gauge_r, gauge_s, r0_kernel, r0_with, r_matrix, Anisotropy, Mat};
use crate::special_functions::psi;
use crate::tensor_core::{ChainOperator, MAX_SITES};
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;
use std::sync::Arc;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    /// vector, level −4
    Minus4,
    /// covector, level 0
    Zero,
    /// vector in the β slots, covector in the θ slots
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    Plain,
    Hatted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Continuation {
    /// closed form, evaluable at 2πi-shifted arguments
    Analytic,
    /// sampled or tabulated; shifted points are refused
    Refuse,
}

type Evaluator = dyn Fn(&[C64], &[C64]) -> Result<DVector<C64>> + Send + Sync;

#[derive(Clone)]
pub struct CandidateSolution {
    pub name: String,
    pub level: Level,
    pub gauge: Gauge,
    pub continuation: Continuation,
    /// number of β slots (2n)
    pub n_beta: usize,
    /// number of θ slots (2m)
    pub n_theta: usize,
    eval: Arc<Evaluator>,
}

impl std::fmt::Debug for CandidateSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CandidateSolution")
            .field("name", &self.name)
            .field("level", &self.level)
            .field("gauge", &self.gauge)
            .field("n_beta", &self.n_beta)
            .field("n_theta", &self.n_theta)
            .finish()
    }
}

impl CandidateSolution {
    pub fn new<F>(name: impl Into<String>, level: Level, gauge: Gauge, n_beta: usize, n_theta: usize, f: F) -> Self
    where
        F: Fn(&[C64], &[C64]) -> Result<DVector<C64>> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            level,
            gauge,
            continuation: Continuation::Analytic,
            n_beta,
            n_theta,
            eval: Arc::new(f),
        }
    }

    pub fn with_continuation(mut self, c: Continuation) -> Self {
        self.continuation = c;
        self
    }

    pub fn slots(&self) -> usize {
        self.n_beta + self.n_theta
    }

    pub fn eval(&self, betas: &[C64], thetas: &[C64]) -> Result<DVector<C64>> {
        if betas.len() != self.n_beta || thetas.len() != self.n_theta {
            return Err(Error::Dimension(format!(
                "{} takes {} β and {} θ, got {} and {}",
                self.name,
                self.n_beta,
                self.n_theta,
                betas.len(),
                thetas.len()
            )));
        }
        let v = (self.eval)(betas, thetas)?;
        if v.len() != 1 << self.slots() {
            return Err(Error::Dimension(format!("{} returned length {}", self.name, v.len())));
        }
        Ok(v)
    }

    fn eval_shifted(&self, betas: &[C64], thetas: &[C64]) -> Result<DVector<C64>> {
        if self.continuation == Continuation::Refuse {
            return Err(Error::Strip(format!("{} refuses 2πi-shifted arguments", self.name)));
        }
        self.eval(betas, thetas)
    }

    /// Constant vector (a useful non-solution for negative controls).
    pub fn constant(name: impl Into<String>, level: Level, gauge: Gauge, n_beta: usize, v: DVector<C64>) -> Self {
        Self::new(name, level, gauge, n_beta, 0, move |_, _| Ok(v.clone()))
    }
}

// ---- tensor helpers on (ℂ²)^{⊗N}, factor 1 slowest

fn bit(idx: usize, slot: usize, n: usize) -> usize {
    (idx >> (n - 1 - slot)) & 1
}

/// Apply a 4×4 matrix to factors (a, b) (0-based, any order, a ≠ b); `right` for covectors.
pub fn apply_pair(m: &Mat, a: usize, b: usize, v: &DVector<C64>, n: usize, right: bool) -> DVector<C64> {
    let mut out = DVector::zeros(v.len());
    let ma = 1usize << (n - 1 - a);
    let mb = 1usize << (n - 1 - b);
    for idx in 0..v.len() {
        let row = 2 * bit(idx, a, n) + bit(idx, b, n);
        let base = idx & !ma & !mb;
        for col in 0..4 {
            let j = base | if col & 2 != 0 { ma } else { 0 } | if col & 1 != 0 { mb } else { 0 };
            let coef = if right { m[(col, row)] } else { m[(row, col)] };
            out[idx] += coef * v[j];
        }
    }
    out
}

/// Components relabelled so that factor `perm[k]` of the input becomes factor k.
pub fn permute_factors(v: &DVector<C64>, perm: &[usize]) -> DVector<C64> {
    let n = perm.len();
    DVector::from_fn(v.len(), |idx, _| {
        let mut src = 0usize;
        for (k, &p) in perm.iter().enumerate() {
            src |= bit(idx, k, n) << (n - 1 - p);
        }
        v[src]
    })
}

fn swap_perm(n: usize, j: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(j, j + 1);
    p
}

/// Input factors ordered (x_last, x_1, …) → output ordered (x_1, …, x_last) within [lo, hi).
fn cycle_perm(n: usize, lo: usize, hi: usize) -> Vec<usize> {
    (0..n).map(|k| if k < lo || k >= hi { k } else if k == hi - 1 { lo } else { k + 1 }).collect()
}

/// Diagonal scaling by f(σ³ eigenvalue) on one factor.
fn scale_slot(v: &DVector<C64>, slot: usize, n: usize, up: C64, down: C64) -> DVector<C64> {
    DVector::from_fn(v.len(), |i, _| v[i] * if bit(i, slot, n) == 0 { up } else { down })
}

/// Insert a two-factor vector w at slots (j, j+1) of a (N−2)-factor vector.
fn insert_pair(w: &[C64; 4], lower: &DVector<C64>, j: usize, n: usize) -> DVector<C64> {
    DVector::from_fn(1 << n, |idx, _| {
        let p = 2 * bit(idx, j, n) + bit(idx, j + 1, n);
        let hi = idx >> (n - j);
        let lo = idx & ((1 << (n - j - 2)) - 1);
        let li = (hi << (n - j - 2)) | lo;
        w[p] * lower[li]
    })
}

// ---- singlets

/// q^{1/4} on the branch of the anisotropy's q = e^{2πi(ν+1)}.
pub fn q_quarter(aniso: &Anisotropy) -> C64 {
    aniso.q_pow(0.25)
}

/// ŝ = q^{1/4}(↑↓) − q^{−1/4}(↓↑), components in the order ↑↑, ↑↓, ↓↑, ↓↓.
pub fn singlet_hat(aniso: &Anisotropy) -> [C64; 4] {
    let z = C64::new(0.0, 0.0);
    let q = q_quarter(aniso);
    [z, q, -1.0 / q, z]
}

/// The dual singlet covector ŝ*; annihilated by the right action of the generators.
pub fn singlet_hat_dual(aniso: &Anisotropy) -> [C64; 4] {
    singlet_hat(aniso)
}

/// s = (↑↓) + (↓↑)
pub fn singlet_plain() -> [C64; 4] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    [z, o, o, z]
}

/// Projector onto the quantum-group singlets of 2n sites, along the span of the images
/// of S^± (the sum of the non-trivial components).
pub fn singlet_projector(n: usize, aniso: &Anisotropy) -> Result<ChainOperator> {
    let sites = 2 * n;
    if sites == 0 || sites > MAX_SITES.min(10) {
        return Err(Error::OutOfRange(format!("2n = {sites} outside the dense cap")));
    }
    let g = build_generators_with(sites, aniso.nu, QConvention::Shifted)?;
    let dim = 1usize << sites;
    let stacked = DMatrix::from_fn(2 * dim, dim, |r, c| {
        if r < dim {
            g.splus.entries[(r, c)]
        } else {
            g.sminus.entries[(r - dim, c)]
        }
    });
    let kernel = null_space(&stacked, 1e-9);
    let image = column_space(&DMatrix::from_fn(dim, 2 * dim, |r, c| {
        if c < dim {
            g.splus.entries[(r, c)]
        } else {
            g.sminus.entries[(r, c - dim)]
        }
    }), 1e-9);
    let expected = crate::quantum_group::singlet_count(sites);
    if kernel.ncols() != expected || kernel.ncols() + image.ncols() != dim {
        return Err(Error::Check(format!(
            "singlet rank {} (image {}) vs expected {expected} on {sites} sites",
            kernel.ncols(),
            image.ncols()
        )));
    }
    let mut basis = DMatrix::zeros(dim, dim);
    basis.columns_mut(0, kernel.ncols()).copy_from(&kernel);
    basis.columns_mut(kernel.ncols(), image.ncols()).copy_from(&image);
    let inv = basis.clone().try_inverse().ok_or_else(|| Error::Singular("singlet/image split".into()))?;
    let mut keep = DMatrix::zeros(dim, dim);
    for k in 0..kernel.ncols() {
        keep[(k, k)] = C64::new(1.0, 0.0);
    }
    ChainOperator::new(sites, basis * keep * inv)
}

fn null_space(m: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t");
    let smax = svd.singular_values.max().max(1.0);
    let rows: Vec<_> = (0..vt.nrows())
        .filter(|&i| i >= svd.singular_values.len() || svd.singular_values[i] < tol * smax)
        .map(|i| vt.row(i).adjoint())
        .collect();
    if rows.is_empty() {
        return DMatrix::zeros(m.ncols(), 0);
    }
    DMatrix::from_columns(&rows)
}

fn column_space(m: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u");
    let smax = svd.singular_values.max().max(1.0);
    let cols: Vec<_> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] >= tol * smax)
        .map(|i| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&cols)
}

// ---- residuals

fn split_slot(c: &CandidateSolution, j: usize) -> Result<(bool, usize)> {
    if j + 1 < c.n_beta {
        Ok((true, j))
    } else if j >= c.n_beta && j + 1 < c.slots() {
        Ok((false, j - c.n_beta))
    } else {
        Err(Error::OutOfRange(format!("no exchange pair at slot {j} for {}", c.name)))
    }
}

fn swapped(v: &[C64], j: usize) -> Vec<C64> {
    let mut w = v.to_vec();
    w.swap(j, j + 1);
    w
}

fn exchange_matrix(c: &CandidateSolution, beta_pair: bool, x: C64, y: C64, aniso: &Anisotropy) -> Result<Mat> {
    match (c.level, c.gauge, beta_pair) {
        (Level::Minus4, Gauge::Plain, _) => Ok(r_matrix(x - y, aniso)?.entries),
        (Level::Minus4, Gauge::Hatted, _) | (Level::Zero, Gauge::Hatted, _) => gauge_r(x, y, aniso),
        (Level::Zero, Gauge::Plain, _) => Ok(r_matrix(x - y, aniso)?.entries),
        // mixed β equation carries 𝓡(β_{j+1} − β_j)
        (Level::Mixed, Gauge::Hatted, true) => gauge_r(y, x, aniso),
        (Level::Mixed, Gauge::Plain, true) => Ok(r_matrix(y - x, aniso)?.entries),
        (Level::Mixed, Gauge::Hatted, false) => gauge_s(x, y, aniso),
        (Level::Mixed, Gauge::Plain, false) => crate::rmatrix::s_matrix(x - y, aniso),
    }
}

fn is_covector_slot(c: &CandidateSolution, beta_slot: bool) -> bool {
    match c.level {
        Level::Minus4 => false,
        Level::Zero => true,
        Level::Mixed => !beta_slot,
    }
}

/// Defect vector of the exchange equation at pair (j, j+1) (slots counted over β then θ).
pub fn exchange_defect(c: &CandidateSolution, j: usize, betas: &[C64], thetas: &[C64], aniso: &Anisotropy) -> Result<DVector<C64>> {
    let (beta_pair, k) = split_slot(c, j)?;
    let n = c.slots();
    let base = c.eval(betas, thetas)?;
    let (x, y, sw) = if beta_pair {
        (betas[k], betas[k + 1], c.eval(&swapped(betas, k), thetas)?)
    } else {
        (thetas[k], thetas[k + 1], c.eval(betas, &swapped(thetas, k))?)
    };
    let sw = permute_factors(&sw, &swap_perm(n, j));
    let m = exchange_matrix(c, beta_pair, x, y, aniso)?;
    Ok(if is_covector_slot(c, beta_pair) {
        // f(…x_{j+1}, x_j…) = f(…) X(x_j − x_{j+1})
        sw - apply_pair(&m, j, j + 1, &base, n, true)
    } else {
        // X g(…x_{j+1}, x_j…) = g(…)
        apply_pair(&m, j, j + 1, &sw, n, false) - base
    })
}

pub fn residual_exchange(c: &CandidateSolution, j: usize, betas: &[C64], thetas: &[C64], aniso: &Anisotropy) -> Result<f64> {
    Ok(exchange_defect(c, j, betas, thetas, aniso)?.norm())
}

/// Apply the exchange twice (there and back); unitarity makes this the identity.
pub fn residual_double_exchange(c: &CandidateSolution, j: usize, betas: &[C64], thetas: &[C64], aniso: &Anisotropy) -> Result<f64> {
    let (beta_pair, k) = split_slot(c, j)?;
    let n = c.slots();
    let v = c.eval(betas, thetas)?;
    let (x, y) = if beta_pair { (betas[k], betas[k + 1]) } else { (thetas[k], thetas[k + 1]) };
    let m1 = exchange_matrix(c, beta_pair, x, y, aniso)?;
    let m2 = exchange_matrix(c, beta_pair, y, x, aniso)?;
    let p = swap_perm(n, j);
    let right = is_covector_slot(c, beta_pair);
    let once = permute_factors(&apply_pair(&m2, j, j + 1, &v, n, right), &p);
    let twice = permute_factors(&apply_pair(&m1, j, j + 1, &once, n, right), &p);
    Ok((twice - v).norm())
}

fn tanh_half(z: C64) -> C64 {
    (0.5 * z).tanh()
}

/// Defect of the 2πi shift in the last β slot.
pub fn shift_defect(c: &CandidateSolution, betas: &[C64], thetas: &[C64], aniso: &Anisotropy) -> Result<DVector<C64>> {
    let nb = c.n_beta;
    if nb == 0 {
        return Err(Error::Parameter(format!("{} has no β slots", c.name)));
    }
    let n = c.slots();
    let last = betas[nb - 1];
    let mut shifted = betas.to_vec();
    shifted[nb - 1] += 2.0 * PI * I;
    let lhs = c.eval_shifted(&shifted, thetas)?;
    let mut rotated = vec![last];
    rotated.extend_from_slice(&betas[..nb - 1]);
    let rhs = permute_factors(&c.eval(&rotated, thetas)?, &cycle_perm(n, 0, nb));
    let qh = aniso.q_pow(0.5);
    let rhs = match (c.level, c.gauge) {
        (Level::Minus4, Gauge::Plain) => rhs,
        (Level::Minus4, Gauge::Hatted) | (Level::Zero, _) => scale_slot(&rhs, nb - 1, n, -1.0 / qh, -qh),
        (Level::Mixed, _) => {
            let t: C64 = thetas.iter().map(|th| tanh_half(last - th + 0.5 * PI * I)).product();
            scale_slot(&rhs, nb - 1, n, -t * qh, -t / qh)
        }
    };
    Ok(lhs - rhs)
}

pub fn residual_shift(c: &CandidateSolution, betas: &[C64], thetas: &[C64], aniso: &Anisotropy) -> Result<f64> {
    Ok(shift_defect(c, betas, thetas, aniso)?.norm())
}

/// Mixed system: 2πi shift in the last θ slot.
pub fn residual_shift_theta(c: &CandidateSolution, betas: &[C64], thetas: &[C64], aniso: &Anisotropy) -> Result<f64> {
    if c.level != Level::Mixed || c.n_theta == 0 {
        return Err(Error::Parameter(format!("{} has no θ slots", c.name)));
    }
    let (nb, nt, n) = (c.n_beta, c.n_theta, c.slots());
    let last = thetas[nt - 1];
    let mut shifted = thetas.to_vec();
    shifted[nt - 1] += 2.0 * PI * I;
    let lhs = c.eval_shifted(betas, &shifted)?;
    let mut rotated = vec![last];
    rotated.extend_from_slice(&thetas[..nt - 1]);
    let rhs = permute_factors(&c.eval(betas, &rotated)?, &cycle_perm(n, nb, n));
    let t: C64 = betas.iter().map(|b| tanh_half(last - b + 0.5 * PI * I)).product();
    let qh = aniso.q_pow(0.5);
    let rhs = scale_slot(&rhs, n - 1, n, -t / qh, -t * qh);
    Ok((lhs - rhs).norm())
}

/// Residue settings: trapezoidal rule on a circle around the pole.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueSpec {
    pub radius: f64,
    pub points: usize,
}

impl Default for ResidueSpec {
    fn default() -> Self {
        Self { radius: 1e-2, points: 16 }
    }
}

/// (1/2πi)∮ f around z0.
pub fn contour_residue<F>(f: F, z0: C64, spec: &ResidueSpec) -> Result<DVector<C64>>
where
    F: Fn(C64) -> Result<DVector<C64>>,
{
    let mut acc: Option<DVector<C64>> = None;
    for k in 0..spec.points {
        let e = (I * (2.0 * PI * k as f64 / spec.points as f64)).exp();
        let v = f(z0 + spec.radius * e)? * (spec.radius * e / spec.points as f64);
        acc = Some(match acc {
            None => v,
            Some(a) => a + v,
        });
    }
    acc.ok_or_else(|| Error::Parameter("residue needs at least one point".into()))
}

/// Defect of the normalization / residue condition that links 2n and 2n−2 slots.
/// Level −4: slot pair (j, j+1) at β_{j+1} = β_j − πi. Level 0 and mixed: the last pair
/// (β_{2n} = β_{2n−1} + πi), with a residue for level 0.
pub fn specialization_defect(
    c: &CandidateSolution,
    lower: &CandidateSolution,
    j: usize,
    betas: &[C64],
    thetas: &[C64],
    aniso: &Anisotropy,
    res: &ResidueSpec,
) -> Result<DVector<C64>> {
    let nb = c.n_beta;
    let n = c.slots();
    if lower.n_beta + 2 != nb || lower.n_theta != c.n_theta {
        return Err(Error::Dimension(format!("lower candidate {} does not match {}", lower.name, c.name)));
    }
    let drop = |j: usize| -> Vec<C64> { betas.iter().enumerate().filter(|(k, _)| *k != j && *k != j + 1).map(|(_, b)| *b).collect() };
    match c.level {
        Level::Minus4 => {
            if j + 1 >= nb {
                return Err(Error::OutOfRange(format!("pair ({j}, {}) on {nb} slots", j + 1)));
            }
            let mut pt = betas.to_vec();
            pt[j + 1] = pt[j] - PI * I;
            let lhs = c.eval(&pt, thetas)?;
            let w = match c.gauge {
                Gauge::Plain => singlet_plain(),
                Gauge::Hatted => singlet_hat(aniso).map(|x| I * x),
            };
            let low = lower.eval(&drop(j), thetas)?;
            Ok(lhs - insert_pair(&w, &low, j, n))
        }
        Level::Mixed => {
            let j = nb - 2;
            let mut pt = betas.to_vec();
            pt[j + 1] = pt[j] + PI * I;
            let lhs = c.eval(&pt, thetas)?;
            let low = lower.eval(&drop(j), thetas)?;
            Ok(lhs - insert_pair(&singlet_hat(aniso), &low, j, n))
        }
        Level::Zero => {
            let j = nb - 2;
            let z0 = betas[j] + PI * I;
            let r = contour_residue(
                |z| {
                    let mut pt = betas.to_vec();
                    pt[j + 1] = z;
                    c.eval(&pt, thetas)
                },
                z0,
                res,
            )? * (2.0 * PI * I);
            let low = lower.eval(&drop(j), thetas)?;
            let sv = insert_pair(&singlet_hat_dual(aniso), &low, j, n);
            let mut prod = sv.clone();
            for k in 0..j {
                let m = gauge_r(betas[j], betas[k], aniso)?;
                prod = apply_pair(&m, j, k, &prod, n, true);
            }
            Ok(r - (sv - prod))
        }
    }
}

pub fn residual_specialization(
    c: &CandidateSolution,
    lower: &CandidateSolution,
    j: usize,
    betas: &[C64],
    thetas: &[C64],
    aniso: &Anisotropy,
) -> Result<f64> {
    Ok(specialization_defect(c, lower, j, betas, thetas, aniso, &ResidueSpec::default())?.norm())
}

/// Mixed system: residue condition in the last θ pair.
pub fn residual_specialization_theta(
    c: &CandidateSolution,
    lower: &CandidateSolution,
    betas: &[C64],
    thetas: &[C64],
    aniso: &Anisotropy,
    res: &ResidueSpec,
) -> Result<f64> {
    let (nb, nt, n) = (c.n_beta, c.n_theta, c.slots());
    if c.level != Level::Mixed || nt < 2 || lower.n_theta + 2 != nt || lower.n_beta != nb {
        return Err(Error::Dimension(format!("θ residue needs mixed candidates with matching slots ({})", c.name)));
    }
    let j = nt - 2;
    let r = contour_residue(
        |z| {
            let mut t = thetas.to_vec();
            t[j + 1] = z;
            c.eval(betas, &t)
        },
        thetas[j] + PI * I,
        res,
    )? * (2.0 * PI * I);
    let low = lower.eval(betas, &thetas[..j])?;
    let sv = insert_pair(&singlet_hat_dual(aniso), &low, nb + j, n);
    let t: C64 = betas.iter().map(|b| tanh_half(thetas[j] - b + 0.5 * PI * I)).product();
    let mut prod = sv.clone();
    for k in 0..j {
        let m = gauge_s(thetas[j], thetas[k], aniso)?;
        prod = apply_pair(&m, nb + j, nb + k, &prod, n, true);
    }
    Ok((r - (sv - prod * t)).norm())
}

// ---- gauge

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeDirection {
    Hat,
    Unhat,
}

/// Diagonal of exp(s·(ν/2)Σβ_jσ³_j) over the β slots of an N-slot space.
fn gauge_factor(betas: &[C64], n: usize, nu: f64, s: f64) -> DVector<C64> {
    DVector::from_fn(1 << n, |idx, _| {
        let e: C64 = betas.iter().enumerate().map(|(k, b)| if bit(idx, k, n) == 0 { *b } else { -*b }).sum();
        (0.5 * s * nu * e).exp()
    })
}

/// ĝ = exp((ν/2)Σβ_jσ³_j) g and its inverse, on the β slots.
pub fn gauge_transform_solution(c: &CandidateSolution, dir: GaugeDirection, aniso: &Anisotropy) -> Result<CandidateSolution> {
    if c.level == Level::Zero {
        return Err(Error::Parameter("gauge transform applies to level −4 and mixed candidates".into()));
    }
    let (s, gauge) = match dir {
        GaugeDirection::Hat => (1.0, Gauge::Hatted),
        GaugeDirection::Unhat => (-1.0, Gauge::Plain),
    };
    let inner = c.clone();
    let nu = aniso.nu;
    let n = c.slots();
    let mut out = CandidateSolution::new(
        format!("{}:{:?}", c.name, dir).to_lowercase(),
        c.level,
        gauge,
        c.n_beta,
        c.n_theta,
        move |b, t| Ok(inner.eval(b, t)?.component_mul(&gauge_factor(b, n, nu, s))),
    );
    out.continuation = c.continuation;
    Ok(out)
}

/// Vector gauge factor used to compare defects between the two gauges.
pub fn gauge_diagonal(betas: &[C64], n: usize, aniso: &Anisotropy) -> DVector<C64> {
    gauge_factor(betas, n, aniso.nu, 1.0)
}

// ---- two-point solutions

/// Scalar part of the two-point solutions. With β = β₁ − β₂ and λ(β) the eigenvalue of the
/// exchange on the singlet line, Φ solves Φ(β) = λ(β)Φ(−β), Φ(β − 2πi) = Φ(−β):
/// Φ(β) = E(β + πi), log E(x) = −½∫ m(k)(cos xk − 1)/(sinh πk) dk, where
/// log λ(β) = i∫ m(k) sin βk dk. Φ has a double pole at β = πi, cancelled by cosh²(β/2).
#[derive(Clone, Debug)]
pub struct TwoPointScalar {
    pub nu: f64,
    pub gauge: Gauge,
    pub spec: QuadratureSpec,
    /// value of Φ(β)cosh²(β/2) at β = πi
    pub limit: C64,
}

impl TwoPointScalar {
    pub fn new(nu: f64, gauge: Gauge) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::Parameter(format!("nu = {nu} outside (0, 1)")));
        }
        let mut s = Self { nu, gauge, spec: QuadratureSpec::default(), limit: C64::new(1.0, 0.0) };
        s.limit = s.mean_on_circle(PI * I, 0.07, |b| s.dressed(b))?;
        Ok(s)
    }

    /// trigonometric factor of λ
    fn nu_rho(&self) -> f64 {
        match self.gauge {
            Gauge::Hatted => self.nu,
            Gauge::Plain => 0.5 * self.nu,
        }
    }

    fn m_rho(&self, k: f64) -> f64 {
        // −2 sinh(πk(1−2ν')/2ν') / (k sinh(πk/2ν')) with ν' the trigonometric coupling
        let v = self.nu_rho();
        let a = PI * (1.0 - 2.0 * v) / (2.0 * v);
        let b = PI / (2.0 * v);
        if k < 1e-12 {
            return -2.0 * a / (b * k.max(1e-300));
        }
        -2.0 * crate::rmatrix::sinh_ratio(a, b, k) / k
    }

    /// decay rate of m(k)
    fn m_rate(&self) -> f64 {
        let v = self.nu_rho();
        PI * (1.0 - (1.0 - 2.0 * v).abs()) / (2.0 * v)
    }

    pub fn log_e(&self, x: C64) -> Result<C64> {
        let rate = self.m_rate().min(PI) + PI - x.im.abs();
        if rate <= 0.05 {
            return Err(Error::Strip(format!("E(x) integral diverges at x = {x}")));
        }
        let nu = self.nu;
        let m0 = (nu - 1.0) + {
            let v = self.nu_rho();
            -2.0 * (1.0 - 2.0 * v)
        };
        let r = half_line(
            |k| {
                if k < 1e-8 {
                    return m0 * x * x / (4.0 * PI);
                }
                let m = r0_kernel(k, nu) / k + self.m_rho(k);
                let ratio = if k < 0.5 {
                    let s = (0.5 * x * k).sin();
                    -2.0 * s * s / (PI * k).sinh()
                } else {
                    let w = (-2.0 * PI * k).exp();
                    (((I * x - PI) * k).exp() + ((-I * x - PI) * k).exp() - 2.0 * (-PI * k).exp()) / (1.0 - w)
                };
                -0.5 * m * ratio
            },
            rate,
            &self.spec,
        )?;
        Ok(r.value)
    }

    /// λ(β) = R₀(β)·sinh ν'(πi+β)/sinh ν'(πi−β)
    pub fn lambda(&self, beta: C64) -> Result<C64> {
        let v = self.nu_rho();
        let den = (v * (PI * I - beta)).sinh();
        if den.norm() < 1e-300 {
            return Err(Error::Singular(format!("λ pole at β = {beta}")));
        }
        Ok(r0_with(beta, self.nu, &self.spec)? * (v * (PI * I + beta)).sinh() / den)
    }

    pub fn phi(&self, beta: C64) -> Result<C64> {
        if beta.im > 0.0 {
            Ok(self.lambda(beta)? * self.log_e(PI * I - beta)?.exp())
        } else {
            Ok(self.log_e(beta + PI * I)?.exp())
        }
    }

    fn dressed(&self, beta: C64) -> Result<C64> {
        let c = (0.5 * beta).cosh();
        Ok(self.phi(beta)? * c * c)
    }

    fn mean_on_circle<F: Fn(C64) -> Result<C64>>(&self, z0: C64, r: f64, f: F) -> Result<C64> {
        let n = 32;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            acc += f(z0 + r * (I * (2.0 * PI * (k as f64 + 0.5) / n as f64)).exp())?;
        }
        Ok(acc / n as f64)
    }

    /// Φ(β)cosh²(β/2)/Φcosh²|_{πi}; analytic near πi, where it is evaluated by the mean value.
    pub fn normalized(&self, beta: C64) -> Result<C64> {
        let d = (beta - PI * I).norm().min((beta + PI * I).norm());
        let v = if (beta - PI * I).norm() < 1e-2 && d < 1e-2 {
            self.mean_on_circle(beta, 0.05, |b| self.dressed(b))?
        } else {
            self.dressed(beta)?
        };
        Ok(v / self.limit)
    }
}

/// Two-point level −4 solution: g = F(β₁−β₂)·w with w = s (plain) or ŝ (hatted) and
/// F(πi) fixed by the normalization (1 for plain, i for hatted).
pub fn two_point_level4(aniso: &Anisotropy, gauge: Gauge) -> Result<CandidateSolution> {
    let sc = TwoPointScalar::new(aniso.nu, gauge)?;
    let (w, f0) = match gauge {
        Gauge::Plain => (singlet_plain(), C64::new(1.0, 0.0)),
        Gauge::Hatted => (singlet_hat(aniso), I),
    };
    let name = match gauge {
        Gauge::Plain => "two-point-level4-plain",
        Gauge::Hatted => "two-point-level4-hatted",
    };
    Ok(CandidateSolution::new(name, Level::Minus4, gauge, 2, 0, move |b, _| {
        let f = sc.normalized(b[0] - b[1])? * f0;
        Ok(DVector::from_iterator(4, w.iter().map(|x| x * f)))
    }))
}

/// Two-point level 0 covector f̂ = ŝ*/Φ(β₁−β₂).
pub fn two_point_level0(aniso: &Anisotropy) -> Result<CandidateSolution> {
    let sc = TwoPointScalar::new(aniso.nu, Gauge::Hatted)?;
    let w = singlet_hat_dual(aniso);
    Ok(CandidateSolution::new("two-point-level0", Level::Zero, Gauge::Hatted, 2, 0, move |b, _| {
        let f = 1.0 / sc.phi(b[0] - b[1])?;
        Ok(DVector::from_iterator(4, w.iter().map(|x| x * f)))
    }))
}

/// The empty-slot solution (value 1).
pub fn unit_candidate(level: Level, gauge: Gauge, n_theta: usize) -> CandidateSolution {
    CandidateSolution::new("unit", level, gauge, 0, n_theta, move |_, _| Ok(DVector::from_element(1 << n_theta, C64::new(1.0, 0.0))))
}

/// Multiply a mixed candidate by ∏ψ(β_i, θ_j).
pub fn psi_dressed(c: &CandidateSolution) -> CandidateSolution {
    let inner = c.clone();
    let mut out = CandidateSolution::new(format!("{}:psi", c.name), c.level, c.gauge, c.n_beta, c.n_theta, move |b, t| {
        let mut f = C64::new(1.0, 0.0);
        for bi in b {
            for tj in t {
                f *= psi(*bi, *tj)?;
            }
        }
        Ok(inner.eval(b, t)? * f)
    });
    out.continuation = c.continuation;
    out
}

/// A constant random vector posing as a solution; no functional equation holds for it.
pub fn random_candidate(level: Level, gauge: Gauge, n_beta: usize, seed: u64) -> CandidateSolution {
    let mut r = rng(seed);
    let v = DVector::from_fn(1 << n_beta, |_, _| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    let mut c = CandidateSolution::constant("random", level, gauge, n_beta, v);
    c.name = "random".into();
    c
}

/// β₁, β₂ real, separated enough to stay off the exchange poles.
fn sample_pair<R: Rng>(r: &mut R) -> [C64; 2] {
    loop {
        let a: f64 = r.gen_range(-1.5..1.5);
        let b: f64 = r.gen_range(-1.5..1.5);
        if (a - b).abs() > 0.1 {
            return [C64::new(a, 0.0), C64::new(b, 0.0)];
        }
    }
}

/// Residual checks for the closed-form two-point solutions, their negative control, the gauge
/// equivalence of exchange defects, and the singlet projector for n = 1, 2, 3.
pub fn check_n1(aniso: &Anisotropy, samples: usize, seed: u64, tol: f64) -> Result<Vec<CheckReport>> {
    let mut r = rng(seed);
    let pts: Vec<[C64; 2]> = (0..samples.max(1)).map(|_| sample_pair(&mut r)).collect();
    let hat = two_point_level4(aniso, Gauge::Hatted)?;
    let plain = two_point_level4(aniso, Gauge::Plain)?;
    let zero = two_point_level0(aniso)?;
    let mut out = Vec::new();

    let mut run = |name: &str, tol: f64, f: &dyn Fn(&[C64]) -> Result<f64>, lower_bound: bool| -> Result<()> {
        let mut worst: f64 = if lower_bound { f64::INFINITY } else { 0.0 };
        for p in &pts {
            let v = f(p)?;
            worst = if lower_bound { worst.min(v) } else { worst.max(v) };
        }
        let mut rep = CheckReport::new(name, worst, tol, pts.len());
        if lower_bound {
            rep.pass = worst > tol;
            rep = rep.with_details(json!({ "bound": "lower" }));
        }
        out.push(rep);
        Ok(())
    };

    for (tag, c) in [("hatted", &hat), ("plain", &plain)] {
        let lower = unit_candidate(Level::Minus4, c.gauge, 0);
        run(&format!("n1-{tag}-exchange"), tol, &|b| residual_exchange(c, 0, b, &[], aniso), false)?;
        run(&format!("n1-{tag}-double-exchange"), tol, &|b| residual_double_exchange(c, 0, b, &[], aniso), false)?;
        run(&format!("n1-{tag}-shift"), tol, &|b| residual_shift(c, b, &[], aniso), false)?;
        run(&format!("n1-{tag}-specialization"), tol, &|b| residual_specialization(c, &lower, 0, b, &[], aniso), false)?;
    }
    let lower0 = unit_candidate(Level::Zero, Gauge::Hatted, 0);
    run("n1-level0-exchange", tol, &|b| residual_exchange(&zero, 0, b, &[], aniso), false)?;
    run("n1-level0-shift", tol, &|b| residual_shift(&zero, b, &[], aniso), false)?;
    run("n1-level0-residue", tol, &|b| residual_specialization(&zero, &lower0, 0, b, &[], aniso), false)?;

    let bogus = random_candidate(Level::Minus4, Gauge::Hatted, 2, seed ^ 0x5eed);
    run(
        "n1-negative-control",
        0.1,
        &|b| {
            let e = residual_exchange(&bogus, 0, b, &[], aniso)?;
            let s = residual_shift(&bogus, b, &[], aniso)?;
            Ok(e.max(s))
        },
        true,
    )?;

    // exchange defects of g and Gg differ by the gauge factor, for any g
    let any = random_candidate(Level::Minus4, Gauge::Plain, 2, seed ^ 0xfeed);
    let any_hat = gauge_transform_solution(&any, GaugeDirection::Hat, aniso)?;
    run(
        "n1-gauge-equivalence",
        1e-10,
        &|b| {
            let d = exchange_defect(&any, 0, b, &[], aniso)?;
            let dh = exchange_defect(&any_hat, 0, b, &[], aniso)?;
            Ok((dh - d.component_mul(&gauge_diagonal(b, 2, aniso))).norm() / d.norm().max(1e-300))
        },
        false,
    )?;
    let plain_hat = gauge_transform_solution(&plain, GaugeDirection::Hat, aniso)?;
    run("n1-gauged-plain-exchange", tol, &|b| residual_exchange(&plain_hat, 0, b, &[], aniso), false)?;

    for n in 1..=3 {
        let p = singlet_projector(n, aniso)?;
        let m = &p.entries;
        let idem = (m * m - m).camax();
        let rank = m.clone().svd(false, false).singular_values.iter().filter(|s| **s > 1e-8).count();
        let expect = crate::quantum_group::singlet_count(2 * n);
        out.push(
            CheckReport::new(format!("singlet-projector-{}", 2 * n), idem, 1e-10, 1)
                .with_details(json!({ "rank": rank, "expected": expect })),
        );
        if rank != expect {
            out.last_mut().unwrap().pass = false;
        }
    }
    Ok(out)
}
