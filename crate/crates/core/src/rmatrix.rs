//! The six-vertex R-matrix R(β, ν), its gauge transform, the constant U_q(sl₂)
//! R-matrix and the S-matrix at the dual coupling.

use crate::quadrature::{half_line, QuadratureSpec};
use crate::report::{rng, CheckReport};
use crate::tensor_core::permutation4;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;

pub type Mat = DMatrix<C64>;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anisotropy {
    pub nu: f64,
    pub delta: f64,
}

impl Anisotropy {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::Parameter(format!("nu = {nu} outside (0, 1)")));
        }
        Ok(Self { nu, delta: (PI * nu).cos() })
    }

    /// q^x = exp(2πi(ν+1)x); the shift by one matters for fractional x.
    pub fn q_pow(&self, x: f64) -> C64 {
        (I * (2.0 * PI * (self.nu + 1.0) * x)).exp()
    }

    pub fn q(&self) -> C64 {
        self.q_pow(1.0)
    }

    /// q̃^x = exp(2πi x/(1−ν)).
    pub fn qtilde_pow(&self, x: f64) -> C64 {
        (I * (2.0 * PI * x / (1.0 - self.nu))).exp()
    }

    /// Coupling of the S-matrix, ν/(1−ν).
    pub fn dual_coupling(&self) -> f64 {
        self.nu / (1.0 - self.nu)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RMatrixValue {
    pub entries: Mat,
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

/// sinh(a k)/sinh(b k) for 0 ≤ |a| < b, stable for large k.
pub(crate) fn sinh_ratio(a: f64, b: f64, k: f64) -> f64 {
    if k < 1e-8 {
        return a / b;
    }
    let s = a.signum();
    let aa = a.abs();
    s * ((aa - b) * k).exp() * (-(-2.0 * aa * k).exp_m1()) / (-(-2.0 * b * k).exp_m1())
}

/// sin(z)/z with a series patch near zero.
pub(crate) fn sinc(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// The R₀ kernel g(k) = sinh(πk(ν−1)/2ν) / (sinh(πk/2ν) cosh(πk/2)); decays like e^{−πk}.
pub(crate) fn r0_kernel(k: f64, nu: f64) -> f64 {
    let a = PI * (nu - 1.0) / (2.0 * nu);
    let b = PI / (2.0 * nu);
    let r = if a.abs() < b { sinh_ratio(a, b, k) } else { (a * k).sinh() / (b * k).sinh() };
    r / (PI * k / 2.0).cosh()
}

/// Half-width of the strip where the defining R₀ integral converges.
pub fn r0_strip() -> f64 {
    PI
}

/// Strip of the continued representation: |Im β| < min(2π, π/ν).
pub fn r0_continued_strip(coupling: f64) -> f64 {
    (2.0 * PI).min(PI / coupling)
}

fn check_coupling(nu: f64) -> Result<()> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Parameter(format!("coupling {nu} must be positive")));
    }
    Ok(())
}

/// The defining integral, valid for |Im β| < π.
pub fn r0_integral(beta: C64, nu: f64, spec: &QuadratureSpec) -> Result<C64> {
    check_coupling(nu)?;
    let margin = r0_strip() - beta.im.abs();
    if margin <= 0.0 {
        return Err(Error::Strip(format!("R0 integral needs |Im β| < π, got β = {beta}")));
    }
    let rate = margin.min(PI);
    let r = half_line(|k| beta * sinc(beta * k) * r0_kernel(k, nu), rate, spec)?;
    Ok((I * r.value).exp())
}

/// R₀(β) = (π−iβ)/(π+iβ) · exp(i∫ sin(βk)(g(k) + 2e^{−πk})/k dk); the subtraction
/// exposes the pole at β = πi and widens the strip.
pub fn r0_continued(beta: C64, nu: f64, spec: &QuadratureSpec) -> Result<C64> {
    check_coupling(nu)?;
    let strip = r0_continued_strip(nu);
    let margin = strip - beta.im.abs();
    if margin <= 0.0 {
        return Err(Error::Strip(format!("continued R0 needs |Im β| < {strip}, got β = {beta}")));
    }
    let den = PI + I * beta;
    if den.norm() < 1e-12 {
        return Err(Error::Singular(format!("R0 pole at β = πi (β = {beta})")));
    }
    let r = half_line(
        |k| beta * sinc(beta * k) * (r0_kernel(k, nu) + 2.0 * (-PI * k).exp()),
        margin,
        spec,
    )?;
    Ok((PI - I * beta) / den * (I * r.value).exp())
}

/// R₀ with the defining integral inside |Im β| ≤ π/2 and the continued form outside.
pub fn r0_with(beta: C64, nu: f64, spec: &QuadratureSpec) -> Result<C64> {
    if beta.im.abs() <= PI / 2.0 {
        r0_integral(beta, nu, spec)
    } else {
        r0_continued(beta, nu, spec)
    }
}

pub fn r0(beta: C64, nu: f64) -> Result<C64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Parameter(format!("nu = {nu} outside (0, 1)")));
    }
    r0_with(beta, nu, &QuadratureSpec::default())
}

fn six_vertex(a: C64, b: C64, c: C64) -> Mat {
    let z = C64::new(0.0, 0.0);
    DMatrix::from_row_slice(4, 4, &[a, z, z, z, z, b, c, z, z, c, b, z, z, z, z, a])
}

/// R(β) at an arbitrary positive coupling (the S-matrix uses ν/(1−ν), which may exceed 1).
pub fn r_matrix_coupling(beta: C64, coupling: f64) -> Result<RMatrixValue> {
    check_coupling(coupling)?;
    let den = (coupling * (I * PI - beta)).sinh();
    if den.norm() < 1e-12 {
        return Err(Error::Singular(format!("sinh ν(πi−β) = 0 at β = {beta}, ν = {coupling}")));
    }
    let a = r0_with(beta, coupling, &QuadratureSpec::default())?;
    let b = a * (coupling * beta).sinh() / den;
    let c = a * (coupling * I * PI).sinh() / den;
    Ok(RMatrixValue { entries: six_vertex(a, b, c), a, b, c })
}

pub fn r_matrix(beta: C64, aniso: &Anisotropy) -> Result<RMatrixValue> {
    r_matrix_coupling(beta, aniso.nu)
}

/// Diagonal gauge factor e^{(ν/2)β₁σ³} ⊗ e^{(ν/2)β₂σ³} as its four diagonal entries.
fn gauge_diag(b1: C64, b2: C64, nu: f64) -> [C64; 4] {
    let e = |b: C64, s: f64| (0.5 * nu * s * b).exp();
    [e(b1, 1.) * e(b2, 1.), e(b1, 1.) * e(b2, -1.), e(b1, -1.) * e(b2, 1.), e(b1, -1.) * e(b2, -1.)]
}

pub fn conjugate_diag(m: &Mat, d: &[C64; 4]) -> Mat {
    DMatrix::from_fn(4, 4, |r, c| d[r] * m[(r, c)] / d[c])
}

fn gauge_coupling(b1: C64, b2: C64, coupling: f64) -> Result<Mat> {
    let r = r_matrix_coupling(b1 - b2, coupling)?;
    Ok(conjugate_diag(&r.entries, &gauge_diag(b1, b2, coupling)))
}

/// 𝓡(β₁, β₂) by conjugation of R(β₁−β₂).
pub fn gauge_r(b1: C64, b2: C64, aniso: &Anisotropy) -> Result<Mat> {
    gauge_coupling(b1, b2, aniso.nu)
}

/// Undo the conjugation: recovers R(β₁−β₂).
pub fn ungauge(m: &Mat, b1: C64, b2: C64, nu: f64) -> Mat {
    let d = gauge_diag(b1, b2, nu);
    let inv = [1.0 / d[0], 1.0 / d[1], 1.0 / d[2], 1.0 / d[3]];
    conjugate_diag(m, &inv)
}

/// R₁₂(q) in factorized form, with q^{1/2} supplied explicitly.
pub fn constant_rq_half(q_half: C64) -> Mat {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    DMatrix::from_row_slice(
        4,
        4,
        &[q_half, z, z, z, z, o, q_half - 1.0 / q_half, z, z, z, o, z, z, z, z, q_half],
    )
}

/// R(q) with q^{1/2} on the exponent branch of the anisotropy.
pub fn constant_rq(aniso: &Anisotropy) -> Mat {
    constant_rq_half(aniso.q_pow(0.5))
}

/// Principal-branch variant for an arbitrary nonzero q.
pub fn constant_rq_principal(q: C64) -> Result<Mat> {
    if q.norm() == 0.0 {
        return Err(Error::Parameter("q = 0".into()));
    }
    Ok(constant_rq_half(q.sqrt()))
}

/// Second form of 𝓡: R₀/(2 sinh ν(πi−β)) · (e^{νβ} R₂₁(q)⁻¹ − e^{−νβ} R₁₂(q)).
/// With `transpose` the factorized R₁₂(q) is replaced by its transpose, which is the
/// reading under which the two forms agree.
pub fn gauge_r_decomposed(b1: C64, b2: C64, aniso: &Anisotropy, transpose: bool) -> Result<Mat> {
    let beta = b1 - b2;
    let nu = aniso.nu;
    let den = 2.0 * (nu * (I * PI - beta)).sinh();
    if den.norm() < 1e-12 {
        return Err(Error::Singular(format!("sinh ν(πi−β) = 0 at β = {beta}")));
    }
    let mut r12 = constant_rq(aniso);
    if transpose {
        r12 = r12.transpose();
    }
    let p = permutation4();
    let r21 = &p * &r12 * &p;
    let r21_inv = r21
        .try_inverse()
        .ok_or_else(|| Error::Singular("R21(q) not invertible".into()))?;
    let r0v = r0(beta, nu)?;
    Ok((r21_inv * (nu * beta).exp() - r12 * (-nu * beta).exp()) * (r0v / den))
}

pub fn s_matrix(theta: C64, aniso: &Anisotropy) -> Result<Mat> {
    Ok(r_matrix_coupling(theta, aniso.dual_coupling())?.entries)
}

/// Gauge-transformed S-matrix 𝓢(θ₁, θ₂) at coupling ν/(1−ν).
pub fn gauge_s(t1: C64, t2: C64, aniso: &Anisotropy) -> Result<Mat> {
    gauge_coupling(t1, t2, aniso.dual_coupling())
}

/// Embed a 4×4 matrix on factors (i, j) of (ℂ²)^⊗3, i ≠ j, 1-based.
pub fn embed3(m: &Mat, i: usize, j: usize) -> Mat {
    let mut out = DMatrix::zeros(8, 8);
    let bit = |x: usize, site: usize| (x >> (3 - site)) & 1;
    for col in 0..8 {
        let (si, sj) = (bit(col, i), bit(col, j));
        let cin = si * 2 + sj;
        for rin in 0..4 {
            let (ti, tj) = (rin >> 1, rin & 1);
            let mut row = col;
            row = (row & !(1 << (3 - i))) | (ti << (3 - i));
            row = (row & !(1 << (3 - j))) | (tj << (3 - j));
            out[(row, col)] += m[(rin, cin)];
        }
    }
    out
}

pub fn ybe_residual(r12: &Mat, r13: &Mat, r23: &Mat) -> f64 {
    let (a, b, c) = (embed3(r12, 1, 2), embed3(r13, 1, 3), embed3(r23, 2, 3));
    (&a * &b * &c - &c * &b * &a).norm()
}

/// max ‖R₁₂R₁₃R₂₃ − R₂₃R₁₃R₁₂‖ over random real rapidity triples in (−1.5, 1.5).
pub fn check_ybe<F>(name: &str, eval: F, samples: usize, seed: u64, tol: f64) -> Result<CheckReport>
where
    F: Fn(C64) -> Result<Mat>,
{
    let mut g = rng(seed);
    let mut worst = 0.0f64;
    let mut worst_at = [0.0; 3];
    for s in 0..samples {
        let b: [f64; 3] = std::array::from_fn(|_| g.gen_range(-1.5..1.5));
        let at = |x: f64| {
            eval(C64::new(x, 0.0)).map_err(|e| Error::Check(format!("sample {s} at {b:?}: {e}")))
        };
        let res = ybe_residual(&at(b[0] - b[1])?, &at(b[0] - b[2])?, &at(b[1] - b[2])?);
        if res > worst || res.is_nan() {
            worst = res;
            worst_at = b;
        }
    }
    Ok(CheckReport::new(format!("ybe:{name}"), worst, tol, samples)
        .with_details(json!({ "seed": seed, "worst_sample": worst_at })))
}

/// YBE for rapidity-pair evaluators such as 𝓡(β₁, β₂).
pub fn check_ybe_pairs<F>(name: &str, eval: F, samples: usize, seed: u64, tol: f64) -> Result<CheckReport>
where
    F: Fn(C64, C64) -> Result<Mat>,
{
    let mut g = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let b: [C64; 3] = std::array::from_fn(|_| C64::new(g.gen_range(-1.5..1.5), 0.0));
        let res = ybe_residual(&eval(b[0], b[1])?, &eval(b[0], b[2])?, &eval(b[1], b[2])?);
        worst = worst.max(res);
    }
    Ok(CheckReport::new(format!("ybe:{name}"), worst, tol, samples).with_details(json!({ "seed": seed })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_at_zero_is_permutation() {
        let a = Anisotropy::new(0.3).unwrap();
        let r = r_matrix(C64::new(0.0, 0.0), &a).unwrap();
        assert!((r.entries - permutation4()).norm() < 1e-12);
    }

    #[test]
    fn pole_reported() {
        let a = Anisotropy::new(0.3).unwrap();
        assert!(matches!(r_matrix(C64::new(0.0, PI), &a), Err(Error::Singular(_))));
        assert!(r0_integral(C64::new(0.0, 3.2), 0.3, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn continuation_agrees_inside_strip() {
        for b in [C64::new(0.7, 0.0), C64::new(-0.4, 1.2), C64::new(1.1, -2.0)] {
            let s = QuadratureSpec::default();
            let x = r0_integral(b, 0.3, &s).unwrap();
            let y = r0_continued(b, 0.3, &s).unwrap();
            assert!((x - y).norm() < 1e-11, "{b}: {x} vs {y}");
        }
    }

    #[test]
    fn rq_trivial_at_q_one() {
        let m = constant_rq_half(C64::new(1.0, 0.0));
        assert!((m - Mat::identity(4, 4)).norm() < 1e-15);
    }
}
