//! φ, ψ, χ and the dispersion p(θ), e(θ).
//!
//! φ is evaluated through the exact split
//! log φ = −(1+ν)(α+β)/2 − ½ log cosh x − I₁(x) − I₂(x; ν),  x = α − β,
//! where I₁ has a closed form in log-Γ and I₂ = ∫(1−cos xk)/(k cosh(πk/2)(e^{πk/ν}−1))dk
//! lives on the scale k ~ ν. Both pieces continue analytically past |Im x| = π/2,
//! which is how the boundary evaluations φ(α ∓ πi/2) are reached.

use crate::quadrature::{half_line, Panels, QuadratureSpec};
use crate::report::{rng, CheckReport};
use rand::Rng;
use serde_json::json;
use crate::rmatrix::r0_kernel;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);

/// Principal-branch log Γ for complex z off the non-positive real axis.
pub fn ln_gamma(z: C64) -> C64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return C64::new(f64::INFINITY, 0.0);
    }
    let mut z = z;
    let mut shift = C64::new(0.0, 0.0);
    while z.re < 12.0 {
        shift += z.ln();
        z += 1.0;
    }
    // Stirling with Bernoulli corrections
    const B: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    let mut corr = C64::new(0.0, 0.0);
    let mut p = zi;
    for b in B {
        corr += b * p;
        p *= zi2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + corr - shift
}

/// log cosh continued analytically from the real axis (branch points at ±iπ/2).
pub fn log_cosh(x: C64) -> C64 {
    let x = if x.re < 0.0 { -x } else { x };
    x - std::f64::consts::LN_2 + (1.0 + (-2.0 * x).exp()).ln()
}

/// I₁(x) = ∫₀^∞ (1 − cos xk)/(2k cosh(πk/2)) dk in closed form.
pub fn phi_i1(x: C64) -> C64 {
    let iz = I * x / (2.0 * PI);
    let l = |a: f64, s: f64| ln_gamma(C64::new(a, 0.0) + s * iz);
    0.5 * (2.0 * l(0.25, 0.0) - 2.0 * l(0.75, 0.0) + l(0.75, 1.0) + l(0.75, -1.0) - l(0.25, 1.0) - l(0.25, -1.0))
}

/// 2 sin²(z/2), i.e. 1 − cos z without cancellation.
fn one_minus_cos(z: C64) -> C64 {
    let s = (0.5 * z).sin();
    2.0 * s * s
}

pub fn phi_i2(x: C64, nu: f64, spec: &QuadratureSpec) -> Result<C64> {
    let rate = PI / nu + PI / 2.0 - x.im.abs();
    if rate <= 0.0 {
        return Err(Error::Strip(format!("I2 diverges at x = {x}, nu = {nu}")));
    }
    let r = half_line(
        |k| {
            if k < 1e-12 {
                return x * x * nu / (2.0 * PI);
            }
            one_minus_cos(x * k) / (k * (PI * k / 2.0).cosh() * (PI * k / nu).exp_m1())
        },
        rate,
        spec,
    )?;
    Ok(r.value)
}

/// Fixed k-grid for I₂ shared by many evaluations with |Re x| ≤ xmax, |Im x| ≤ ymax.
#[derive(Clone, Debug)]
pub struct PhiKernel {
    pub nu: f64,
    pub xmax: f64,
    pub ymax: f64,
    k: Vec<f64>,
    w: Vec<f64>,
}

impl PhiKernel {
    pub fn new(nu: f64, xmax: f64, ymax: f64, tol: f64) -> Result<Self> {
        check_nu(nu)?;
        let rate = PI / nu + PI / 2.0 - ymax;
        if rate <= 0.0 || ymax >= PI {
            return Err(Error::Strip(format!("kernel strip |Im x| ≤ {ymax} too wide for nu = {nu}")));
        }
        let kmax = ((1.0 / tol).ln() + 5.0) / rate;
        // ≤ 6 radians of cos(xk) per panel at order 16, and resolve the scale ν
        let h = (6.0 / xmax.max(1.0)).min(0.5 * nu).min(kmax);
        let panels = (kmax / h).ceil() as usize;
        let h = kmax / panels as f64;
        let (gx, gw) = crate::quadrature::gauss_legendre(16);
        let mut k = Vec::with_capacity(panels * 16);
        let mut w = Vec::with_capacity(panels * 16);
        for p in 0..panels {
            for (xi, wi) in gx.iter().zip(&gw) {
                let kk = h * (p as f64 + 0.5 * (xi + 1.0));
                k.push(kk);
                w.push(0.5 * h * wi / (kk * (PI * kk / 2.0).cosh() * (PI * kk / nu).exp_m1()));
            }
        }
        Ok(Self { nu, xmax, ymax, k, w })
    }

    pub fn i2(&self, x: C64) -> C64 {
        if x.im == 0.0 {
            let v: f64 = self.k.iter().zip(&self.w).map(|(k, w)| w * 2.0 * (0.5 * x.re * k).sin().powi(2)).sum();
            return C64::new(v, 0.0);
        }
        self.k.iter().zip(&self.w).map(|(k, w)| w * one_minus_cos(x * k)).sum()
    }

    pub fn log_phi(&self, alpha: C64, beta: C64) -> C64 {
        let x = alpha - beta;
        -(1.0 + self.nu) * (alpha + beta) / 2.0 - 0.5 * log_cosh(x) - phi_i1(x) - self.i2(x)
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::Parameter(format!("nu = {nu} outside (0, 1)")));
    }
    Ok(())
}

pub fn log_phi_with(alpha: C64, beta: C64, nu: f64, spec: &QuadratureSpec) -> Result<C64> {
    check_nu(nu)?;
    let x = alpha - beta;
    Ok(-(1.0 + nu) * (alpha + beta) / 2.0 - 0.5 * log_cosh(x) - phi_i1(x) - phi_i2(x, nu, spec)?)
}

/// Half-width of the strip in Im(α−β) where the defining φ integral converges.
pub const PHI_STRIP: f64 = PI / 2.0;

/// φ(α, β, ν) inside the strip |Im(α−β)| < π/2.
pub fn phi(alpha: C64, beta: C64, nu: f64) -> Result<C64> {
    if (alpha - beta).im.abs() >= PHI_STRIP {
        return Err(Error::Strip(format!("phi needs |Im(α−β)| < π/2, got {}", alpha - beta)));
    }
    Ok(log_phi_with(alpha, beta, nu, &QuadratureSpec::default())?.exp())
}

/// Analytic continuation of φ to |Im(α−β)| < π, with the branch cut of cosh^{−1/2}
/// on the imaginary axis beyond ±iπ/2. Used for the boundary values φ(α ∓ πi/2).
pub fn phi_continued(alpha: C64, beta: C64, nu: f64) -> Result<C64> {
    let x = alpha - beta;
    if x.im.abs() >= PI {
        return Err(Error::Strip(format!("continued phi needs |Im(α−β)| < π, got {x}")));
    }
    if (x.re.abs() < 1e-14) && ((x.im.abs() - PI / 2.0).abs() < 1e-14) {
        return Err(Error::Singular(format!("phi branch point at α−β = {x}")));
    }
    Ok(log_phi_with(alpha, beta, nu, &QuadratureSpec::default())?.exp())
}

/// The defining integral for log φ, on Gauss panels; an independent representation.
pub fn log_phi_integral(alpha: C64, beta: C64, nu: f64) -> Result<C64> {
    check_nu(nu)?;
    let x = alpha - beta;
    let rate = PI / 2.0 - x.im.abs();
    if rate <= 0.0 {
        return Err(Error::Strip(format!("phi integral needs |Im(α−β)| < π/2, got {x}")));
    }
    let kmax = (1e16f64).ln() / rate + 5.0;
    let panels = Panels::new(0.0, kmax, ((kmax * (1.0 + x.re.abs())) * 2.0).ceil() as usize + 8, 20);
    let a = PI * (nu + 1.0) / (2.0 * nu);
    let b = PI / (2.0 * nu);
    let v = panels.integrate(|k| {
        // sinh(ak)/sinh(bk) with a > b: e^{(a−b)k}(1−e^{−2ak})/(1−e^{−2bk})
        let r = if k < 1e-10 { a / b } else { ((a - b) * k).exp() * (-(-2.0 * a * k).exp_m1()) / (-(-2.0 * b * k).exp_m1()) };
        let s = (0.5 * x * k).sin();
        let denom = if k < 1e-10 { PI * k * k } else { k * (PI * k).sinh() };
        if k < 1e-10 {
            return x * x / 4.0 * r / PI;
        }
        s * s * r / denom
    });
    Ok(-(1.0 + nu) * (alpha + beta) / 2.0 - 2.0 * v)
}

/// ψ(β, θ) = 2^{−3/4} exp(−(β+θ)/4 − ∫[sin²(½(β−θ+πi)k) + sinh²(πk/2)]/(k sinh πk cosh(πk/2)) dk).
pub fn psi(beta: C64, theta: C64) -> Result<C64> {
    let x = beta - theta + I * PI;
    let rate = (PI / 2.0).min(1.5 * PI - x.im.abs());
    if rate <= 0.0 {
        return Err(Error::Strip(format!("psi needs |Im(β−θ+πi)| < 3π/2, got {x}")));
    }
    let r = half_line(
        |k| {
            if k < 1e-9 {
                return (x * x + PI * PI) / (4.0 * PI);
            }
            let h = PI * k / 2.0;
            let s = (0.5 * x * k).sin();
            s * s / (k * (PI * k).sinh() * h.cosh()) + h.sinh() / (2.0 * k * h.cosh() * h.cosh())
        },
        rate,
        &QuadratureSpec::default(),
    )?;
    Ok(2f64.powf(-0.75) * (-(beta + theta) / 4.0 - r.value).exp())
}

/// χ(α) = i∫ cos(αk) g(k) dk, |Im α| < π.
pub fn chi(alpha: C64, nu: f64) -> Result<C64> {
    check_nu(nu)?;
    let rate = PI - alpha.im.abs();
    if rate <= 0.0 {
        return Err(Error::Strip(format!("chi needs |Im α| < π, got {alpha}")));
    }
    let r = half_line(|k| (alpha * k).cos() * r0_kernel(k, nu), rate, &QuadratureSpec::default())?;
    Ok(I * r.value)
}

/// χ as the α-derivative of log φ(α−πi/2)/φ(α+πi/2), by a 5-point stencil on the
/// continued φ. Valid for real α ≠ 0; at α = 0 the ratio carries an extra −2πiδ(α).
pub fn chi_from_phi(alpha: f64, nu: f64, h: f64) -> Result<C64> {
    if alpha.abs() < 4.0 * h {
        return Err(Error::Singular("log-derivative form excludes α = 0".into()));
    }
    let spec = QuadratureSpec::default();
    let l = |a: f64| -> Result<C64> {
        let a = C64::new(a, 0.0);
        let z = C64::new(0.0, 0.0);
        Ok(log_phi_with(a - I * PI / 2.0, z, nu, &spec)? - log_phi_with(a + I * PI / 2.0, z, nu, &spec)?)
    };
    Ok((l(alpha - 2.0 * h)? - 8.0 * l(alpha - h)? + 8.0 * l(alpha + h)? - l(alpha + 2.0 * h)?) / (12.0 * h))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSeries {
    pub nu: f64,
    /// c_m with χ(α) = i Σ c_m α^{2m}
    pub coefficients: Vec<f64>,
    /// radius of convergence in α (nearest singularity of χ at |α| = π)
    pub radius: f64,
}

pub fn chi_series(nu: f64, m: usize) -> Result<ChiSeries> {
    check_nu(nu)?;
    if m > 20 {
        return Err(Error::Parameter(format!("series order {m} > 20")));
    }
    let spec = QuadratureSpec { tol: 1e-14, ..QuadratureSpec::default() };
    let mut coefficients = Vec::with_capacity(m + 1);
    let mut fact = 1.0f64;
    for j in 0..=m {
        if j > 0 {
            fact *= (2 * j - 1) as f64 * (2 * j) as f64;
        }
        // moment kernels peak near k ≈ 2j/π; widen the cutoff accordingly
        let s = QuadratureSpec { cutoff: Some((1e18f64).ln() / PI + 4.0 * j as f64), ..spec };
        let mom = half_line(|k| C64::new(k.powi(2 * j as i32) * r0_kernel(k, nu), 0.0), PI, &s)?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        coefficients.push(sign * mom.value.re / fact);
    }
    Ok(ChiSeries { nu, coefficients, radius: PI })
}

impl ChiSeries {
    pub fn eval(&self, alpha: C64) -> C64 {
        let a2 = alpha * alpha;
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            acc = acc * a2 + c;
        }
        I * acc
    }
}

/// p(θ) = log tanh ½(θ − πi/2), e(θ) = dp/dθ = i / cosh θ.
pub fn dispersion(theta: C64) -> Result<(C64, C64)> {
    let t = (0.5 * (theta - I * PI / 2.0)).tanh();
    let ch = theta.cosh();
    if t.norm() < 1e-300 || !t.is_finite() || ch.norm() < 1e-14 {
        return Err(Error::Singular(format!("dispersion singular at θ = {theta}")));
    }
    Ok((t.ln(), I / ch))
}

/// Residuals of the two ψ functional equations at random real (β, θ) ∈ (−1, 1)².
/// `nominal_*` use the forms with +tanh and constant 1; `corrected_*` use the forms
/// ψ actually satisfies: the shift ratio is −tanh, and the product
/// ψψ(e^β − i e^θ) is a constant (taken from the first sample) rather than 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsiEquationReport {
    pub nominal_shift: CheckReport,
    pub nominal_product: CheckReport,
    pub corrected_shift: CheckReport,
    pub corrected_product: CheckReport,
    pub product_constant: C64,
}

pub fn check_psi_equations(samples: usize, seed: u64, tol: f64) -> Result<PsiEquationReport> {
    let mut g = rng(seed);
    let pts: Vec<(C64, C64)> = (0..samples)
        .map(|_| (C64::new(g.gen_range(-1.0..1.0), 0.0), C64::new(g.gen_range(-1.0..1.0), 0.0)))
        .collect();
    let mut shift = (0.0f64, 0.0f64);
    let mut prod = (0.0f64, 0.0f64);
    let mut konst = None;
    for &(b, t) in &pts {
        let p0 = psi(b, t)?;
        let ratio = psi(b, t + 2.0 * PI * I)? / p0;
        let th = (0.5 * (t - b + I * PI / 2.0)).tanh();
        shift.0 = shift.0.max((ratio / th - 1.0).norm());
        shift.1 = shift.1.max((ratio / th + 1.0).norm());
        let pr = p0 * psi(b, t + PI * I)? * (b.exp() - I * t.exp());
        let k = *konst.get_or_insert(pr);
        prod.0 = prod.0.max((pr - 1.0).norm());
        prod.1 = prod.1.max((pr / k - 1.0).norm());
    }
    let k = konst.unwrap_or(C64::new(1.0, 0.0));
    let d = json!({ "seed": seed });
    Ok(PsiEquationReport {
        nominal_shift: CheckReport::new("psi:shift(nominal)", shift.0, tol, samples).with_details(d.clone()),
        nominal_product: CheckReport::new("psi:product(nominal)", prod.0, tol, samples).with_details(d.clone()),
        corrected_shift: CheckReport::new("psi:shift(-tanh)", shift.1, tol, samples).with_details(d.clone()),
        corrected_product: CheckReport::new("psi:product(constant)", prod.1, tol, samples)
            .with_details(json!({ "seed": seed, "constant": [k.re, k.im] })),
        product_constant: k,
    })
}

/// max |χ_integral − χ_series| on a grid in |α| ≤ amax.
pub fn check_chi_series(nu: f64, order: usize, amax: f64, tol: f64) -> Result<CheckReport> {
    let s = chi_series(nu, order)?;
    let mut worst = 0.0f64;
    let n = 11;
    for j in 0..n {
        let a = C64::new(-amax + 2.0 * amax * j as f64 / (n - 1) as f64, 0.0);
        worst = worst.max((s.eval(a) - chi(a, nu)?).norm());
    }
    Ok(CheckReport::new("chi:series", worst, tol, n).with_details(json!({ "nu": nu, "order": order })))
}

/// max |χ_integral − d/dα log φ(α−πi/2)/φ(α+πi/2)| at `points` real α in [0.2, 2].
pub fn check_chi_log_derivative(nu: f64, points: usize, tol: f64) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for j in 0..points {
        let a = 0.2 + 1.8 * j as f64 / (points.max(2) - 1) as f64;
        let d = chi_from_phi(a, nu, 1e-3)?;
        worst = worst.max((d - chi(C64::new(a, 0.0), nu)?).norm());
    }
    Ok(CheckReport::new("chi:log-derivative", worst, tol, points).with_details(json!({ "nu": nu })))
}

/// max |e(θ) − central difference of p| at `points` real θ in [−2, 2] (θ ≠ 0 grid).
pub fn check_dispersion(points: usize, tol: f64) -> Result<CheckReport> {
    let h = 1e-4;
    let mut worst = 0.0f64;
    for j in 0..points {
        let t = C64::new(-2.0 + 4.0 * (j as f64 + 0.5) / points as f64, 0.0);
        let fd = (dispersion(t + h)?.0 - dispersion(t - h)?.0) / (2.0 * h);
        worst = worst.max((fd - dispersion(t)?.1).norm());
    }
    Ok(CheckReport::new("dispersion:derivative", worst, tol, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_values() {
        assert!((ln_gamma(C64::new(0.5, 0.0)).re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((ln_gamma(C64::new(5.0, 0.0)).re - 24f64.ln()).abs() < 1e-13);
        // |Γ(iy)|² = π/(y sinh πy)
        let y = 0.7;
        let v = 2.0 * ln_gamma(C64::new(0.0, y)).re;
        assert!((v - (PI / (y * (PI * y).sinh())).ln()).abs() < 1e-13);
    }

    #[test]
    fn kernel_matches_adaptive() {
        for nu in [0.05, 0.3, 0.8] {
            let kern = PhiKernel::new(nu, 120.0, 0.4, 1e-13).unwrap();
            for x in [C64::new(0.01, 0.0), C64::new(2.5, 0.3), C64::new(-40.0, -0.2), C64::new(115.0, 0.0)] {
                let a = phi_i2(x, nu, &QuadratureSpec::default()).unwrap();
                assert!((kern.i2(x) - a).norm() < 1e-11 * a.norm().max(1.0), "{nu} {x}: {} {a}", kern.i2(x));
            }
        }
    }

    #[test]
    fn phi_at_origin() {
        let z = C64::new(0.0, 0.0);
        assert!((phi(z, z, 0.3).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn dispersion_derivative() {
        let t = C64::new(1.2, 0.0);
        let h = 1e-4;
        let fd = (dispersion(t + h).unwrap().0 - dispersion(t - h).unwrap().0) / (2.0 * h);
        assert!((fd - dispersion(t).unwrap().1).norm() < 1e-8);
    }
}
