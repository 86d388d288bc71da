//! Double-exponential and Gauss–Legendre quadrature for smooth complex integrands.

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    TanhSinh,
    GaussPanels,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    /// Explicit upper cutoff; `None` derives it from the integrand decay rate.
    pub cutoff: Option<f64>,
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rule: Rule::TanhSinh, cutoff: None, tol: 1e-13, max_depth: 12 }
    }
}

impl QuadratureSpec {
    pub fn with_rule(rule: Rule) -> Self {
        Self { rule, ..Self::default() }
    }

    /// Cutoff K with tail e^{-rate K} below tol/10 (times a safety factor for
    /// polynomial prefactors).
    pub fn cutoff_for(&self, rate: f64) -> f64 {
        self.cutoff.unwrap_or_else(|| ((1e3 / self.tol).ln() / rate).max(1.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub evals: usize,
}

/// Tanh–sinh on [a, b]. Levels halve the step; the error estimate is the
/// difference between the last two levels.
pub fn tanh_sinh<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64, max_level: u32) -> Result<QuadResult> {
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let tmax = 3.6;
    let term = |t: f64| -> C64 {
        let s = FRAC_PI_2 * t.sinh();
        let ch = s.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        // distance to the nearer endpoint, formed without cancellation
        let u = 1.0 / (s.abs().exp() * ch);
        let (xl, xr) = (a + d * u, b - d * u);
        if t == 0.0 {
            return f(c) * w;
        }
        let x = if t > 0.0 { xr } else { xl };
        if x <= a || x >= b || w == 0.0 {
            return C64::new(0.0, 0.0);
        }
        f(x) * w
    };
    let mut h = 0.5f64;
    let mut sum = C64::new(0.0, 0.0);
    let mut evals = 0usize;
    let mut k = 0i64;
    loop {
        let t = k as f64 * h;
        if t > tmax {
            break;
        }
        sum += term(t);
        evals += 1;
        if k > 0 {
            sum += term(-t);
            evals += 1;
        }
        k += 1;
    }
    let mut prev = sum * h * d;
    let mut err = f64::INFINITY;
    for _level in 1..=max_level {
        h *= 0.5;
        let mut k = 1i64;
        loop {
            let t = k as f64 * h;
            if t > tmax {
                break;
            }
            sum += term(t) + term(-t);
            evals += 2;
            k += 2;
        }
        let cur = sum * h * d;
        err = (cur - prev).norm();
        prev = cur;
        if err <= tol * cur.norm().max(1e-300) || err <= tol * 1e-3 {
            return Ok(QuadResult { value: cur, error: err, evals });
        }
    }
    if err <= tol.max(1e-300) * prev.norm().max(1.0) * 10.0 {
        return Ok(QuadResult { value: prev, error: err, evals });
    }
    Err(Error::Quadrature(format!("tanh-sinh on [{a}, {b}] stalled at error {err:e}")))
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite rule: fixed panels of `order` points.
pub struct Panels {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Panels {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// Gauss panels with doubling until two successive refinements agree.
pub fn gauss_adaptive<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<QuadResult> {
    let order = 16;
    let mut panels = ((b - a).abs().ceil() as usize).max(2);
    let mut prev = Panels::new(a, b, panels, order).integrate(&f);
    let mut evals = panels * order;
    for _ in 0..max_depth {
        panels *= 2;
        let cur = Panels::new(a, b, panels, order).integrate(&f);
        evals += panels * order;
        let err = (cur - prev).norm();
        if err <= tol * cur.norm().max(1e-300) || err <= tol * 1e-3 {
            return Ok(QuadResult { value: cur, error: err, evals });
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!("Gauss panels on [{a}, {b}] did not converge")))
}

/// ∫₀^∞ f with the cutoff taken from the decay rate.
pub fn half_line<F: Fn(f64) -> C64>(f: F, rate: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    let k = spec.cutoff_for(rate);
    match spec.rule {
        Rule::TanhSinh => tanh_sinh(f, 0.0, k, spec.tol, spec.max_depth),
        Rule::GaussPanels => gauss_adaptive(f, 0.0, k, spec.tol, spec.max_depth.min(8)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_exact_for_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn tanh_sinh_endpoint_singular() {
        // ∫₀¹ ln x dx = −1
        let r = tanh_sinh(|x| C64::new(x.ln(), 0.0), 0.0, 1.0, 1e-12, 12).unwrap();
        assert!((r.value.re + 1.0).abs() < 1e-12, "{:?}", r);
    }

    #[test]
    fn half_line_exponential() {
        let spec = QuadratureSpec::default();
        let r = half_line(|k| C64::new((-k).exp() * (2.0 * k).cos(), 0.0), 1.0, &spec).unwrap();
        assert!((r.value.re - 0.2).abs() < 1e-12);
        let g = half_line(|k| C64::new((-k).exp() * (2.0 * k).cos(), 0.0), 1.0, &QuadratureSpec::with_rule(Rule::GaussPanels)).unwrap();
        assert!((g.value.re - 0.2).abs() < 1e-12);
    }
}
