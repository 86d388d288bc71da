//! Dense univariate polynomials and factored-denominator rational functions over ℚ(i),
//! used to follow one variable through a subset sum.

use super::gauss::GaussQ;
use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(pub Vec<GaussQ>);

impl UPoly {
    pub fn constant(c: GaussQ) -> Self {
        Self(vec![c]).trim()
    }

    /// a·v + c
    pub fn linear(a: GaussQ, c: GaussQ) -> Self {
        Self(vec![c, a]).trim()
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// −1 for the zero polynomial
    pub fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = GaussQ::zero();
        Self((0..n).map(|k| self.0.get(k).unwrap_or(&z) + o.0.get(k).unwrap_or(&z)).collect()).trim()
    }

    pub fn scale(&self, s: &GaussQ) -> Self {
        Self(self.0.iter().map(|c| c * s).collect()).trim()
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self(vec![]);
        }
        let mut out = vec![GaussQ::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self(out).trim()
    }

    /// times (v − r)
    pub fn mul_root(&self, r: &GaussQ) -> Self {
        self.mul(&Self::linear(GaussQ::one(), -r))
    }

    /// Synthetic division by (v − r): (quotient, remainder).
    pub fn div_root(&self, r: &GaussQ) -> (Self, GaussQ) {
        if self.is_zero() {
            return (Self(vec![]), GaussQ::zero());
        }
        let n = self.0.len();
        let mut q = vec![GaussQ::zero(); n.saturating_sub(1)];
        let mut acc = GaussQ::zero();
        for k in (0..n).rev() {
            acc = &(&acc * r) + &self.0[k];
            if k > 0 {
                q[k - 1] = acc.clone();
            }
        }
        (Self(q).trim(), acc)
    }

    pub fn eval(&self, v: &GaussQ) -> GaussQ {
        let mut acc = GaussQ::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * v) + c;
        }
        acc
    }
}

/// num / ∏(v − r)^k
#[derive(Clone, Debug, PartialEq)]
pub struct Frac {
    pub num: UPoly,
    pub poles: BTreeMap<GaussQ, u32>,
}

impl Frac {
    pub fn poly(p: UPoly) -> Self {
        Self { num: p, poles: BTreeMap::new() }
    }

    /// Bring to a common denominator and add.
    pub fn sum(terms: &[Frac]) -> Frac {
        let mut poles: BTreeMap<GaussQ, u32> = BTreeMap::new();
        for t in terms {
            if t.num.is_zero() {
                continue;
            }
            for (r, &k) in &t.poles {
                let e = poles.entry(r.clone()).or_insert(0);
                *e = (*e).max(k);
            }
        }
        let mut num = UPoly(vec![]);
        for t in terms {
            if t.num.is_zero() {
                continue;
            }
            let mut p = t.num.clone();
            for (r, &k) in &poles {
                for _ in t.poles.get(r).copied().unwrap_or(0)..k {
                    p = p.mul_root(r);
                }
            }
            num = num.add(&p);
        }
        Frac { num, poles }
    }

    /// Cancel common factors (v − r) between numerator and denominator; returns the
    /// remaining pole orders.
    pub fn reduce(&self) -> Frac {
        let mut num = self.num.clone();
        let mut poles = BTreeMap::new();
        for (r, &k) in &self.poles {
            let mut left = k;
            while left > 0 && !num.is_zero() {
                let (q, rem) = num.div_root(r);
                if !rem.is_zero() {
                    break;
                }
                num = q;
                left -= 1;
            }
            if left > 0 && !num.is_zero() {
                poles.insert(r.clone(), left);
            }
        }
        Frac { num, poles }
    }

    /// Degree of numerator minus pole count (−∞ as i64::MIN for zero).
    pub fn degree(&self) -> i64 {
        if self.num.is_zero() {
            return i64::MIN;
        }
        self.num.degree() - self.poles.values().map(|&k| k as i64).sum::<i64>()
    }

    /// Value where no pole sits.
    pub fn eval(&self, v: &GaussQ) -> Result<GaussQ> {
        let mut d = GaussQ::one();
        for (r, &k) in &self.poles {
            d = &d * &(v - r).pow(k as i32)?;
        }
        self.num.eval(v).checked_div(&d)
    }
}

/// Arithmetic needed to assemble subset-sum terms; divisors are always differences of
/// two parameters, so a rational function only ever divides by something linear.
pub trait Scalar: Clone {
    fn konst(c: GaussQ) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
}

impl Scalar for GaussQ {
    fn konst(c: GaussQ) -> Self {
        c
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.checked_div(o)
    }
}

impl Scalar for Frac {
    fn konst(c: GaussQ) -> Self {
        Frac::poly(UPoly::constant(c))
    }
    fn add(&self, o: &Self) -> Self {
        Frac::sum(&[self.clone(), o.clone()])
    }
    fn sub(&self, o: &Self) -> Self {
        let neg = Frac { num: o.num.scale(&GaussQ::int(-1, 0)), poles: o.poles.clone() };
        Frac::sum(&[self.clone(), neg])
    }
    fn mul(&self, o: &Self) -> Self {
        let mut poles = self.poles.clone();
        for (r, &k) in &o.poles {
            *poles.entry(r.clone()).or_insert(0) += k;
        }
        Frac { num: self.num.mul(&o.num), poles }
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if !o.poles.is_empty() || o.num.degree() > 1 {
            return Err(Error::Parameter("division by a non-linear factor is not supported here".into()));
        }
        match o.num.degree() {
            -1 => Err(Error::Singular("division by an identically vanishing factor".into())),
            0 => Ok(Frac { num: self.num.scale(&o.num.0[0].inv()?), poles: self.poles.clone() }),
            _ => {
                let a = &o.num.0[1];
                let root = -(o.num.0[0].checked_div(a)?);
                let mut poles = self.poles.clone();
                *poles.entry(root).or_insert(0) += 1;
                Ok(Frac { num: self.num.scale(&a.inv()?), poles })
            }
        }
    }
}

/// Degree in the free variable, as an upper bound through sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Deg(pub i64);

impl Deg {
    const ZERO: i64 = i64::MIN / 4;
}

impl Scalar for Deg {
    fn konst(c: GaussQ) -> Self {
        Deg(if c.is_zero() { Self::ZERO } else { 0 })
    }
    fn add(&self, o: &Self) -> Self {
        Deg(self.0.max(o.0))
    }
    fn sub(&self, o: &Self) -> Self {
        Deg(self.0.max(o.0))
    }
    fn mul(&self, o: &Self) -> Self {
        Deg((self.0 + o.0).max(Self::ZERO))
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if o.0 <= Self::ZERO {
            return Err(Error::Singular("division by zero".into()));
        }
        Ok(Deg(self.0 - o.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_fractions_cancel() {
        // 1/(v−1) − 1/(v−2) + 1/((v−1)(v−2)) = 0
        let lin = |c: i64| Frac::poly(UPoly::linear(GaussQ::one(), GaussQ::int(-c, 0)));
        let one = Frac::konst(GaussQ::one());
        let a = one.div(&lin(1)).unwrap();
        let b = one.div(&lin(2)).unwrap();
        let s = a.sub(&b).add(&a.mul(&b)).reduce();
        assert!(s.num.is_zero());
        assert!(one.div(&a.mul(&lin(3))).is_err());
    }

    #[test]
    fn synthetic_division() {
        let p = UPoly(vec![GaussQ::int(-1, 0), GaussQ::zero(), GaussQ::one()]);
        let (q, r) = p.div_root(&GaussQ::one());
        assert!(r.is_zero());
        assert_eq!(q, UPoly::linear(GaussQ::one(), GaussQ::one()));
        assert_eq!(p.div_root(&GaussQ::i()).1, GaussQ::int(-2, 0));
    }
}
