//! Sparse multivariate Laurent polynomials over ℚ(i).

use super::gauss::GaussQ;
use crate::{Error, Result, C64};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, GaussQ>,
}

impl LaurentPoly {
    pub fn zero(vars: &[&str]) -> Self {
        Self { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn zero_like(&self) -> Self {
        Self { vars: self.vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant_like(&self, c: GaussQ) -> Self {
        let mut p = self.zero_like();
        p.add_term(vec![0; self.vars.len()], c);
        p
    }

    pub fn constant(vars: &[&str], c: GaussQ) -> Self {
        Self::zero(vars).constant_like(c)
    }

    pub fn var(vars: &[&str], name: &str) -> Result<Self> {
        let mut p = Self::zero(vars);
        let k = p.index(name)?;
        let mut e = vec![0; vars.len()];
        e[k] = 1;
        p.add_term(e, GaussQ::one());
        Ok(p)
    }

    pub fn monomial(vars: &[&str], exps: Vec<i32>, c: GaussQ) -> Result<Self> {
        if exps.len() != vars.len() {
            return Err(Error::Dimension(format!("{} exponents for {} variables", exps.len(), vars.len())));
        }
        let mut p = Self::zero(vars);
        p.add_term(exps, c);
        Ok(p)
    }

    /// a·x + b for a named variable
    pub fn linear(vars: &[&str], name: &str, a: GaussQ, b: GaussQ) -> Result<Self> {
        Ok(Self::var(vars, name)?.scale(&a).add(&Self::constant(vars, b))?)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| Error::Parameter(format!("unknown variable {name}")))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussQ)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Vec<i32>, c: GaussQ) {
        if c.is_zero() {
            return;
        }
        let key = Monomial(e);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn compatible(&self, o: &Self) -> Result<()> {
        if self.vars != o.vars {
            return Err(Error::Dimension(format!("variables {:?} vs {:?}", self.vars, o.vars)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.0.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&GaussQ::int(-1, 0))
    }

    pub fn scale(&self, s: &GaussQ) -> Self {
        let mut out = self.zero_like();
        if s.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.compatible(o)?;
        let mut out = self.zero_like();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let e = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = self.constant_like(GaussQ::one());
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Replace `name` by `value` (same variable set). Negative powers of the variable
    /// need `value` to be a single monomial.
    pub fn substitute(&self, name: &str, value: &Self) -> Result<Self> {
        self.compatible(value)?;
        let k = self.index(name)?;
        let inverse = if value.terms.len() == 1 {
            let (m, c) = value.terms.iter().next().unwrap();
            Some(Self { vars: self.vars.clone(), terms: BTreeMap::from([(Monomial(m.0.iter().map(|e| -e).collect()), c.inv()?)]) })
        } else {
            None
        };
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            let e = m.0[k];
            let mut rest = m.0.clone();
            rest[k] = 0;
            let mut t = Self { vars: self.vars.clone(), terms: BTreeMap::from([(Monomial(rest), c.clone())]) };
            if e >= 0 {
                t = t.mul(&value.pow(e as u32)?)?;
            } else {
                let inv = inverse
                    .as_ref()
                    .ok_or_else(|| Error::Parameter(format!("substituting a non-monomial for {name} under a negative power")))?;
                t = t.mul(&inv.pow((-e) as u32)?)?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    pub fn evaluate_exact(&self, point: &[GaussQ]) -> Result<GaussQ> {
        if point.len() != self.vars.len() {
            return Err(Error::Dimension(format!("{} values for {} variables", point.len(), self.vars.len())));
        }
        let mut acc = GaussQ::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e != 0 {
                    t = &t * &x.pow(e)?;
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, point: &[C64]) -> Result<C64> {
        if point.len() != self.vars.len() {
            return Err(Error::Dimension(format!("{} values for {} variables", point.len(), self.vars.len())));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_c64();
            for (x, &e) in point.iter().zip(&m.0) {
                if e < 0 && x.norm() == 0.0 {
                    return Err(Error::Singular("negative power of a vanishing variable".into()));
                }
                t *= x.powi(e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// (min, max) exponent of a variable; None for the zero polynomial.
    pub fn degree_in(&self, name: &str) -> Result<Option<(i32, i32)>> {
        let k = self.index(name)?;
        Ok(self.terms.keys().map(|m| m.0[k]).fold(None, |acc, e| match acc {
            None => Some((e, e)),
            Some((lo, hi)) => Some((lo.min(e), hi.max(e))),
        }))
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Exchange two variables.
    pub fn swap_vars(&self, a: &str, b: &str) -> Result<Self> {
        let (i, j) = (self.index(a)?, self.index(b)?);
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.swap(i, j);
            out.add_term(e, c.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (v, &e) in self.vars.iter().zip(&m.0) {
                match e {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    _ => write!(f, "*{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_variable() {
        let v = ["x"];
        let x = LaurentPoly::var(&v, "x").unwrap();
        let xi = LaurentPoly::monomial(&v, vec![-1], GaussQ::one()).unwrap();
        let p = x.add(&xi).unwrap().mul(&x).unwrap();
        let want = x.mul(&x).unwrap().add(&LaurentPoly::constant(&v, GaussQ::one())).unwrap();
        assert_eq!(p, want);
        assert!(want.evaluate_exact(&[GaussQ::i()]).unwrap().is_zero());
    }

    #[test]
    fn substitution_rules() {
        let v = ["x", "y"];
        let x = LaurentPoly::var(&v, "x").unwrap();
        let y = LaurentPoly::var(&v, "y").unwrap();
        let inv = LaurentPoly::monomial(&v, vec![-1, 0], GaussQ::one()).unwrap();
        let sum = x.add(&y).unwrap();
        assert!(inv.substitute("x", &sum).is_err());
        let p = inv.substitute("x", &y.scale(&GaussQ::int(2, 0))).unwrap();
        assert_eq!(p, LaurentPoly::monomial(&v, vec![0, -1], GaussQ::ratio(1, 2)).unwrap());
    }
}
