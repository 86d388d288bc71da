//! Exact Gaussian rationals a + bi, a, b ∈ ℚ.

use crate::{Error, Result, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussQ {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussQ {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn int(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// p/q as a real Gaussian rational; q ≠ 0.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::new(BigRational::new(BigInt::from(p), BigInt::from(q)), BigRational::zero())
    }

    pub fn zero() -> Self {
        Self::int(0, 0)
    }

    pub fn one() -> Self {
        Self::int(1, 0)
    }

    pub fn i() -> Self {
        Self::int(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Singular("division by zero Gaussian rational".into()));
        }
        let d = self.norm_sqr();
        Ok(Self::new(&self.re / &d, -&self.im / &d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// Size proxy for reporting: |re| + |im| as f64.
    pub fn magnitude(&self) -> f64 {
        (self.re.abs() + self.im.abs()).to_f64().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            _ => {
                if self.im.is_negative() {
                    write!(f, "({} - {}i)", self.re, -self.im.clone())
                } else {
                    write!(f, "({} + {}i)", self.re, self.im)
                }
            }
        }
    }
}

impl From<i64> for GaussQ {
    fn from(v: i64) -> Self {
        Self::int(v, 0)
    }
}

impl From<BigRational> for GaussQ {
    fn from(v: BigRational) -> Self {
        Self::new(v, BigRational::zero())
    }
}

impl<'a> Add<&'a GaussQ> for &'a GaussQ {
    type Output = GaussQ;
    fn add(self, o: &GaussQ) -> GaussQ {
        GaussQ::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussQ> for &'a GaussQ {
    type Output = GaussQ;
    fn sub(self, o: &GaussQ) -> GaussQ {
        GaussQ::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussQ> for &'a GaussQ {
    type Output = GaussQ;
    fn mul(self, o: &GaussQ) -> GaussQ {
        GaussQ::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Add for GaussQ {
    type Output = GaussQ;
    fn add(self, o: GaussQ) -> GaussQ {
        &self + &o
    }
}

impl Sub for GaussQ {
    type Output = GaussQ;
    fn sub(self, o: GaussQ) -> GaussQ {
        &self - &o
    }
}

impl Mul for GaussQ {
    type Output = GaussQ;
    fn mul(self, o: GaussQ) -> GaussQ {
        &self * &o
    }
}

/// Panics on a zero divisor; use `checked_div` where the divisor may vanish.
impl Div for GaussQ {
    type Output = GaussQ;
    fn div(self, o: GaussQ) -> GaussQ {
        self.checked_div(&o).expect("division by zero Gaussian rational")
    }
}

impl Neg for GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ::new(-self.re, -self.im)
    }
}

impl Neg for &GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&GaussQ> for GaussQ {
    fn add_assign(&mut self, o: &GaussQ) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussQ> for GaussQ {
    fn sub_assign(&mut self, o: &GaussQ) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussQ> for GaussQ {
    fn mul_assign(&mut self, o: &GaussQ) {
        *self = &*self * o;
    }
}

impl Zero for GaussQ {
    fn zero() -> Self {
        GaussQ::zero()
    }
    fn is_zero(&self) -> bool {
        GaussQ::is_zero(self)
    }
}

impl One for GaussQ {
    fn one() -> Self {
        GaussQ::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = GaussQ::new(BigRational::new(1.into(), 3.into()), BigRational::new((-2).into(), 5.into()));
        let b = GaussQ::int(2, 7);
        assert_eq!(a.checked_div(&b).unwrap() * b.clone(), a);
        assert_eq!(&GaussQ::i() * &GaussQ::i(), GaussQ::int(-1, 0));
        assert!(GaussQ::zero().inv().is_err());
        assert_eq!(b.pow(-2).unwrap() * b.pow(2).unwrap(), GaussQ::one());
    }
}
