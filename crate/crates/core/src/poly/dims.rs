//! Binomial dimension counts for the singlet and irreducible spaces.

use serde::{Deserialize, Serialize};

/// C(n, k), zero when k < 0 or k > n (n ≥ 0).
pub fn binomial(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc
}

fn diff(a: u128, b: u128) -> i128 {
    a as i128 - b as i128
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionLedger {
    pub n: usize,
    /// C(2n, n) − C(2n, n−1)
    pub singlet_dim: i128,
    /// C(2n−2, n−1) − C(2n−2, n−3)
    pub irr_dim: i128,
    /// C(2n−4, n−2) − C(2n−4, n−4)
    pub hh_exponent: i128,
    pub equal: bool,
}

pub fn dims(n: usize) -> DimensionLedger {
    let n_ = n as i64;
    let singlet_dim = diff(binomial(2 * n_, n_), binomial(2 * n_, n_ - 1));
    let irr_dim = diff(binomial(2 * n_ - 2, n_ - 1), binomial(2 * n_ - 2, n_ - 3));
    let hh_exponent = diff(binomial(2 * n_ - 4, n_ - 2), binomial(2 * n_ - 4, n_ - 4));
    DimensionLedger { n, singlet_dim, irr_dim, hh_exponent, equal: singlet_dim == irr_dim }
}
