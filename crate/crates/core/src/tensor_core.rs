//! Dense operators on (ℂ²)^⊗N. Site 1 is the slowest tensor index; basis |↑⟩ = 0, |↓⟩ = 1.

use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector, Matrix2};

pub const MAX_SITES: usize = 12;

pub type SiteOperator = Matrix2<C64>;

#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    pub n: usize,
    pub amplitudes: DVector<C64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainOperator {
    pub n: usize,
    pub entries: DMatrix<C64>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity2() -> SiteOperator {
    Matrix2::identity()
}
pub fn sigma1() -> SiteOperator {
    Matrix2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}
pub fn sigma2() -> SiteOperator {
    Matrix2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}
pub fn sigma3() -> SiteOperator {
    Matrix2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}
/// σ⁺ = |↑⟩⟨↓|
pub fn sigma_plus() -> SiteOperator {
    Matrix2::new(c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.))
}
pub fn sigma_minus() -> SiteOperator {
    Matrix2::new(c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.))
}

fn check_sites(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::Parameter(format!("site count {n} outside 1..={MAX_SITES}")));
    }
    Ok(())
}

impl SpinState {
    pub fn new(n: usize, amplitudes: DVector<C64>) -> Result<Self> {
        check_sites(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::Dimension(format!("{} amplitudes for {n} sites", amplitudes.len())));
        }
        Ok(Self { n, amplitudes })
    }

    /// Product state from spins (0 = up, 1 = down), site 1 first.
    pub fn basis(spins: &[u8]) -> Result<Self> {
        let n = spins.len();
        check_sites(n)?;
        let idx = spins.iter().fold(0usize, |acc, &s| (acc << 1) | (s as usize & 1));
        let mut v = DVector::zeros(1 << n);
        v[idx] = C64::new(1.0, 0.0);
        Ok(Self { n, amplitudes: v })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

impl ChainOperator {
    pub fn new(n: usize, entries: DMatrix<C64>) -> Result<Self> {
        check_sites(n)?;
        let d = 1 << n;
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for {n} sites",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_sites(n)?;
        Ok(Self { n, entries: DMatrix::identity(1 << n, 1 << n) })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_sites(n)?;
        Ok(Self { n, entries: DMatrix::zeros(1 << n, 1 << n) })
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn apply(&self, s: &SpinState) -> Result<SpinState> {
        if s.n != self.n {
            return Err(Error::Dimension(format!("operator on {} sites, state on {}", self.n, s.n)));
        }
        Ok(SpinState { n: self.n, amplitudes: &self.entries * &s.amplitudes })
    }

    pub fn mul(&self, o: &ChainOperator) -> Result<ChainOperator> {
        same_dim(self, o)?;
        Ok(ChainOperator { n: self.n, entries: &self.entries * &o.entries })
    }

    pub fn add(&self, o: &ChainOperator) -> Result<ChainOperator> {
        same_dim(self, o)?;
        Ok(ChainOperator { n: self.n, entries: &self.entries + &o.entries })
    }

    pub fn scale(&self, z: C64) -> ChainOperator {
        ChainOperator { n: self.n, entries: &self.entries * z }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.entries.clone().singular_values().max()
    }
}

fn same_dim(a: &ChainOperator, b: &ChainOperator) -> Result<()> {
    if a.n != b.n {
        return Err(Error::Dimension(format!("{} sites vs {} sites", a.n, b.n)));
    }
    Ok(())
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

pub fn embed(op: &SiteOperator, site: usize, n: usize) -> Result<ChainOperator> {
    check_sites(n)?;
    if site == 0 || site > n {
        return Err(Error::OutOfRange(format!("site {site} not in 1..={n}")));
    }
    let left = DMatrix::<C64>::identity(1 << (site - 1), 1 << (site - 1));
    let right = DMatrix::<C64>::identity(1 << (n - site), 1 << (n - site));
    let op = DMatrix::from_iterator(2, 2, op.iter().cloned());
    Ok(ChainOperator { n, entries: left.kronecker(&op).kronecker(&right) })
}

/// Embed a 4×4 operator on sites (j, j+1).
pub fn embed_two_site(r: &DMatrix<C64>, j: usize, n: usize) -> Result<ChainOperator> {
    check_sites(n)?;
    if r.nrows() != 4 || r.ncols() != 4 {
        return Err(Error::Dimension(format!("two-site operator is {}x{}", r.nrows(), r.ncols())));
    }
    if j == 0 || j + 1 > n {
        return Err(Error::OutOfRange(format!("pair ({j}, {}) on {n} sites", j + 1)));
    }
    let left = DMatrix::<C64>::identity(1 << (j - 1), 1 << (j - 1));
    let right = DMatrix::<C64>::identity(1 << (n - j - 1), 1 << (n - j - 1));
    Ok(ChainOperator { n, entries: left.kronecker(r).kronecker(&right) })
}

/// Apply a 4×4 operator to factors j, j+1 without forming the full matrix.
pub fn apply_two_site(r: &DMatrix<C64>, j: usize, state: &SpinState) -> Result<SpinState> {
    let n = state.n;
    if r.nrows() != 4 || r.ncols() != 4 {
        return Err(Error::Dimension(format!("two-site operator is {}x{}", r.nrows(), r.ncols())));
    }
    if j == 0 || j + 1 > n {
        return Err(Error::OutOfRange(format!("pair ({j}, {}) on {n} sites", j + 1)));
    }
    let inner = 1usize << (n - j - 1);
    let outer = 1usize << (j - 1);
    let mut out = DVector::zeros(1 << n);
    let a = &state.amplitudes;
    for o in 0..outer {
        for i in 0..inner {
            let base = o * 4 * inner + i;
            let v: [C64; 4] = std::array::from_fn(|p| a[base + p * inner]);
            for p in 0..4 {
                let mut acc = C64::new(0.0, 0.0);
                for (q, vq) in v.iter().enumerate() {
                    acc += r[(p, q)] * vq;
                }
                out[base + p * inner] = acc;
            }
        }
    }
    Ok(SpinState { n, amplitudes: out })
}

pub fn commutator(a: &ChainOperator, b: &ChainOperator) -> Result<ChainOperator> {
    same_dim(a, b)?;
    Ok(ChainOperator { n: a.n, entries: &a.entries * &b.entries - &b.entries * &a.entries })
}

/// Permutation of two ℂ² factors.
pub fn permutation4() -> DMatrix<C64> {
    let mut p = DMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        p[(r, col)] = C64::new(1.0, 0.0);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma3_ordering() {
        let a = embed(&sigma3(), 1, 2).unwrap();
        let b = embed(&sigma3(), 2, 2).unwrap();
        let da: Vec<f64> = (0..4).map(|i| a.entries[(i, i)].re).collect();
        let db: Vec<f64> = (0..4).map(|i| b.entries[(i, i)].re).collect();
        assert_eq!(da, vec![1., 1., -1., -1.]);
        assert_eq!(db, vec![1., -1., 1., -1.]);
        assert_eq!(commutator(&a, &b).unwrap().norm(), 0.0);
    }

    #[test]
    fn pauli_algebra() {
        let s1 = embed(&sigma1(), 1, 1).unwrap();
        let s2 = embed(&sigma2(), 1, 1).unwrap();
        let s3 = embed(&sigma3(), 1, 1).unwrap();
        let cm = commutator(&s1, &s2).unwrap();
        assert!((cm.entries - s3.entries * C64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn swap_two_site() {
        let s = SpinState::basis(&[0, 1]).unwrap();
        let t = apply_two_site(&permutation4(), 1, &s).unwrap();
        assert_eq!(t, SpinState::basis(&[1, 0]).unwrap());
    }

    #[test]
    fn ranges() {
        assert!(embed(&sigma3(), 0, 3).is_err());
        assert!(embed(&sigma3(), 4, 3).is_err());
        assert!(embed(&sigma3(), 1, 13).is_err());
        let s = SpinState::basis(&[0, 0]).unwrap();
        assert!(apply_two_site(&permutation4(), 2, &s).is_err());
        assert!(apply_two_site(&DMatrix::identity(3, 3), 1, &s).is_err());
    }
}
