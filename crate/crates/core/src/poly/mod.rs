//! Exact Laurent-polynomial arithmetic over ℚ(i), the polynomial M and its kernel,
//! and representation-dimension bookkeeping. No floating point enters any identity.

pub mod dims;
pub mod gauss;
pub mod laurent;
pub mod mpoly;
pub mod upoly;

pub use dims::{binomial, dims, DimensionLedger};
pub use gauss::GaussQ;
pub use laurent::{LaurentPoly, Monomial};
