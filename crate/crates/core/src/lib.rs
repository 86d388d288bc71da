//! Numerical and exact machinery for XXZ R-matrices, qKZ systems, deformed
//! Riemann pairings and their hyperelliptic limit.

pub mod correlator;
pub mod error;
pub mod hyperelliptic;
pub mod pairing;
pub mod poly;
pub mod qkz;
pub mod quadrature;
pub mod quantum_group;
pub mod report;
pub mod rmatrix;
pub mod special_functions;
pub mod tensor_core;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
