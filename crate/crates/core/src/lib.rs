//! Finite-rank deformations of Wigner matrices.

pub mod ensemble;
pub mod error;
pub mod funcalc;
pub mod limitlaw;
pub mod linalg;
pub mod outlier;
pub mod quadrature;
pub mod rng;
pub mod smooth;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
