//! Frozen beta-ensembles at the hard edge: inverse covariance matrices built
//! from zeros of classical orthogonal polynomials, their spectral
//! decomposition through dual polynomials, and the Bessel-type limits.

pub mod bessel;
pub mod convergence;
pub mod dualpoly;
pub mod error;
pub mod export;
pub mod frozencov;
pub mod linalg;
pub mod orthopoly;
pub mod quadrature;
pub mod sampler;

pub use error::{Error, Result};
pub use orthopoly::{EnsembleParams, Family, PolyWeight};
