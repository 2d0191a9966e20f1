//! Numerical toolkit for Bell-type experiments.
//!
//! The quantum kernels (`qmat`, `bellops`, `bohm`) are generic over the
//! floating-point scalar through [`Real`]; the sampling and bookkeeping
//! modules (`hvsim`, `ineq`, `pollsim`) work on `f64` and integer outcomes.

pub mod bellops;
pub mod bohm;
pub mod error;
pub mod hvsim;
pub mod ineq;
pub mod pollsim;
pub mod qmat;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = qmat::ComplexMatrix<f64>;
pub type Matrix32 = qmat::ComplexMatrix<f32>;
pub type State64 = qmat::StateVector<f64>;
pub type State32 = qmat::StateVector<f32>;
pub type Settings64 = bellops::BellSettings<f64>;
pub type Settings32 = bellops::BellSettings<f32>;
