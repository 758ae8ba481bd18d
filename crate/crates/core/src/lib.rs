//! Quantum geometric tensors, quantum Fisher information, and numerical
//! checks of the Cramér-Rao type bounds they satisfy.
//!
//! The numerical core is generic over the floating point type through
//! [`Real`]; the `*64` aliases below fix it to `f64`, which is what the
//! sweeps and the command-line tool use.

pub mod error;
pub mod estimation;
pub mod geometry;
pub mod models;
pub mod numlin;
pub mod qcrb;
pub mod sampling;
pub mod scalar;
pub mod states;
pub mod sweep;
pub mod uncertainty;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat64 = numlin::CMat<f64>;
pub type HermitianMatrix64 = numlin::HermitianMatrix<f64>;
pub type SymMatrix64 = numlin::SymMatrix<f64>;
pub type AntisymMatrix64 = numlin::AntisymMatrix<f64>;
pub type EigenSystem64 = numlin::EigenSystem<f64>;
pub type PureState64 = states::PureState<f64>;
pub type OperatorSet64 = states::OperatorSet<f64>;
pub type GeometricTensor64 = geometry::GeometricTensor<f64>;
pub type BoundReport64 = qcrb::BoundReport<f64>;
pub type TiModel64 = models::TiModel<f64>;
