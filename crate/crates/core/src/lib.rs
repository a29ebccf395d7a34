//! Qubit amplitude-damping dynamics and an entanglement-based
//! non-Markovianity quantifier.
//!
//! A system qubit S is correlated with an apparatus qubit A, and A relaxes
//! into an environment E through an amplitude-damping channel driven by a
//! Lorentzian reservoir. The crate computes, along the evolution:
//!
//! * the damping parameter `p(t)` and the time-dependent decay rate
//!   `gamma(t)` in closed form ([`dynamics`]),
//! * entanglement of formation between S and A, and the accessible
//!   information the environment holds about S ([`info`]),
//! * the divisibility of the channel through Choi matrices of intermediate
//!   maps ([`dynamics`]),
//! * a non-Markovianity measure: the summed growth of the S-A entanglement,
//!   maximized over Bloch-parameterized initial states ([`measure`]).
//!
//! All numerics are generic over the scalar type via [`Real`]; the aliases
//! below fix `f64`, which is what the companion CLI uses and what the
//! tolerances in [`tol`] are calibrated for.

pub mod dynamics;
pub mod error;
pub mod info;
pub mod linalg;
pub mod measure;
pub mod scalar;
pub mod tol;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex double-precision scalar.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix at `f64` precision.
pub type Matrix64 = linalg::ComplexMatrix<f64>;
/// Density operator at `f64` precision.
pub type Density64 = linalg::DensityOperator<f64>;
/// Pure state at `f64` precision.
pub type PureState64 = linalg::PureState<f64>;
/// Reservoir specification at `f64` precision.
pub type Bath64 = dynamics::BathSpec<f64>;
/// Channel snapshot at `f64` precision.
pub type Channel64 = dynamics::ChannelPoint<f64>;
/// Sampled trajectory at `f64` precision.
pub type Series64 = measure::TimeSeries<f64>;
/// Non-Markovianity measure result at `f64` precision.
pub type Measure64 = measure::MeasureResult<f64>;
