//! Minimal dense complex linear algebra for dimensions up to 8: Hermitian
//! eigendecomposition, tensor products, partial traces and positivity
//! checks. Everything else in the crate builds on this layer.

mod eig;
mod matrix;
mod state;

pub use eig::{hermitian_eig, min_eigenvalue, Eigen};
pub use matrix::{ComplexMatrix, MAX_DIM};
pub use state::{partial_trace_matrix, trace_distance, DensityOperator, PureState};
