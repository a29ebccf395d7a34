//! Centralized validation tolerances.
//!
//! All thresholds are stated for `f64`; generic code converts them with
//! [`crate::Real::of`]. Matrices here never exceed 8x8, so double-precision
//! round-off stays orders of magnitude below every bound.

/// Max entrywise |A - A^dag| accepted for a density operator.
pub const HERMITICITY: f64 = 1e-10;

/// Max |tr(rho) - 1| accepted for a density operator.
pub const UNIT_TRACE: f64 = 1e-10;

/// Eigenvalue floor for positive semidefiniteness of a density operator.
pub const PSD_FLOOR: f64 = -1e-9;

/// Max |norm - 1| accepted for a pure-state amplitude vector.
pub const STATE_NORM: f64 = 1e-10;

/// Hermiticity slack accepted on eigensolver inputs.
pub const HERMITIAN_INPUT: f64 = 1e-8;

/// Round-off window within which the damping parameter p is clamped to [0, 1].
pub const PROB_CLAMP: f64 = 1e-12;

/// Max entrywise deviation of M1^dag M1 + M2^dag M2 from the identity.
pub const KRAUS_COMPLETENESS: f64 = 1e-10;

/// Max entrywise deviation of U^dag U from the identity.
pub const DILATION_UNITARITY: f64 = 1e-10;

/// Max |tr(choi) - 2| for the Choi matrix of a trace-preserving qubit map.
pub const CHOI_TRACE: f64 = 1e-9;

/// Choi eigenvalue floor below which an intermediate map counts as non-CP.
pub const CP_FLOOR: f64 = -1e-9;

/// |bracket| below which the decay rate is reported as a pole (p = 1 there).
pub const POLE_BRACKET: f64 = 1e-12;

/// Amplitude magnitude tolerated on excited environment components.
pub const ENV_GROUND: f64 = 1e-12;

/// Eigenvalue floor for POVM element positivity.
pub const POVM_PSD_FLOOR: f64 = -1e-10;

/// Max entrywise deviation of a POVM sum from the identity.
pub const POVM_COMPLETENESS: f64 = 1e-9;

/// Negative eigenvalues above this magnitude are clamped to zero before
/// entropy evaluation; log of a tiny negative is the dominant hazard.
pub const ENTROPY_CLAMP: f64 = 1e-9;

/// Window within which entropies and entanglement values are clamped into
/// their unit range.
pub const INFO_CLAMP: f64 = 1e-9;

/// Minimal increase of entanglement between grid points counted as growth.
pub const RISE: f64 = 1e-10;

/// Max deviation from uniform spacing accepted on a time grid.
pub const GRID_UNIFORMITY: f64 = 1e-12;
