//! Scalar abstraction over the floating-point type.
//!
//! Every matrix, state and channel in this crate is generic over a [`Real`]
//! scalar so the same code runs at `f32` or `f64` precision. The concrete
//! aliases at the crate root fix `f64`, which is what the CLI and the
//! validation tolerances in [`crate::tol`] are calibrated for.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Convert an `f64` constant (tolerance, grid spacing, ...) into `Self`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    /// Widen to `f64` for diagnostics and formatted output.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
