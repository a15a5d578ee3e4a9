//! Scalar abstraction: the geometry and layout math runs on any IEEE float.

use num_traits::{Float, FromPrimitive, NumAssignOps};

/// Floating-point scalar the core math is generic over: `f32` or `f64`.
///
/// `f64` is the default used by the pipelines and file formats (see the
/// aliases at the crate root); `f32` is available for memory-tight callers.
pub trait Real: Float + FromPrimitive + NumAssignOps + std::fmt::Debug + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for lifting an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}
