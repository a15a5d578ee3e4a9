//! Core library for the `textforge` toolkit: synthetic curved scene-text
//! generation, thin-plate-spline and strip-based rectification, recognizer
//! preprocessing, dataset plumbing, and evaluation arithmetic.
//!
//! Geometry and layout code is generic over the floating-point scalar via
//! [`scalar::Real`]; the `*D` aliases below fix `f64`, which is what the
//! pipelines and file formats use.

pub mod geometry;
pub mod preprocess;
pub mod raster;
pub mod scalar;
pub mod snake;

pub use geometry::{canonical_fiducials, resample_chain, ControlPolygon, GeometryError, GridSpec, Point2};
pub use raster::{ncc, Raster, RasterError};
pub use scalar::Real;

/// `f64` point, the default working precision.
pub type Point2d = geometry::Point2<f64>;
/// `f64` control polygon.
pub type ControlPolygonD = geometry::ControlPolygon<f64>;
/// `f64` grid specification.
pub type GridSpecD = geometry::GridSpec<f64>;
/// `f64` thin-plate-spline warp.
pub type TpsWarpD = geometry::tps::TpsWarp<f64>;
