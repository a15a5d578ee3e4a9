//! Planar geometry primitives: points, control polygons, rectification
//! grids, and arc-length resampling.
//!
//! A curved text instance is annotated by a [`ControlPolygon`]: ten points
//! along the top edge of the text band and ten along the bottom, with
//! `top[i]` and `bottom[i]` in correspondence. The same twenty points in
//! canonical (rectified) layout are produced by [`canonical_fiducials`].

pub mod tps;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{real, Real};

/// Number of points per chain (top or bottom) of a control polygon.
pub const CHAIN_LEN: usize = 10;
/// Total number of fiducial points in a control polygon.
pub const NUM_FIDUCIALS: usize = 2 * CHAIN_LEN;

/// Errors from geometric construction and solving.
#[derive(Debug, Error)]
pub enum GeometryError {
    /// The interpolation system has no unique solution (duplicate or
    /// collinear target fiducials).
    #[error("thin-plate system is numerically singular")]
    SingularSystem,
    /// A polyline with zero total length cannot be resampled.
    #[error("polyline has zero total arc length")]
    DegenerateChain,
    /// Control polygon construction rejected the input.
    #[error("invalid control polygon: {0}")]
    InvalidPolygon(&'static str),
    /// Grid specification rejected the input.
    #[error("invalid grid spec: {0}")]
    InvalidGrid(&'static str),
}

/// A point in the plane. Image coordinates put `x` along columns and `y`
/// along rows, with `y` growing downward.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Self { x: T::zero(), y: T::zero() }
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Counter-clockwise rotation in a y-up frame; in image coordinates
    /// (y down) the same matrix turns clockwise on screen.
    #[inline]
    pub fn rotated(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c * self.x - s * self.y, y: s * self.x + c * self.y }
    }

    #[inline]
    pub fn lerp(self, other: Self, t: T) -> Self {
        self + (other - self) * t
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Casts both coordinates through `f64` into another scalar type.
    pub fn cast<U: Real>(self) -> Point2<U> {
        Point2 {
            x: real(self.x.to_f64().expect("finite coordinate")),
            y: real(self.y.to_f64().expect("finite coordinate")),
        }
    }
}

impl<T: Real> std::ops::Add for Point2<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self { x: self.x + rhs.x, y: self.y + rhs.y }
    }
}

impl<T: Real> std::ops::Sub for Point2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self { x: self.x - rhs.x, y: self.y - rhs.y }
    }
}

impl<T: Real> std::ops::Mul<T> for Point2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: T) -> Self {
        Self { x: self.x * rhs, y: self.y * rhs }
    }
}

impl<T: Real> std::ops::Neg for Point2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { x: -self.x, y: -self.y }
    }
}

/// Twenty-point annotation of a curved text band: ten points along the top
/// edge and ten along the bottom, `top[i]` corresponding to `bottom[i]`.
///
/// Construction only checks counts and finiteness; real annotations are
/// imprecise, so stronger shape checks are offered separately through
/// [`ControlPolygon::is_well_formed`].
#[derive(Clone, Debug, PartialEq)]
pub struct ControlPolygon<T> {
    top: [Point2<T>; CHAIN_LEN],
    bottom: [Point2<T>; CHAIN_LEN],
}

impl<T: Real> ControlPolygon<T> {
    pub fn new(
        top: [Point2<T>; CHAIN_LEN],
        bottom: [Point2<T>; CHAIN_LEN],
    ) -> Result<Self, GeometryError> {
        if top.iter().chain(bottom.iter()).any(|p| !p.is_finite()) {
            return Err(GeometryError::InvalidPolygon("non-finite coordinate"));
        }
        Ok(Self { top, bottom })
    }

    /// Builds from slices, checking that each chain has exactly ten points.
    pub fn from_chains(top: &[Point2<T>], bottom: &[Point2<T>]) -> Result<Self, GeometryError> {
        if top.len() != CHAIN_LEN || bottom.len() != CHAIN_LEN {
            return Err(GeometryError::InvalidPolygon("each chain needs exactly 10 points"));
        }
        let top: [Point2<T>; CHAIN_LEN] = top.try_into().unwrap();
        let bottom: [Point2<T>; CHAIN_LEN] = bottom.try_into().unwrap();
        Self::new(top, bottom)
    }

    #[inline]
    pub fn top(&self) -> &[Point2<T>; CHAIN_LEN] {
        &self.top
    }

    #[inline]
    pub fn bottom(&self) -> &[Point2<T>; CHAIN_LEN] {
        &self.bottom
    }

    /// All twenty fiducials, top chain first, both left to right.
    pub fn fiducials(&self) -> [Point2<T>; NUM_FIDUCIALS] {
        let mut out = [Point2::zero(); NUM_FIDUCIALS];
        out[..CHAIN_LEN].copy_from_slice(&self.top);
        out[CHAIN_LEN..].copy_from_slice(&self.bottom);
        out
    }

    /// Applies a point transform to every fiducial.
    pub fn map<U: Real>(&self, mut f: impl FnMut(Point2<T>) -> Point2<U>) -> ControlPolygon<U> {
        ControlPolygon {
            top: self.top.map(&mut f),
            bottom: self.bottom.map(&mut f),
        }
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bounding_box(&self) -> (Point2<T>, Point2<T>) {
        let mut lo = self.top[0];
        let mut hi = self.top[0];
        for p in self.fiducials() {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// True when no two correspondence segments `top[i]..bottom[i]` cross.
    ///
    /// Crossing rungs indicate a mis-ordered or self-intersecting
    /// annotation; rectifying such a polygon folds the image onto itself.
    pub fn is_well_formed(&self) -> bool {
        for i in 0..CHAIN_LEN {
            for j in (i + 1)..CHAIN_LEN {
                if segments_cross(self.top[i], self.bottom[i], self.top[j], self.bottom[j]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Strict (proper) segment intersection: the open segments share a point.
fn segments_cross<T: Real>(a1: Point2<T>, a2: Point2<T>, b1: Point2<T>, b2: Point2<T>) -> bool {
    let orient = |p: Point2<T>, q: Point2<T>, r: Point2<T>| -> T {
        (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
    };
    let d1 = orient(a1, a2, b1);
    let d2 = orient(a1, a2, b2);
    let d3 = orient(b1, b2, a1);
    let d4 = orient(b1, b2, a2);
    let z = T::zero();
    ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z))
}

/// Output raster layout for rectification: band dimensions plus the
/// normalized margin the canonical fiducials are inset by.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    pub out_height: usize,
    pub out_width: usize,
    pub margin_x: T,
    pub margin_y: T,
}

impl<T: Real> GridSpec<T> {
    pub fn new(
        out_height: usize,
        out_width: usize,
        margin_x: T,
        margin_y: T,
    ) -> Result<Self, GeometryError> {
        if out_height < 2 || out_width < 2 {
            return Err(GeometryError::InvalidGrid("output must be at least 2x2"));
        }
        let zero = T::zero();
        let half = real::<T>(0.5);
        if !(margin_x >= zero && margin_x < half && margin_y >= zero && margin_y < half) {
            return Err(GeometryError::InvalidGrid("margins must lie in [0, 0.5)"));
        }
        Ok(Self { out_height, out_width, margin_x, margin_y })
    }
}

impl<T: Real> Default for GridSpec<T> {
    /// The recognizer input band: 64x256 with a 5% fiducial inset.
    fn default() -> Self {
        Self {
            out_height: 64,
            out_width: 256,
            margin_x: real(0.05),
            margin_y: real(0.05),
        }
    }
}

/// Canonical fiducial layout in normalized `[0,1]^2` coordinates of the
/// output band: ten points evenly spaced along `y = margin_y` and ten along
/// `y = 1 - margin_y`, both running `x = margin_x ..= 1 - margin_x`.
pub fn canonical_fiducials<T: Real>(spec: &GridSpec<T>) -> ControlPolygon<T> {
    let one = T::one();
    let step = (one - spec.margin_x - spec.margin_x) / real::<T>((CHAIN_LEN - 1) as f64);
    let mut top = [Point2::zero(); CHAIN_LEN];
    let mut bottom = [Point2::zero(); CHAIN_LEN];
    for i in 0..CHAIN_LEN {
        let x = spec.margin_x + step * real::<T>(i as f64);
        top[i] = Point2::new(x, spec.margin_y);
        bottom[i] = Point2::new(x, one - spec.margin_y);
    }
    ControlPolygon { top, bottom }
}

/// Resamples a polyline to `n` points at equal arc-length spacing along the
/// input, keeping both endpoints exactly.
///
/// Returns [`GeometryError::DegenerateChain`] when the polyline has zero
/// total length.
pub fn resample_chain<T: Real>(points: &[Point2<T>], n: usize) -> Result<Vec<Point2<T>>, GeometryError> {
    assert!(points.len() >= 2, "resample_chain needs at least two input points");
    assert!(n >= 2, "resample_chain needs at least two output points");

    let mut cum = Vec::with_capacity(points.len());
    cum.push(T::zero());
    let mut total = T::zero();
    for w in points.windows(2) {
        total = total + w[0].distance(w[1]);
        cum.push(total);
    }
    if !(total > T::zero()) || !total.is_finite() {
        return Err(GeometryError::DegenerateChain);
    }

    let mut out = Vec::with_capacity(n);
    out.push(points[0]);
    let mut seg = 0usize;
    for k in 1..(n - 1) {
        let target = total * real::<T>(k as f64) / real::<T>((n - 1) as f64);
        while seg + 2 < points.len() && cum[seg + 1] < target {
            seg += 1;
        }
        let seg_len = cum[seg + 1] - cum[seg];
        let t = if seg_len > T::zero() { (target - cum[seg]) / seg_len } else { T::zero() };
        out.push(points[seg].lerp(points[seg + 1], t));
    }
    out.push(points[points.len() - 1]);
    Ok(out)
}

/// Total length of a polyline.
pub fn polyline_length<T: Real>(points: &[Point2<T>]) -> T {
    points.windows(2).fold(T::zero(), |acc, w| acc + w[0].distance(w[1]))
}
