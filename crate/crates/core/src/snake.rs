//! Strip ("snake") rectification: unrolling a curved text band along its
//! center curve, described by disc centers and radii in the style of
//! region-based curved-text detectors.
//!
//! The unrolled strip samples the input along normals of the center curve:
//! column `j` follows the curve at equal arc-length steps, row `i` walks
//! from one band edge to the other, so the top edge of the band lands on
//! row 0 and the bottom edge on the last row.

use thiserror::Error;

use crate::geometry::{ControlPolygon, Point2, CHAIN_LEN};
use crate::raster::Raster;
use crate::scalar::{real, Real};

#[derive(Debug, Error)]
pub enum SnakeError {
    /// Center chain or radii do not describe a usable band.
    #[error("degenerate snake geometry: {0}")]
    DegenerateGeometry(&'static str),
}

/// A text band as a sequence of discs: center points along the text spine
/// with per-point half-heights (radii). Coordinates are continuous pixel
/// positions with the origin at the image corner.
#[derive(Clone, Debug, PartialEq)]
pub struct SnakeGeometry<T> {
    centers: Vec<Point2<T>>,
    radii: Vec<T>,
}

impl<T: Real> SnakeGeometry<T> {
    pub fn new(centers: Vec<Point2<T>>, radii: Vec<T>) -> Result<Self, SnakeError> {
        if centers.len() != radii.len() {
            return Err(SnakeError::DegenerateGeometry("centers and radii lengths differ"));
        }
        if centers.len() < 2 {
            return Err(SnakeError::DegenerateGeometry("need at least two discs"));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(SnakeError::DegenerateGeometry("non-finite center"));
        }
        if radii.iter().any(|r| !(*r > T::zero()) || !r.is_finite()) {
            return Err(SnakeError::DegenerateGeometry("radii must be positive and finite"));
        }
        let total = crate::geometry::polyline_length(&centers);
        if !(total > T::zero()) {
            return Err(SnakeError::DegenerateGeometry("center chain has zero length"));
        }
        Ok(Self { centers, radii })
    }

    #[inline]
    pub fn centers(&self) -> &[Point2<T>] {
        &self.centers
    }

    #[inline]
    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    /// Arc length of the center polyline.
    pub fn arc_length(&self) -> T {
        crate::geometry::polyline_length(&self.centers)
    }

    /// Mean disc radius (half the typical band height).
    pub fn mean_radius(&self) -> T {
        let sum = self.radii.iter().fold(T::zero(), |acc, r| acc + *r);
        sum / real::<T>(self.radii.len() as f64)
    }
}

/// How wide the unrolled strip should be.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WidthMode {
    /// `round(out_height * arc_length / (2 * mean_radius))`, preserving the
    /// band's aspect ratio.
    AspectPreserving,
    /// Exact output width in pixels.
    Fixed(usize),
}

/// Output layout of the unrolled strip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripSpec {
    pub out_height: usize,
    pub width_mode: WidthMode,
}

impl Default for StripSpec {
    fn default() -> Self {
        Self { out_height: 64, width_mode: WidthMode::AspectPreserving }
    }
}

/// Derives disc geometry from a 20-point control polygon: centers are the
/// midpoints of corresponding top/bottom points, radii half their distance.
pub fn geometry_from_polygon<T: Real>(poly: &ControlPolygon<T>) -> Result<SnakeGeometry<T>, SnakeError> {
    let half = real::<T>(0.5);
    let mut centers = Vec::with_capacity(CHAIN_LEN);
    let mut radii = Vec::with_capacity(CHAIN_LEN);
    for (t, b) in poly.top().iter().zip(poly.bottom()) {
        centers.push((*t + *b) * half);
        radii.push(t.distance(*b) * half);
    }
    SnakeGeometry::new(centers, radii)
}

/// Unrolls the band described by `geo` into an axis-aligned strip.
///
/// Normals point from the side reached first when rotating the tangent by
/// +90 degrees; for text annotated left to right this maps the top edge of
/// the band to row 0. Use [`unroll_from_polygon`] when the polygon is
/// available — it resolves the orientation by majority vote instead of
/// trusting the annotation direction.
pub fn unroll<T: Real>(img: &Raster, geo: &SnakeGeometry<T>, spec: &StripSpec) -> Result<Raster, SnakeError> {
    unroll_oriented(img, geo, spec, false)
}

/// Unrolls via the disc geometry of `poly`, first choosing the normal sign
/// so that the polygon's top chain maps to row 0: each of the ten rungs
/// votes with the side its top point falls on, and the majority wins.
pub fn unroll_from_polygon<T: Real>(
    img: &Raster,
    poly: &ControlPolygon<T>,
    spec: &StripSpec,
) -> Result<Raster, SnakeError> {
    let geo = geometry_from_polygon(poly)?;
    let mut flip_votes = 0usize;
    for i in 0..CHAIN_LEN {
        let t = chain_tangent(&geo.centers, i);
        let n = Point2::new(-t.y, t.x);
        if (poly.top()[i] - geo.centers[i]).dot(n) > T::zero() {
            flip_votes += 1;
        }
    }
    let flip = flip_votes > CHAIN_LEN / 2;
    unroll_oriented(img, &geo, spec, flip)
}

fn unroll_oriented<T: Real>(
    img: &Raster,
    geo: &SnakeGeometry<T>,
    spec: &StripSpec,
    flip: bool,
) -> Result<Raster, SnakeError> {
    let h = spec.out_height;
    assert!(h >= 2, "strip height must be at least 2");
    let w = match spec.width_mode {
        WidthMode::Fixed(w) => {
            assert!(w >= 2, "strip width must be at least 2");
            w
        }
        WidthMode::AspectPreserving => {
            let len = geo.arc_length().to_f64().expect("finite arc length");
            let r = geo.mean_radius().to_f64().expect("finite radius");
            (((h as f64) * len / (2.0 * r)).round() as usize).max(2)
        }
    };

    let (centers, radii) = resample_discs(&geo.centers, &geo.radii, w);
    let sign = if flip { -T::one() } else { T::one() };
    let half = real::<T>(0.5);
    let mut out = Raster::zeros(h, w, img.channels());
    for j in 0..w {
        let t = chain_tangent(&centers, j);
        let n = Point2::new(-t.y, t.x) * sign;
        for i in 0..h {
            // Rows run the full band: s = -1 at the top edge, +1 at the bottom.
            let s = real::<T>(-1.0) + real::<T>(2.0 * i as f64 / (h - 1) as f64);
            let p = centers[j] + n * (s * radii[j]);
            for ch in 0..img.channels() {
                let v = img.sample_bilinear(p.x - half, p.y - half, ch);
                out.set(i, j, ch, v.to_f64().unwrap_or(0.0).round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    Ok(out)
}

/// Resamples centers and radii together at `n` equal arc-length steps.
fn resample_discs<T: Real>(centers: &[Point2<T>], radii: &[T], n: usize) -> (Vec<Point2<T>>, Vec<T>) {
    let mut cum = Vec::with_capacity(centers.len());
    cum.push(T::zero());
    let mut total = T::zero();
    for w in centers.windows(2) {
        total = total + w[0].distance(w[1]);
        cum.push(total);
    }
    let mut out_c = Vec::with_capacity(n);
    let mut out_r = Vec::with_capacity(n);
    let mut seg = 0usize;
    for k in 0..n {
        let target = total * real::<T>(k as f64) / real::<T>((n - 1) as f64);
        while seg + 2 < centers.len() && cum[seg + 1] < target {
            seg += 1;
        }
        let seg_len = cum[seg + 1] - cum[seg];
        let t = if seg_len > T::zero() { (target - cum[seg]) / seg_len } else { T::zero() };
        out_c.push(centers[seg].lerp(centers[seg + 1], t));
        out_r.push(radii[seg] + (radii[seg + 1] - radii[seg]) * t);
    }
    (out_c, out_r)
}

/// Unit tangent at index `i` of a polyline by central differences (one-sided
/// at the ends). Falls back to +x for a degenerate neighborhood.
fn chain_tangent<T: Real>(pts: &[Point2<T>], i: usize) -> Point2<T> {
    let a = if i == 0 { pts[0] } else { pts[i - 1] };
    let b = if i + 1 == pts.len() { pts[i] } else { pts[i + 1] };
    let d = b - a;
    let len = d.norm();
    if len > T::zero() {
        d * (T::one() / len)
    } else {
        Point2::new(T::one(), T::zero())
    }
}
