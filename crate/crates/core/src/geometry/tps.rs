//! Thin-plate-spline interpolation between fiducial sets, and backward
//! warping of rasters through the fitted spline.
//!
//! Rectification solves for a map from *canonical* band coordinates to
//! *source image* coordinates (both normalized to `[0,1]^2`), then pulls
//! pixels backward through it, so every output pixel receives a value and
//! no splatting is needed.

use crate::geometry::{canonical_fiducials, ControlPolygon, GeometryError, GridSpec, Point2};
use crate::raster::Raster;
use crate::scalar::{real, Real};

/// Radial kernel `U(r) = r^2 ln(r^2)`, expressed in the squared distance
/// `r2 = r^2` and continuously extended with `U(0) = 0`.
#[inline]
fn kernel<T: Real>(r2: T) -> T {
    if r2 > T::zero() {
        r2 * r2.ln()
    } else {
        T::zero()
    }
}

/// A fitted thin-plate spline `R^2 -> R^2`.
///
/// `map(q) = a0 + a1*q.x + a2*q.y + sum_i w_i U(|q - site_i|)`, with one
/// affine triple and one weight per site for each output coordinate.
#[derive(Clone, Debug)]
pub struct TpsWarp<T> {
    sites: Vec<Point2<T>>,
    /// Per-site kernel weights; `x`/`y` components feed the two outputs.
    weights: Vec<Point2<T>>,
    /// Affine part as rows `[a0, a1, a2]`, one column per output coordinate.
    affine: [Point2<T>; 3],
    lambda: T,
}

impl<T: Real> TpsWarp<T> {
    /// Evaluates the spline at `q`.
    pub fn map(&self, q: Point2<T>) -> Point2<T> {
        let mut out = self.affine[0] + self.affine[1] * q.x + self.affine[2] * q.y;
        for (site, w) in self.sites.iter().zip(&self.weights) {
            let u = kernel((q - *site).norm_sq());
            out = out + *w * u;
        }
        out
    }

    pub fn sites(&self) -> &[Point2<T>] {
        &self.sites
    }

    pub fn weights(&self) -> &[Point2<T>] {
        &self.weights
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Largest magnitude among the six side-condition sums
    /// (`sum w`, `sum w*x`, `sum w*y` for both output coordinates); a
    /// correctly solved system drives these to rounding noise.
    pub fn side_condition_residual(&self) -> T {
        let mut sums = [T::zero(); 6];
        for (site, w) in self.sites.iter().zip(&self.weights) {
            sums[0] += w.x;
            sums[1] += w.x * site.x;
            sums[2] += w.x * site.y;
            sums[3] += w.y;
            sums[4] += w.y * site.x;
            sums[5] += w.y * site.y;
        }
        sums.iter().fold(T::zero(), |acc, s| acc.max(s.abs()))
    }
}

/// Fits the spline interpolating `dst_i -> src_i`.
///
/// `dst` are the interpolation sites (canonical fiducials when rectifying)
/// and `src` the values taken there (the annotated polygon). `lambda >= 0`
/// relaxes exact interpolation by adding `lambda` to the kernel diagonal,
/// trading fiducial fit for smoothness with imprecise annotations.
///
/// Returns [`GeometryError::SingularSystem`] when the sites admit no unique
/// solution, e.g. duplicated or all-collinear `dst` points.
pub fn tps_solve<T: Real>(
    dst: &[Point2<T>],
    src: &[Point2<T>],
    lambda: T,
) -> Result<TpsWarp<T>, GeometryError> {
    assert_eq!(dst.len(), src.len(), "tps_solve needs matching point counts");
    let n = dst.len();
    assert!(n >= 3, "tps_solve needs at least three sites");
    assert!(lambda >= T::zero(), "lambda must be non-negative");

    let dim = n + 3;
    // Augmented system [A | B] with B holding both output coordinates.
    let mut a = vec![T::zero(); dim * dim];
    let mut b = vec![T::zero(); dim * 2];
    for i in 0..n {
        for j in 0..n {
            let mut v = kernel((dst[i] - dst[j]).norm_sq());
            if i == j {
                v += lambda;
            }
            a[i * dim + j] = v;
        }
        a[i * dim + n] = T::one();
        a[i * dim + n + 1] = dst[i].x;
        a[i * dim + n + 2] = dst[i].y;
        a[n * dim + i] = T::one();
        a[(n + 1) * dim + i] = dst[i].x;
        a[(n + 2) * dim + i] = dst[i].y;
        b[i * 2] = src[i].x;
        b[i * 2 + 1] = src[i].y;
    }

    solve_dense(&mut a, &mut b, dim)?;

    let weights = (0..n).map(|i| Point2::new(b[i * 2], b[i * 2 + 1])).collect();
    let affine = [
        Point2::new(b[n * 2], b[n * 2 + 1]),
        Point2::new(b[(n + 1) * 2], b[(n + 1) * 2 + 1]),
        Point2::new(b[(n + 2) * 2], b[(n + 2) * 2 + 1]),
    ];
    Ok(TpsWarp { sites: dst.to_vec(), weights, affine, lambda })
}

/// In-place Gaussian elimination with partial pivoting; `b` holds two
/// right-hand-side columns interleaved and receives the solution.
fn solve_dense<T: Real>(a: &mut [T], b: &mut [T], dim: usize) -> Result<(), GeometryError> {
    let scale = a.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let tol = scale * T::epsilon() * real::<T>((16 * dim) as f64);

    for col in 0..dim {
        // Partial pivot: largest magnitude in this column at or below `col`.
        let mut pivot_row = col;
        let mut pivot_val = a[col * dim + col].abs();
        for r in (col + 1)..dim {
            let v = a[r * dim + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if !(pivot_val > tol) || !pivot_val.is_finite() {
            return Err(GeometryError::SingularSystem);
        }
        if pivot_row != col {
            for c in 0..dim {
                a.swap(col * dim + c, pivot_row * dim + c);
            }
            b.swap(col * 2, pivot_row * 2);
            b.swap(col * 2 + 1, pivot_row * 2 + 1);
        }
        let inv = T::one() / a[col * dim + col];
        for r in (col + 1)..dim {
            let factor = a[r * dim + col] * inv;
            if factor == T::zero() {
                continue;
            }
            for c in col..dim {
                let v = a[col * dim + c] * factor;
                a[r * dim + c] -= v;
            }
            b[r * 2] -= b[col * 2] * factor;
            b[r * 2 + 1] -= b[col * 2 + 1] * factor;
        }
    }

    // Back substitution.
    for col in (0..dim).rev() {
        let inv = T::one() / a[col * dim + col];
        for k in 0..2 {
            let mut acc = b[col * 2 + k];
            for c in (col + 1)..dim {
                acc -= a[col * dim + c] * b[c * 2 + k];
            }
            b[col * 2 + k] = acc * inv;
        }
    }
    Ok(())
}

/// Backward-warps `img` through `warp` onto the output grid of `spec`.
///
/// The warp must map normalized output coordinates (`(col+0.5)/width`,
/// `(row+0.5)/height`) to normalized source coordinates, as produced by
/// [`tps_solve`] on canonical fiducials and a source polygon normalized by
/// the source dimensions. Source lookups are bilinear with border clamp.
pub fn tps_sample<T: Real>(warp: &TpsWarp<T>, img: &Raster, spec: &GridSpec<T>) -> Raster {
    let h = spec.out_height;
    let w = spec.out_width;
    let half = real::<T>(0.5);
    let src_w = real::<T>(img.width() as f64);
    let src_h = real::<T>(img.height() as f64);
    let inv_w = T::one() / real::<T>(w as f64);
    let inv_h = T::one() / real::<T>(h as f64);

    let mut out = Raster::zeros(h, w, img.channels());
    for r in 0..h {
        let v = (real::<T>(r as f64) + half) * inv_h;
        for c in 0..w {
            let u = (real::<T>(c as f64) + half) * inv_w;
            let p = warp.map(Point2::new(u, v));
            let x = p.x * src_w - half;
            let y = p.y * src_h - half;
            for ch in 0..img.channels() {
                let s = img.sample_bilinear(x, y, ch);
                let val = s.to_f64().unwrap_or(0.0).round().clamp(0.0, 255.0) as u8;
                out.set(r, c, ch, val);
            }
        }
    }
    out
}

/// Full rectification of one annotated band: normalizes the pixel-space
/// polygon by the image dimensions, fits the spline against the canonical
/// fiducials of `spec`, and resamples.
pub fn rectify_band<T: Real>(
    img: &Raster,
    polygon: &ControlPolygon<T>,
    spec: &GridSpec<T>,
    lambda: T,
) -> Result<Raster, GeometryError> {
    let inv_w = T::one() / real::<T>(img.width() as f64);
    let inv_h = T::one() / real::<T>(img.height() as f64);
    let normalized = polygon.map(|p| Point2::new(p.x * inv_w, p.y * inv_h));
    let warp = tps_solve(
        &canonical_fiducials(spec).fiducials(),
        &normalized.fiducials(),
        lambda,
    )?;
    Ok(tps_sample(&warp, img, spec))
}
