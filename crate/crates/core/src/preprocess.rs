//! Recognizer input preprocessing: fixed-size resize, intensity
//! normalization, aspect-preserving squarization, right-angle rotations for
//! orientation augmentation, and half resolution downsampling.

use rand::Rng;
use thiserror::Error;

use crate::geometry::{ControlPolygon, Point2};
use crate::raster::Raster;
use crate::scalar::{real, Real};

/// Height of the fixed recognizer input band.
pub const FIXED_HEIGHT: usize = 64;
/// Width of the fixed recognizer input band.
pub const FIXED_WIDTH: usize = 256;
/// Grey level used for padding and as the normalization midpoint.
pub const PAD_GREY: u8 = 128;

#[derive(Debug, Error)]
pub enum PreprocessError {
    /// Rotation with annotation transfer is defined on squarized inputs.
    #[error("operation requires a square input, got {height}x{width}")]
    NonSquareInput { height: usize, width: usize },
    /// Augmentation policy with impossible probabilities.
    #[error("invalid augment policy: {0}")]
    InvalidPolicy(&'static str),
}

/// Resizes to the fixed recognizer band, distorting aspect ratio.
pub fn fixed_resize(img: &Raster) -> Raster {
    img.resize_bilinear(FIXED_HEIGHT, FIXED_WIDTH)
}

/// Floating-point image produced by [`normalize`]; values live in
/// `[-1, 127/128]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedRaster<T> {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Real> NormalizedRaster<T> {
    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, ch: usize) -> T {
        self.data[(row * self.width + col) * self.channels + ch]
    }

    /// Inverts [`normalize`]; exact for every 8-bit value because the
    /// forward map is a dyadic rational.
    pub fn to_raster(&self) -> Raster {
        let mut out = Raster::zeros(self.height, self.width, self.channels);
        let scale = real::<T>(128.0);
        for (slot, v) in out.data_mut().iter_mut().zip(&self.data) {
            let raw = (*v * scale + scale).round();
            *slot = raw.to_f64().unwrap_or(0.0).clamp(0.0, 255.0) as u8;
        }
        out
    }
}

/// Maps 8-bit intensities to `(v - 128) / 128`, the recognizer's input
/// range: 0 becomes -1.0 and 255 becomes 127/128.
pub fn normalize<T: Real>(img: &Raster) -> NormalizedRaster<T> {
    let inv = T::one() / real::<T>(128.0);
    let mid = real::<T>(128.0);
    let data = img
        .data()
        .iter()
        .map(|&v| (real::<T>(v as f64) - mid) * inv)
        .collect();
    NormalizedRaster {
        height: img.height(),
        width: img.width(),
        channels: img.channels(),
        data,
    }
}

/// Where squarized content landed: `point_out = point_in * scale + offset`.
///
/// `scale` is the nominal uniform factor `side / max(h, w)`; because content
/// dimensions round to whole pixels, mapped points can differ from the
/// pasted content box by up to half a pixel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement {
    pub scale: f64,
    pub offset_x: f64,
    pub offset_y: f64,
}

impl Placement {
    #[inline]
    pub fn map_point(&self, p: Point2<f64>) -> Point2<f64> {
        Point2::new(p.x * self.scale + self.offset_x, p.y * self.scale + self.offset_y)
    }

    pub fn map_polygon(&self, poly: &ControlPolygon<f64>) -> ControlPolygon<f64> {
        poly.map(|p| self.map_point(p))
    }
}

/// Scales the image so its longer side equals `side`, pastes it centered on
/// a `side x side` grey canvas, and reports the placement. When padding is
/// odd the extra pixel goes to the bottom/right.
pub fn squarize(img: &Raster, side: usize) -> (Raster, Placement) {
    assert!(side >= 1, "side must be positive");
    let scale = side as f64 / img.height().max(img.width()) as f64;
    let content_h = ((img.height() as f64 * scale).round() as usize).clamp(1, side);
    let content_w = ((img.width() as f64 * scale).round() as usize).clamp(1, side);
    let content = img.resize_bilinear(content_h, content_w);

    let top = (side - content_h) / 2;
    let left = (side - content_w) / 2;
    let mut out = Raster::filled(side, side, img.channels(), PAD_GREY);
    for r in 0..content_h {
        for c in 0..content_w {
            for ch in 0..img.channels() {
                out.set(top + r, left + c, ch, content.get(r, c, ch));
            }
        }
    }
    (out, Placement { scale, offset_x: left as f64, offset_y: top as f64 })
}

/// Rotates by `k` quarter turns counter-clockwise (in the usual y-up sense;
/// on screen, with y down, content turns clockwise). Output dimensions swap
/// for odd `k`.
pub fn rotate_k90(img: &Raster, k: u8) -> Raster {
    let (h, w) = (img.height(), img.width());
    match k % 4 {
        0 => img.clone(),
        1 => Raster::from_fn(w, h, img.channels(), |r, c, ch| img.get(c, w - 1 - r, ch)),
        2 => Raster::from_fn(h, w, img.channels(), |r, c, ch| img.get(h - 1 - r, w - 1 - c, ch)),
        _ => Raster::from_fn(w, h, img.channels(), |r, c, ch| img.get(h - 1 - c, r, ch)),
    }
}

/// Continuous-coordinate version of [`rotate_k90`] for an `h x w` image:
/// maps a point of the input onto the rotated canvas.
pub fn rotate_point_k90<T: Real>(p: Point2<T>, k: u8, height: usize, width: usize) -> Point2<T> {
    let h = real::<T>(height as f64);
    let w = real::<T>(width as f64);
    match k % 4 {
        0 => p,
        1 => Point2::new(p.y, w - p.x),
        2 => Point2::new(w - p.x, h - p.y),
        _ => Point2::new(h - p.y, p.x),
    }
}

/// How often each quarter-turn rotation is applied during training
/// augmentation; the remaining mass keeps the image upright.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AugmentPolicy {
    /// Probability of each of the three non-trivial rotations.
    pub rotate_prob: f64,
}

impl AugmentPolicy {
    pub fn new(rotate_prob: f64) -> Result<Self, PreprocessError> {
        if !(0.0..=1.0 / 3.0).contains(&rotate_prob) {
            return Err(PreprocessError::InvalidPolicy("per-rotation probability must lie in [0, 1/3]"));
        }
        Ok(Self { rotate_prob })
    }
}

impl Default for AugmentPolicy {
    fn default() -> Self {
        Self { rotate_prob: 0.05 }
    }
}

/// Draws the rotation count for one sample: `1..=3` each with
/// `policy.rotate_prob`, otherwise `0`.
pub fn sample_rotation<R: Rng + ?Sized>(policy: &AugmentPolicy, rng: &mut R) -> u8 {
    let u: f64 = rng.random();
    let p = policy.rotate_prob;
    if u < p {
        1
    } else if u < 2.0 * p {
        2
    } else if u < 3.0 * p {
        3
    } else {
        0
    }
}

/// Applies orientation augmentation to a squarized sample, rotating the
/// annotation with the pixels. Returns the rotated image, the transferred
/// polygon, and the number of quarter turns applied.
pub fn augment<R: Rng + ?Sized>(
    img: &Raster,
    polygon: Option<&ControlPolygon<f64>>,
    policy: &AugmentPolicy,
    rng: &mut R,
) -> Result<(Raster, Option<ControlPolygon<f64>>, u8), PreprocessError> {
    if img.height() != img.width() {
        return Err(PreprocessError::NonSquareInput { height: img.height(), width: img.width() });
    }
    let k = sample_rotation(policy, rng);
    let rotated = rotate_k90(img, k);
    let poly = polygon.map(|p| p.map(|pt| rotate_point_k90(pt, k, img.height(), img.width())));
    Ok((rotated, poly, k))
}

/// Bilinear downsample to half resolution (`floor` on odd dimensions).
pub fn downsample_half(img: &Raster) -> Raster {
    assert!(img.height() >= 2 && img.width() >= 2, "downsample_half needs at least 2x2");
    img.resize_bilinear(img.height() / 2, img.width() / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalize_endpoints_are_exact() {
        let img = Raster::from_raw(1, 4, 1, vec![0, 128, 255, 64]).unwrap();
        let n = normalize::<f64>(&img);
        assert_eq!(n.get(0, 0, 0), -1.0);
        assert_eq!(n.get(0, 1, 0), 0.0);
        assert_eq!(n.get(0, 2, 0), 0.9921875); // 127/128, exact in binary
        assert_eq!(n.get(0, 3, 0), -0.5);
    }

    #[test]
    fn normalize_round_trips_every_value() {
        let img = Raster::from_raw(16, 16, 1, (0..=255).collect()).unwrap();
        let back = normalize::<f64>(&img).to_raster();
        assert_eq!(back, img);
        let back32 = normalize::<f32>(&img).to_raster();
        assert_eq!(back32, img);
    }

    #[test]
    fn fixed_resize_dimensions() {
        let img = Raster::filled(100, 40, 3, 50);
        let out = fixed_resize(&img);
        assert_eq!((out.height(), out.width(), out.channels()), (64, 256, 3));
    }

    #[test]
    fn squarize_wide_input_pads_rows() {
        // 100x300 at side 256: content 85x256, pads 85 above and 86 below.
        let img = Raster::filled(100, 300, 1, 17);
        let (out, place) = squarize(&img, 256);
        assert_eq!((out.height(), out.width()), (256, 256));
        assert_eq!(place.offset_x, 0.0);
        assert_eq!(place.offset_y, 85.0);
        assert!((place.scale - 256.0 / 300.0).abs() < 1e-12);
        // Row 84 is padding, row 85 is content, row 169 is content, 170 padding.
        assert_eq!(out.get(84, 10, 0), PAD_GREY);
        assert_eq!(out.get(85, 10, 0), 17);
        assert_eq!(out.get(169, 10, 0), 17);
        assert_eq!(out.get(170, 10, 0), PAD_GREY);
    }

    #[test]
    fn squarize_random_sizes_center_and_preserve_aspect() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let h = rng.random_range(1..400usize);
            let w = rng.random_range(1..400usize);
            let side = rng.random_range(8..320usize);
            let img = Raster::filled(h, w, 1, 17);
            let (out, place) = squarize(&img, side);
            assert_eq!((out.height(), out.width()), (side, side));

            // Locate content: every non-pad pixel is 17 (constant source).
            let scale = side as f64 / h.max(w) as f64;
            let ch = ((h as f64 * scale).round() as usize).clamp(1, side);
            let cw = ((w as f64 * scale).round() as usize).clamp(1, side);
            // Within rounding of the exact scale, except when a sliver
            // clamps up to the 1-pixel minimum.
            assert!(ch == 1 || (ch as f64 - h as f64 * scale).abs() <= 0.5 + 1e-9);
            assert!(cw == 1 || (cw as f64 - w as f64 * scale).abs() <= 0.5 + 1e-9);
            let top = place.offset_y as usize;
            let left = place.offset_x as usize;
            // Centered within one pixel: pads differ by at most 1.
            assert!(((side - ch) as isize - 2 * top as isize).abs() <= 1);
            assert!(((side - cw) as isize - 2 * left as isize).abs() <= 1);
            // Content box actually holds content, surrounded by padding.
            assert_eq!(out.get(top, left, 0), 17);
            assert_eq!(out.get(top + ch - 1, left + cw - 1, 0), 17);
            if top > 0 {
                assert_eq!(out.get(top - 1, left, 0), PAD_GREY);
            }
            if left + cw < side {
                assert_eq!(out.get(top, left + cw, 0), PAD_GREY);
            }
        }
    }

    #[test]
    fn rotate_single_pixel_traces_corners() {
        // 4x4 with one bright pixel at (row 0, col 1).
        let mut img = Raster::zeros(4, 4, 1);
        img.set(0, 1, 0, 255);
        let find = |im: &Raster| {
            for r in 0..im.height() {
                for c in 0..im.width() {
                    if im.get(r, c, 0) == 255 {
                        return (r, c);
                    }
                }
            }
            panic!("no bright pixel");
        };
        // k=1 (CCW, y-up): out(r,c) = in(c, 3-r); (0,1) lands at (2,0).
        assert_eq!(find(&rotate_k90(&img, 1)), (2, 0));
        assert_eq!(find(&rotate_k90(&img, 2)), (3, 2));
        assert_eq!(find(&rotate_k90(&img, 3)), (1, 3));
        assert_eq!(rotate_k90(&img, 0), img);
        // Four quarter turns compose to the identity.
        let full = rotate_k90(&rotate_k90(&rotate_k90(&rotate_k90(&img, 1), 1), 1), 1);
        assert_eq!(full, img);
    }

    #[test]
    fn rotate_point_tracks_pixels() {
        // The center of pixel (0, 1) is (1.5, 0.5); after k=1 on a 4x4 image
        // it must land on the center of pixel (2, 0).
        let p = Point2::new(1.5f64, 0.5);
        for k in 0..4u8 {
            let rp = rotate_point_k90(p, k, 4, 4);
            let img = {
                let mut im = Raster::zeros(4, 4, 1);
                im.set(0, 1, 0, 255);
                rotate_k90(&im, k)
            };
            let r = (rp.y - 0.5).round() as usize;
            let c = (rp.x - 0.5).round() as usize;
            assert_eq!(img.get(r, c, 0), 255, "k={k}");
        }
    }

    #[test]
    fn rotate_non_square_swaps_dims() {
        let img = Raster::from_fn(2, 5, 1, |r, c, _| (r * 5 + c) as u8);
        let out = rotate_k90(&img, 1);
        assert_eq!((out.height(), out.width()), (5, 2));
        // in (0.5+c, 0.5+r) maps to (y, W-x): pixel (0,4) -> center (4.5,0.5)
        // -> (0.5, 0.5) -> pixel (0,0).
        assert_eq!(out.get(0, 0, 0), img.get(0, 4, 0));
        assert_eq!(rotate_k90(&out, 3), img);
    }

    #[test]
    fn augment_requires_square() {
        let img = Raster::zeros(4, 6, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let res = augment(&img, None, &AugmentPolicy::default(), &mut rng);
        assert!(matches!(res, Err(PreprocessError::NonSquareInput { .. })));
    }

    #[test]
    fn rotation_frequencies_match_policy() {
        let policy = AugmentPolicy::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let mut counts = [0u32; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[sample_rotation(&policy, &mut rng) as usize] += 1;
        }
        for k in 1..4 {
            let f = counts[k] as f64 / n as f64;
            assert!((f - 0.05).abs() < 0.005, "rotation {k} frequency {f}");
        }
        let f0 = counts[0] as f64 / n as f64;
        assert!((f0 - 0.85).abs() < 0.005, "upright frequency {f0}");
    }

    #[test]
    fn policy_rejects_excess_probability() {
        assert!(AugmentPolicy::new(0.4).is_err());
        assert!(AugmentPolicy::new(-0.1).is_err());
        assert!(AugmentPolicy::new(1.0 / 3.0).is_ok());
    }

    #[test]
    fn downsample_checkerboard_averages_to_grey() {
        let img = Raster::from_fn(8, 8, 1, |r, c, _| if (r + c) % 2 == 0 { 0 } else { 255 });
        let out = downsample_half(&img);
        assert_eq!((out.height(), out.width()), (4, 4));
        // Each 2x2 block averages (0+255+255+0)/4 = 127.5, rounded to 128.
        assert!(out.data().iter().all(|&v| v == 128));
    }

    #[test]
    fn downsample_floors_odd_dimensions() {
        let img = Raster::zeros(7, 9, 3);
        let out = downsample_half(&img);
        assert_eq!((out.height(), out.width(), out.channels()), (3, 4, 3));
    }
}
