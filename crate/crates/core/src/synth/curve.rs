//! Word layout along straight, parabolic, and circular baselines.
//!
//! All angles are measured in image coordinates (x right, y down): a
//! placement's `rotation` is the angle of its baseline direction, and
//! [`Point2::rotated`] applies it. Layouts are centered: the curve apex
//! sits at the origin and the word is symmetric around it in arc length.

use rand::Rng;

use crate::geometry::Point2;
use crate::scalar::{real, Real};
use crate::synth::SynthError;

/// Interval the parabola coefficient is drawn from on the negative side.
pub const ALPHA_NEG: (f64, f64) = (-0.50, -0.45);
/// Interval the parabola coefficient is drawn from on the positive side.
pub const ALPHA_POS: (f64, f64) = (0.50, 0.55);

/// Which way a circular baseline bends, in screen terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Concavity {
    /// Valley: the middle of the word dips below its ends.
    Up,
    /// Arch: the middle of the word rises above its ends.
    Down,
}

/// Baseline shape tag, mirroring the `kind` field of the JSON annotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Straight,
    Parabola,
    Circle,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Straight => "straight",
            CurveKind::Parabola => "parabola",
            CurveKind::Circle => "circle",
        }
    }
}

/// Baseline shape for one rendered word.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveSpec<T> {
    Straight,
    /// `y = alpha * x_hat^2` in normalized coordinates: `x_hat` rescales
    /// char centers so the outermost sit at ±1, and `y` is scaled back by
    /// the same factor. Positive `alpha` bows downward on screen (arch
    /// ends), negative upward.
    Parabola { alpha: T },
    /// Characters ride a circular arc subtending `bend_angle` radians over
    /// the word's advance length.
    Circle { bend_angle: T, concavity: Concavity },
}

impl<T: Real> CurveSpec<T> {
    pub fn kind(&self) -> CurveKind {
        match self {
            CurveSpec::Straight => CurveKind::Straight,
            CurveSpec::Parabola { .. } => CurveKind::Parabola,
            CurveSpec::Circle { .. } => CurveKind::Circle,
        }
    }

    /// A sample is curved exactly when its baseline is not straight.
    pub fn is_curved(&self) -> bool {
        self.kind() != CurveKind::Straight
    }

    pub fn cast<U: Real>(&self) -> CurveSpec<U> {
        match *self {
            CurveSpec::Straight => CurveSpec::Straight,
            CurveSpec::Parabola { alpha } => CurveSpec::Parabola {
                alpha: real(alpha.to_f64().expect("finite alpha")),
            },
            CurveSpec::Circle { bend_angle, concavity } => CurveSpec::Circle {
                bend_angle: real(bend_angle.to_f64().expect("finite bend")),
                concavity,
            },
        }
    }
}

/// Draws a parabola coefficient: sign first (fair coin), then magnitude
/// uniform within the chosen side's interval.
pub fn sample_alpha<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random_bool(0.5) {
        rng.random_range(ALPHA_POS.0..ALPHA_POS.1)
    } else {
        rng.random_range(ALPHA_NEG.0..ALPHA_NEG.1)
    }
}

/// One placed character: where its advance box sits and how it is tilted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharPlacement<T> {
    pub ch: char,
    /// Center of the advance box.
    pub center: Point2<T>,
    /// Baseline angle in image coordinates.
    pub rotation: T,
    /// Advance-box corners, top-left, top-right, bottom-right, bottom-left
    /// in the character's own frame.
    pub quad: [Point2<T>; 4],
}

/// Lays out `text` along `curve`.
///
/// `advances[i]` is the horizontal space taken by the i-th character and
/// `char_height` the band height shared by all of them. Character centers
/// are spread by cumulative advances, re-centered so the word's middle is
/// at the curve apex, and normalized so the outermost centers land at the
/// curve parameter ±1; this keeps the stated curve shape independent of
/// word length and font size.
pub fn layout_word<T: Real>(
    text: &str,
    advances: &[T],
    char_height: T,
    curve: &CurveSpec<T>,
) -> Result<Vec<CharPlacement<T>>, SynthError> {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return Err(SynthError::EmptyText);
    }
    assert_eq!(chars.len(), advances.len(), "one advance per character");
    assert!(char_height > T::zero(), "char_height must be positive");

    let half = real::<T>(0.5);
    let total: T = advances.iter().fold(T::zero(), |acc, a| acc + *a);

    // Advance-box centers along the flat baseline, re-centered on 0.
    let mut flat = Vec::with_capacity(chars.len());
    let mut run = T::zero();
    for a in advances {
        flat.push(run + *a * half - total * half);
        run += *a;
    }
    let extent = flat.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));

    let mut out = Vec::with_capacity(chars.len());
    for (i, &ch) in chars.iter().enumerate() {
        let x_hat = if extent > T::zero() { flat[i] / extent } else { T::zero() };
        let (center, rotation) = match *curve {
            CurveSpec::Straight => (Point2::new(flat[i], T::zero()), T::zero()),
            CurveSpec::Parabola { alpha } => {
                let y = alpha * x_hat * x_hat * extent;
                let rot = (real::<T>(2.0) * alpha * x_hat).atan();
                (Point2::new(flat[i], y), rot)
            }
            CurveSpec::Circle { bend_angle, concavity } => {
                let radius = total / bend_angle;
                let phi = x_hat * bend_angle * half;
                let sign = match concavity {
                    Concavity::Down => T::one(),
                    Concavity::Up => -T::one(),
                };
                // Apex at the origin; the circle center sits at (0, sign*R).
                let center = Point2::new(radius * phi.sin(), sign * radius * (T::one() - phi.cos()));
                (center, sign * phi)
            }
        };
        let hw = advances[i] * half;
        let hh = char_height * half;
        let local = [
            Point2::new(-hw, -hh),
            Point2::new(hw, -hh),
            Point2::new(hw, hh),
            Point2::new(-hw, hh),
        ];
        let quad = local.map(|p| center + p.rotated(rotation));
        out.push(CharPlacement { ch, center, rotation, quad });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn straight_layout_spreads_centers_by_advances() {
        let adv = [2.0, 4.0, 2.0];
        let placed = layout_word("abc", &adv, 3.0, &CurveSpec::Straight).unwrap();
        // Total 8, centered: centers at -3, 0, 3 on y = 0.
        assert_relative_eq!(placed[0].center.x, -3.0);
        assert_relative_eq!(placed[1].center.x, 0.0);
        assert_relative_eq!(placed[2].center.x, 3.0);
        for p in &placed {
            assert_eq!(p.rotation, 0.0);
            assert_relative_eq!(p.center.y, 0.0);
        }
        // Quad of the middle char: 4 wide, 3 tall around (0,0).
        assert_eq!(placed[1].quad[0], Point2::new(-2.0, -1.5));
        assert_eq!(placed[1].quad[2], Point2::new(2.0, 1.5));
    }

    #[test]
    fn parabola_example_five_equal_chars() {
        // alpha = 0.5, five equal advances: normalized centers at
        // -1, -1/2, 0, 1/2, 1; rotations atan(2 * 0.5 * x_hat).
        let adv = [10.0; 5];
        let placed = layout_word("abcde", &adv, 12.0, &CurveSpec::Parabola { alpha: 0.5 }).unwrap();
        let rots: Vec<f64> = placed.iter().map(|p| p.rotation).collect();
        assert_relative_eq!(rots[0], (-1.0f64).atan(), epsilon = 1e-12);
        assert_relative_eq!(rots[1], (-0.5f64).atan(), epsilon = 1e-12);
        assert_relative_eq!(rots[2], 0.0, epsilon = 1e-12);
        assert_relative_eq!(rots[3], 0.5f64.atan(), epsilon = 1e-12);
        assert_relative_eq!(rots[4], 1.0f64.atan(), epsilon = 1e-12);
        // Outermost centers: x = +-20 (the extent), y = alpha * extent = 10.
        assert_relative_eq!(placed[4].center.x, 20.0, epsilon = 1e-12);
        assert_relative_eq!(placed[4].center.y, 10.0, epsilon = 1e-12);
        assert_relative_eq!(placed[0].center.y, 10.0, epsilon = 1e-12);
        // Middle char sits at the apex.
        assert_relative_eq!(placed[2].center.y, 0.0, epsilon = 1e-12);
        // Negative alpha mirrors vertically.
        let up = layout_word("abcde", &adv, 12.0, &CurveSpec::Parabola { alpha: -0.5 }).unwrap();
        assert_relative_eq!(up[0].center.y, -10.0, epsilon = 1e-12);
    }

    #[test]
    fn circle_example_half_turn() {
        // Four equal advances over a half-turn: rotation steps are exactly
        // pi/3 and every center is at distance R from the circle center.
        let adv = [1.0; 4];
        let bend = std::f64::consts::PI;
        let spec = CurveSpec::Circle { bend_angle: bend, concavity: Concavity::Down };
        let placed = layout_word("abcd", &adv, 1.0, &spec).unwrap();
        for w in placed.windows(2) {
            assert_relative_eq!(w[1].rotation - w[0].rotation, bend / 3.0, epsilon = 1e-12);
        }
        let radius = 4.0 / bend;
        let circle_center = Point2::new(0.0, radius);
        for p in &placed {
            assert_relative_eq!(p.center.distance(circle_center), radius, epsilon = 1e-12);
        }
        // Down = arch: outer characters sit lower (larger y) than the apex.
        assert!(placed[0].center.y > 0.0);

        let up = CurveSpec::Circle { bend_angle: bend, concavity: Concavity::Up };
        let placed_up = layout_word("abcd", &adv, 1.0, &up).unwrap();
        assert!(placed_up[0].center.y < 0.0);
        for (d, u) in placed.iter().zip(&placed_up) {
            assert_relative_eq!(d.center.y, -u.center.y, epsilon = 1e-12);
            assert_relative_eq!(d.rotation, -u.rotation, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_text_is_an_error() {
        assert!(matches!(
            layout_word::<f64>("", &[], 10.0, &CurveSpec::Straight),
            Err(SynthError::EmptyText)
        ));
    }

    #[test]
    fn single_char_sits_at_apex_unrotated() {
        let spec = CurveSpec::Circle { bend_angle: 1.0, concavity: Concavity::Down };
        let placed = layout_word("x", &[8.0], 10.0, &spec).unwrap();
        assert_eq!(placed.len(), 1);
        assert_eq!(placed[0].center, Point2::new(0.0, 0.0));
        assert_eq!(placed[0].rotation, 0.0);
    }

    #[test]
    fn alpha_sampler_covers_both_intervals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut pos = 0usize;
        for _ in 0..n {
            let a = sample_alpha(&mut rng);
            assert!(
                (ALPHA_NEG.0..ALPHA_NEG.1).contains(&a) || (ALPHA_POS.0..ALPHA_POS.1).contains(&a),
                "alpha {a} outside both intervals"
            );
            if a > 0.0 {
                pos += 1;
            }
            sum += a;
        }
        // Interval midpoints are -0.475 and +0.525, so the mean is 0.025.
        assert!((sum / n as f64 - 0.025).abs() < 1e-3);
        let frac = pos as f64 / n as f64;
        assert!((frac - 0.5).abs() < 2e-3, "positive fraction {frac}");
    }

    #[test]
    fn layout_is_generic_over_scalar() {
        let adv = [2.0f32; 3];
        let placed = layout_word("abc", &adv, 4.0f32, &CurveSpec::Parabola { alpha: 0.5f32 }).unwrap();
        assert!((placed[2].rotation - 1.0f32.atan()).abs() < 1e-6);
    }
}
