//! 8-bit raster images in row-major interleaved layout, plus the handful of
//! sampling primitives the pipelines share: bilinear lookup with border
//! clamp, bilinear resize, and normalized cross-correlation.
//!
//! Coordinate convention used everywhere: pixel `(row, col)` covers the unit
//! square centered at continuous coordinates `(col + 0.5, row + 0.5)`. A
//! continuous position in *index space* (where `x = col` hits a pixel center
//! exactly) converts to normalized `[0,1]` coordinates via
//! `u = (x + 0.5) / width` and back via `x = u * width - 0.5`.

use std::path::Path;

use thiserror::Error;

use crate::scalar::{real, Real};

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("raster dimensions do not match buffer: {0}")]
    Dimensions(String),
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    Channels(usize),
    #[error("image file {path}: {source}")]
    Image {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

/// An owned 8-bit image with 1 (grey) or 3 (RGB) interleaved channels.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Raster {
    /// Allocates a raster filled with `fill`.
    pub fn filled(height: usize, width: usize, channels: usize, fill: u8) -> Self {
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        assert!(height > 0 && width > 0, "raster dimensions must be positive");
        Self { height, width, channels, data: vec![fill; height * width * channels] }
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Self::filled(height, width, channels, 0)
    }

    /// Wraps an existing buffer; its length must be `height * width * channels`.
    pub fn from_raw(height: usize, width: usize, channels: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if channels != 1 && channels != 3 {
            return Err(RasterError::Channels(channels));
        }
        if data.len() != height * width * channels || height == 0 || width == 0 {
            return Err(RasterError::Dimensions(format!(
                "{height}x{width}x{channels} vs buffer of {}",
                data.len()
            )));
        }
        Ok(Self { height, width, channels, data })
    }

    /// Builds a raster by evaluating `f(row, col, channel)` per sample.
    pub fn from_fn(height: usize, width: usize, channels: usize, mut f: impl FnMut(usize, usize, usize) -> u8) -> Self {
        let mut out = Self::zeros(height, width, channels);
        for r in 0..height {
            for c in 0..width {
                for ch in 0..channels {
                    let v = f(r, c, ch);
                    out.set(r, c, ch, v);
                }
            }
        }
        out
    }

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
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, ch: usize) -> u8 {
        debug_assert!(row < self.height && col < self.width && ch < self.channels);
        self.data[(row * self.width + col) * self.channels + ch]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, ch: usize, value: u8) {
        debug_assert!(row < self.height && col < self.width && ch < self.channels);
        self.data[(row * self.width + col) * self.channels + ch] = value;
    }

    /// Nearest in-bounds pixel value (border clamp).
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize, ch: usize) -> u8 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.get(r, c, ch)
    }

    /// Bilinear sample at index-space coordinates `(x, y)` where integer
    /// values land on pixel centers. Out-of-range positions clamp to the
    /// border, so the sample is defined on the whole plane.
    pub fn sample_bilinear<T: Real>(&self, x: T, y: T, ch: usize) -> T {
        let x0f = x.floor();
        let y0f = y.floor();
        let fx = x - x0f;
        let fy = y - y0f;
        // `to_isize` saturates badly on NaN; callers pass finite coords.
        let x0 = x0f.to_f64().unwrap_or(0.0) as isize;
        let y0 = y0f.to_f64().unwrap_or(0.0) as isize;
        let v00 = real::<T>(self.get_clamped(y0, x0, ch) as f64);
        let v01 = real::<T>(self.get_clamped(y0, x0 + 1, ch) as f64);
        let v10 = real::<T>(self.get_clamped(y0 + 1, x0, ch) as f64);
        let v11 = real::<T>(self.get_clamped(y0 + 1, x0 + 1, ch) as f64);
        let one = T::one();
        let top = v00 * (one - fx) + v01 * fx;
        let bot = v10 * (one - fx) + v11 * fx;
        top * (one - fy) + bot * fy
    }

    /// Bilinear resize to `out_height x out_width` using half-pixel-center
    /// alignment: output center `(c + 0.5) / out_w` maps to the same
    /// normalized position in the input.
    pub fn resize_bilinear(&self, out_height: usize, out_width: usize) -> Raster {
        assert!(out_height > 0 && out_width > 0);
        let sx = self.width as f64 / out_width as f64;
        let sy = self.height as f64 / out_height as f64;
        Raster::from_fn(out_height, out_width, self.channels, |r, c, ch| {
            let x = (c as f64 + 0.5) * sx - 0.5;
            let y = (r as f64 + 0.5) * sy - 0.5;
            self.sample_bilinear::<f64>(x, y, ch).round().clamp(0.0, 255.0) as u8
        })
    }

    /// Extracts the rectangle `rows x0..x1, y0..y1` (end-exclusive).
    pub fn crop(&self, y0: usize, x0: usize, y1: usize, x1: usize) -> Raster {
        assert!(y0 < y1 && x0 < x1 && y1 <= self.height && x1 <= self.width, "invalid crop window");
        Raster::from_fn(y1 - y0, x1 - x0, self.channels, |r, c, ch| self.get(y0 + r, x0 + c, ch))
    }

    /// Converts grey to RGB by channel replication; RGB passes through.
    pub fn to_rgb(&self) -> Raster {
        if self.channels == 3 {
            return self.clone();
        }
        Raster::from_fn(self.height, self.width, 3, |r, c, _| self.get(r, c, 0))
    }

    /// Converts RGB to grey with the Rec.601 luma weights; grey passes through.
    pub fn to_luma(&self) -> Raster {
        if self.channels == 1 {
            return self.clone();
        }
        Raster::from_fn(self.height, self.width, 1, |r, c, _| {
            let v = 0.299 * self.get(r, c, 0) as f64
                + 0.587 * self.get(r, c, 1) as f64
                + 0.114 * self.get(r, c, 2) as f64;
            v.round().clamp(0.0, 255.0) as u8
        })
    }

    /// Loads a PNG or JPEG. Grey stays single-channel; everything else is
    /// converted to RGB.
    pub fn load(path: &Path) -> Result<Raster, RasterError> {
        let img = image::open(path).map_err(|source| RasterError::Image {
            path: path.display().to_string(),
            source,
        })?;
        let raster = match img {
            image::DynamicImage::ImageLuma8(g) => {
                let (w, h) = (g.width() as usize, g.height() as usize);
                Raster::from_raw(h, w, 1, g.into_raw()).expect("image buffer size")
            }
            other => {
                let rgb = other.to_rgb8();
                let (w, h) = (rgb.width() as usize, rgb.height() as usize);
                Raster::from_raw(h, w, 3, rgb.into_raw()).expect("image buffer size")
            }
        };
        Ok(raster)
    }

    /// Writes the raster as PNG. Encoding carries no timestamps, so equal
    /// pixel content yields byte-identical files.
    pub fn save_png(&self, path: &Path) -> Result<(), RasterError> {
        let mk_err = |source| RasterError::Image { path: path.display().to_string(), source };
        match self.channels {
            1 => image::GrayImage::from_raw(self.width as u32, self.height as u32, self.data.clone())
                .expect("buffer size")
                .save_with_format(path, image::ImageFormat::Png)
                .map_err(mk_err),
            _ => image::RgbImage::from_raw(self.width as u32, self.height as u32, self.data.clone())
                .expect("buffer size")
                .save_with_format(path, image::ImageFormat::Png)
                .map_err(mk_err),
        }
    }
}

/// Normalized cross-correlation between two equal-shape rasters, computed
/// over all samples. Returns 0 when either image has zero variance.
pub fn ncc(a: &Raster, b: &Raster) -> f64 {
    assert_eq!(
        (a.height(), a.width(), a.channels()),
        (b.height(), b.width(), b.channels()),
        "ncc requires equal shapes"
    );
    let n = a.data().len() as f64;
    let mean = |img: &Raster| img.data().iter().map(|&v| v as f64).sum::<f64>() / n;
    let (ma, mb) = (mean(a), mean(b));
    let mut num = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&pa, &pb) in a.data().iter().zip(b.data()) {
        let da = pa as f64 - ma;
        let db = pb as f64 - mb;
        num += da * db;
        va += da * da;
        vb += db * db;
    }
    if va <= 0.0 || vb <= 0.0 {
        return 0.0;
    }
    num / (va.sqrt() * vb.sqrt())
}
