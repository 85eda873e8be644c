use crate::error::{Error, Result};

/// A rectangular grid of real-valued pixels stored row-major.
///
/// Pixels are kept as `f64` even for 8-bit sources so that log-domain
/// processing can run on the same type. Every constructor checks that the
/// dimensions are non-zero, that the buffer length matches and that every
/// pixel is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::arg(format!("image dimensions must be positive, got {rows}x{cols}")));
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::arg(format!("image dimensions {rows}x{cols} overflow")))?;
        if pixels.len() != expected {
            return Err(Error::arg(format!(
                "pixel buffer has {} values, expected {rows}x{cols} = {expected}",
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|p| !p.is_finite()) {
            return Err(Error::arg(format!(
                "pixel at row {}, col {} is not finite ({})",
                i / cols,
                i % cols,
                pixels[i]
            )));
        }
        Ok(Self { rows, cols, pixels })
    }

    /// Image with every pixel set to `value`.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows.saturating_mul(cols)])
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(rows.saturating_mul(cols));
        for r in 0..rows {
            for c in 0..cols {
                pixels.push(f(r, c));
            }
        }
        Self::new(rows, cols, pixels)
    }

    /// Builds an image from nested rows; all rows must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::arg("ragged rows"));
        }
        let pixels = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, pixels)
    }

    pub fn from_u8(rows: usize, cols: usize, data: &[u8]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&b| f64::from(b)).collect())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    /// Always false; images have at least one pixel.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.pixels[r * self.cols..(r + 1) * self.cols]
    }

    pub fn same_dims(&self, other: &GrayImage) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub(crate) fn ensure_same_dims(&self, other: &GrayImage) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::arg(format!(
                "dimension mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )))
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.pixels
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)))
    }

    /// Applies `f` to every pixel. The caller guarantees `f` keeps pixels finite.
    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> GrayImage {
        let pixels: Vec<f64> = self.pixels.iter().map(|&p| f(p)).collect();
        debug_assert!(pixels.iter().all(|p| p.is_finite()));
        GrayImage { rows: self.rows, cols: self.cols, pixels }
    }

    /// Wraps a buffer produced internally from an image of the same shape.
    pub(crate) fn with_pixels(&self, pixels: Vec<f64>) -> GrayImage {
        debug_assert_eq!(pixels.len(), self.pixels.len());
        GrayImage { rows: self.rows, cols: self.cols, pixels }
    }

    /// Checks that every pixel is an integer in `[0, 255]`.
    pub fn check_u8(&self) -> Result<()> {
        match self.pixels.iter().position(|&p| !(0.0..=255.0).contains(&p) || p.fract() != 0.0) {
            None => Ok(()),
            Some(i) => Err(Error::Range { row: i / self.cols, col: i % self.cols, value: self.pixels[i] }),
        }
    }

    /// Converts to bytes, failing on the first non 8-bit pixel.
    pub fn to_u8(&self) -> Result<Vec<u8>> {
        self.check_u8()?;
        Ok(self.pixels.iter().map(|&p| p as u8).collect())
    }
}

/// Rounding and clamping rule used whenever real pixels go back to 8 bits.
///
/// Rounding is to the nearest integer with ties away from zero
/// (`f64::round`), then the result is clamped to `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelDepthPolicy {
    pub min: f64,
    pub max: f64,
}

impl PixelDepthPolicy {
    pub const EIGHT_BIT: PixelDepthPolicy = PixelDepthPolicy { min: 0.0, max: 255.0 };

    #[inline]
    pub fn quantize_value(&self, x: f64) -> f64 {
        x.round().clamp(self.min, self.max)
    }
}

impl Default for PixelDepthPolicy {
    fn default() -> Self {
        Self::EIGHT_BIT
    }
}

pub fn quantize(img: &GrayImage, policy: PixelDepthPolicy) -> GrayImage {
    img.map(|p| policy.quantize_value(p))
}
