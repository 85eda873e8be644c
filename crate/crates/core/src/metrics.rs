//! Despeckling assessment parameters.
//!
//! * noise variance: mean of the squared pixel values, `(1/N) Σ u²`
//!   (no mean subtraction)
//! * mean square difference: `(1/N) Σ (u - v)²` between filtered `u` and
//!   original `v`
//! * equivalent number of looks: `(μ/σ)²` averaged over non-overlapping
//!   square tiles
//! * deflection ratio: the standardized residual `(v - v_μ) / v_σ` against a
//!   local window, averaged over the image
//!
//! Standard deviations use the population convention throughout.

use crate::{Error, GrayImage, Result};

pub const DEFAULT_ENL_TILE: usize = 25;
pub const DEFAULT_DR_WINDOW: usize = 3;

pub fn noise_variance(img: &GrayImage) -> f64 {
    img.pixels().iter().map(|u| u * u).sum::<f64>() / img.len() as f64
}

pub fn mean_square_difference(filtered: &GrayImage, original: &GrayImage) -> Result<f64> {
    filtered.ensure_same_dims(original)?;
    let sum: f64 = filtered.pixels().iter().zip(original.pixels()).map(|(u, v)| (u - v) * (u - v)).sum();
    Ok(sum / filtered.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnlEstimate {
    pub enl: f64,
    /// Tiles with non-zero standard deviation that entered the average.
    pub tiles_used: usize,
}

/// Mean `(μ/σ)²` over `tile x tile` blocks anchored at the top-left corner.
///
/// Partial blocks at the right and bottom edges are dropped, as are blocks
/// with zero standard deviation.
pub fn enl_tiled(img: &GrayImage, tile: usize) -> Result<EnlEstimate> {
    if tile == 0 {
        return Err(Error::arg("ENL tile size must be positive"));
    }
    if img.rows() < tile || img.cols() < tile {
        return Err(Error::arg(format!(
            "a {}x{} image holds no complete {tile}x{tile} tile",
            img.rows(),
            img.cols()
        )));
    }
    let n = (tile * tile) as f64;
    let mut total = 0.0;
    let mut used = 0;
    for tr in 0..img.rows() / tile {
        for tc in 0..img.cols() / tile {
            let block = || {
                (tr * tile..(tr + 1) * tile).flat_map(move |r| img.row(r)[tc * tile..(tc + 1) * tile].iter().copied())
            };
            let mean = block().sum::<f64>() / n;
            let var = block().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            if var > 0.0 {
                total += mean * mean / var;
                used += 1;
            }
        }
    }
    if used == 0 {
        return Err(Error::Degenerate("every ENL tile has zero standard deviation".into()));
    }
    Ok(EnlEstimate { enl: total / used as f64, tiles_used: used })
}

/// Mean deflection `(v - v_μ) / v_σ` over interior pixels.
///
/// `v_μ` and `v_σ` come from the `window x window` neighbourhood including the
/// pixel itself. Pixels whose neighbourhood is flat are skipped.
pub fn deflection_ratio(img: &GrayImage, window: usize) -> Result<f64> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::arg(format!("deflection window must be odd, got {window}")));
    }
    if img.rows() < window || img.cols() < window {
        return Err(Error::arg(format!(
            "a {}x{} image is smaller than the {window}x{window} window",
            img.rows(),
            img.cols()
        )));
    }
    let half = window / 2;
    let n = (window * window) as f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for r in half..img.rows() - half {
        for c in half..img.cols() - half {
            let hood = || (r - half..=r + half).flat_map(move |rr| img.row(rr)[c - half..=c + half].iter().copied());
            let mean = hood().sum::<f64>() / n;
            let var = hood().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            if var > 0.0 {
                total += (img.get(r, c) - mean) / var.sqrt();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::Degenerate("every deflection window has zero standard deviation".into()));
    }
    Ok(total / count as f64)
}

/// One row of an assessment table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub filter_name: String,
    pub nv: f64,
    /// Against the noisy input; absent for the unfiltered row.
    pub msd: Option<f64>,
    /// Against the clean reference, when one exists.
    pub msd_clean: Option<f64>,
    /// Absent when no tile qualifies.
    pub enl: Option<f64>,
    pub tiles_used: usize,
    /// Absent when every window is flat.
    pub dr: Option<f64>,
}

impl MetricsReport {
    /// Evaluates all metrics for `img`.
    ///
    /// `original` is the noisy input the filter was run on (pass `None` for
    /// the unfiltered row); `clean` is the speckle-free reference if known.
    /// Degenerate ENL and deflection inputs, and images smaller than one ENL
    /// tile, are reported as absent values.
    pub fn assess(
        filter_name: impl Into<String>,
        img: &GrayImage,
        original: Option<&GrayImage>,
        clean: Option<&GrayImage>,
        enl_tile: usize,
        dr_window: usize,
    ) -> Result<Self> {
        let msd = original.map(|o| mean_square_difference(img, o)).transpose()?;
        let msd_clean = clean.map(|o| mean_square_difference(img, o)).transpose()?;
        let fits_tile = img.rows() >= enl_tile && img.cols() >= enl_tile;
        let (enl, tiles_used) = match enl_tiled(img, enl_tile) {
            Ok(e) => (Some(e.enl), e.tiles_used),
            Err(Error::Degenerate(_)) => (None, 0),
            Err(_) if enl_tile > 0 && !fits_tile => (None, 0),
            Err(e) => return Err(e),
        };
        let dr = match deflection_ratio(img, dr_window) {
            Ok(d) => Some(d),
            Err(Error::Degenerate(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { filter_name: filter_name.into(), nv: noise_variance(img), msd, msd_clean, enl, tiles_used, dr })
    }
}
