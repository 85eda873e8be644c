//! Adaptive local-statistics speckle filters and the median filter.
//!
//! Every filter reads only the input image, visits interior pixels whose
//! full `window x window` neighbourhood lies inside the image and copies the
//! remaining border unchanged. Local statistics include the center pixel and
//! use the population variance.
//!
//! With `m` the window mean, `ci = sqrt(var) / m`, `cu` the noise coefficient
//! of variation and `cmax` the heterogeneity threshold:
//!
//! | filter         | estimate                                                      |
//! |----------------|---------------------------------------------------------------|
//! | Lee            | `m + W (v - m)`, `W = 1 - cu²/ci²`                             |
//! | Kuan           | `m + W (v - m)`, `W = (1 - cu²/ci²) / (1 + cu²)`               |
//! | Frost          | `Σ w v / Σ w`, `w = exp(-D ci² dist)`                          |
//! | enhanced Lee   | `m` / `W m + (1 - W) v`, `W = exp(-D (ci - cu)/(cmax - ci))` / `v` |
//! | enhanced Frost | `m` / `Σ w v / Σ w`, `w = exp(-D (ci - cu)/(cmax - ci) dist)` / `v` |
//! | Gamma MAP      | `m` / positive root of the MAP quadratic / `v`                 |
//!
//! The three-way rules split on `ci <= cu`, `cu < ci < cmax` and `ci >= cmax`.
//! A window whose mean is not positive has no defined `ci` and yields `m`.

use rayon::prelude::*;

use crate::{Error, GrayImage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicFilterConfig {
    window: usize,
    looks: f64,
    damping: f64,
    cu: f64,
    cmax: f64,
}

impl ClassicFilterConfig {
    /// `cu = 1/sqrt(looks)`, `cmax = sqrt(1 + 2/looks)`, damping 1.
    pub fn new(window: usize, looks: f64) -> Result<Self> {
        if window < 3 || window % 2 == 0 {
            return Err(Error::arg(format!("filter window must be odd and at least 3, got {window}")));
        }
        if !(looks.is_finite() && looks > 0.0) {
            return Err(Error::arg(format!("number of looks must be positive, got {looks}")));
        }
        Ok(Self { window, looks, damping: 1.0, cu: 1.0 / looks.sqrt(), cmax: (1.0 + 2.0 / looks).sqrt() })
    }

    pub fn with_damping(mut self, damping: f64) -> Result<Self> {
        if !(damping.is_finite() && damping > 0.0) {
            return Err(Error::arg(format!("damping factor must be positive, got {damping}")));
        }
        self.damping = damping;
        Ok(self)
    }

    /// Overrides the noise coefficient of variation and heterogeneity threshold.
    pub fn with_thresholds(mut self, cu: f64, cmax: f64) -> Result<Self> {
        if !(cu.is_finite() && cu > 0.0 && cmax.is_finite() && cmax > cu) {
            return Err(Error::arg(format!("need 0 < cu < cmax, got cu={cu}, cmax={cmax}")));
        }
        self.cu = cu;
        self.cmax = cmax;
        Ok(self)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn looks(&self) -> f64 {
        self.looks
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn cu(&self) -> f64 {
        self.cu
    }

    pub fn cmax(&self) -> f64 {
        self.cmax
    }
}

impl Default for ClassicFilterConfig {
    fn default() -> Self {
        Self::new(3, 1.0).expect("valid defaults")
    }
}

/// Mean and population variance of one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalStats {
    pub mean: f64,
    pub variance: f64,
}

impl LocalStats {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Self { mean, variance }
    }

    /// Coefficient of variation, defined only for a positive mean.
    pub fn ci(&self) -> Option<f64> {
        (self.mean > 0.0).then(|| self.variance.sqrt() / self.mean)
    }
}

/// Statistics of the `window x window` neighbourhood centered on `(r, c)`.
pub fn local_stats(img: &GrayImage, r: usize, c: usize, window: usize) -> Result<LocalStats> {
    let half = window / 2;
    if window % 2 == 0 || r < half || c < half || r + half >= img.rows() || c + half >= img.cols() {
        return Err(Error::arg(format!(
            "{window}x{window} window at ({r}, {c}) does not fit a {}x{} image",
            img.rows(),
            img.cols()
        )));
    }
    let mut buf = Vec::with_capacity(window * window);
    gather(img, r, c, half, &mut buf);
    Ok(LocalStats::of(&buf))
}

fn gather(img: &GrayImage, r: usize, c: usize, half: usize, buf: &mut Vec<f64>) {
    buf.clear();
    for rr in r - half..=r + half {
        buf.extend_from_slice(&img.row(rr)[c - half..=c + half]);
    }
}

/// One neighbourhood handed to a per-pixel estimator.
struct Window<'a> {
    values: &'a [f64],
    distances: &'a [f64],
    center: f64,
    stats: LocalStats,
}

fn check_fits(img: &GrayImage, window: usize) -> Result<()> {
    if img.rows() < window || img.cols() < window {
        return Err(Error::arg(format!(
            "a {}x{} image is smaller than the {window}x{window} window",
            img.rows(),
            img.cols()
        )));
    }
    Ok(())
}

fn distances(window: usize) -> Vec<f64> {
    let half = (window / 2) as f64;
    (0..window * window)
        .map(|i| {
            let dr = (i / window) as f64 - half;
            let dc = (i % window) as f64 - half;
            (dr * dr + dc * dc).sqrt()
        })
        .collect()
}

fn scan<F>(img: &GrayImage, window: usize, estimate: F) -> Result<GrayImage>
where
    F: Fn(&Window<'_>) -> f64 + Sync,
{
    if window % 2 == 0 || window < 3 {
        return Err(Error::arg(format!("filter window must be odd and at least 3, got {window}")));
    }
    check_fits(img, window)?;
    let (rows, cols, half) = (img.rows(), img.cols(), window / 2);
    let dist = distances(window);
    let mut out = img.pixels().to_vec();
    out.par_chunks_mut(cols)
        .enumerate()
        .skip(half)
        .take(rows - 2 * half)
        .for_each_init(
            || Vec::with_capacity(window * window),
            |buf, (r, line)| {
                for (c, px) in line.iter_mut().enumerate().take(cols - half).skip(half) {
                    gather(img, r, c, half, buf);
                    let w = Window {
                        values: buf,
                        distances: &dist,
                        center: img.get(r, c),
                        stats: LocalStats::of(buf),
                    };
                    *px = estimate(&w);
                }
            },
        );
    Ok(img.with_pixels(out))
}

fn weighted_mean(values: &[f64], distances: &[f64], rate: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&v, &d) in values.iter().zip(distances) {
        let w = (-rate * d).exp();
        num += w * v;
        den += w;
    }
    num / den
}

pub fn median_filter(img: &GrayImage, cfg: &ClassicFilterConfig) -> Result<GrayImage> {
    // the median needs a scratch copy it can reorder
    scan(img, cfg.window, |w| {
        let mut sorted = w.values.to_vec();
        let mid = sorted.len() / 2;
        *sorted.select_nth_unstable_by(mid, f64::total_cmp).1
    })
}

pub(crate) fn lee_weight(ci: f64, cu: f64) -> f64 {
    if ci <= cu {
        0.0
    } else {
        (1.0 - (cu * cu) / (ci * ci)).clamp(0.0, 1.0)
    }
}

pub(crate) fn kuan_weight(ci: f64, cu: f64) -> f64 {
    if ci <= cu {
        0.0
    } else {
        ((1.0 - (cu * cu) / (ci * ci)) / (1.0 + cu * cu)).clamp(0.0, 1.0)
    }
}

pub fn lee_filter(img: &GrayImage, cfg: &ClassicFilterConfig) -> Result<GrayImage> {
    let cu = cfg.cu;
    scan(img, cfg.window, |w| {
        let m = w.stats.mean;
        match w.stats.ci() {
            Some(ci) => m + lee_weight(ci, cu) * (w.center - m),
            None => m,
        }
    })
}

pub fn kuan_filter(img: &GrayImage, cfg: &ClassicFilterConfig) -> Result<GrayImage> {
    let cu = cfg.cu;
    scan(img, cfg.window, |w| {
        let m = w.stats.mean;
        match w.stats.ci() {
            Some(ci) => m + kuan_weight(ci, cu) * (w.center - m),
            None => m,
        }
    })
}

pub fn frost_filter(img: &GrayImage, cfg: &ClassicFilterConfig) -> Result<GrayImage> {
    let damping = cfg.damping;
    scan(img, cfg.window, |w| match w.stats.ci() {
        Some(ci) => weighted_mean(w.values, w.distances, damping * ci * ci),
        None => w.stats.mean,
    })
}

/// Which branch of the three-way rule a window falls in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Region {
    Homogeneous,
    /// Carries the normalised heterogeneity `(ci - cu) / (cmax - ci)`.
    Mixed(f64),
    Heterogeneous,
}

pub(crate) fn region(ci: f64, cfg: &ClassicFilterConfig) -> Region {
    if ci <= cfg.cu {
        Region::Homogeneous
    } else if ci >= cfg.cmax {
        Region::Heterogeneous
    } else {
        Region::Mixed((ci - cfg.cu) / (cfg.cmax - ci))
    }
}

pub(crate) fn enhanced_lee_estimate(center: f64, stats: LocalStats, cfg: &ClassicFilterConfig) -> f64 {
    let m = stats.mean;
    let Some(ci) = stats.ci() else { return m };
    match region(ci, cfg) {
        Region::Homogeneous => m,
        Region::Heterogeneous => center,
        Region::Mixed(h) => {
            let w = (-cfg.damping * h).exp();
            m * w + center * (1.0 - w)
        }
    }
}

pub fn enhanced_lee_filter(img: &GrayImage, cfg: &ClassicFilterConfig) -> Result<GrayImage> {
    scan(img, cfg.window, |w| enhanced_lee_estimate(w.center, w.stats, cfg))
}

pub fn enhanced_frost_filter(img: &GrayImage, cfg: &ClassicFilterConfig) -> Result<GrayImage> {
    scan(img, cfg.window, |w| {
        let m = w.stats.mean;
        let Some(ci) = w.stats.ci() else { return m };
        match region(ci, cfg) {
            Region::Homogeneous => m,
            Region::Heterogeneous => w.center,
            Region::Mixed(h) => weighted_mean(w.values, w.distances, cfg.damping * h),
        }
    })
}

pub(crate) fn gamma_map_estimate(center: f64, stats: LocalStats, cfg: &ClassicFilterConfig) -> f64 {
    let m = stats.mean;
    let Some(ci) = stats.ci() else { return m };
    match region(ci, cfg) {
        Region::Homogeneous => m,
        Region::Heterogeneous => center,
        Region::Mixed(_) => {
            let (cu2, l) = (cfg.cu * cfg.cu, cfg.looks);
            let alpha = (1.0 + cu2) / (ci * ci - cu2);
            let b = alpha - l - 1.0;
            let disc = m * m * b * b + 4.0 * alpha * l * m * center;
            if disc < 0.0 {
                m
            } else {
                (b * m + disc.sqrt()) / (2.0 * alpha)
            }
        }
    }
}

pub fn gamma_map_filter(img: &GrayImage, cfg: &ClassicFilterConfig) -> Result<GrayImage> {
    scan(img, cfg.window, |w| gamma_map_estimate(w.center, w.stats, cfg))
}
