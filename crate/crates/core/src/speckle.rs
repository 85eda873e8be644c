//! Unit-mean multiplicative speckle, `v = u * s`.
//!
//! Fields are drawn from a `ChaCha8Rng` seeded with
//! [`SeedableRng::seed_from_u64`], consumed in row-major pixel order. Every
//! family is produced by inverse-CDF sampling of uniforms in `(0, 1]`, so a
//! given seed always yields the same field.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, GrayImage, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpeckleFamily {
    /// Single-look amplitude: Rayleigh with scale `sqrt(2/pi)`.
    RayleighAmplitude,
    /// Single-look intensity: exponential with rate 1.
    ExponentialIntensity,
    /// Multi-look intensity: gamma with shape `L` and scale `1/L`.
    GammaMultilook,
}

impl SpeckleFamily {
    pub fn name(self) -> &'static str {
        match self {
            SpeckleFamily::RayleighAmplitude => "rayleigh-amplitude",
            SpeckleFamily::ExponentialIntensity => "exponential-intensity",
            SpeckleFamily::GammaMultilook => "gamma-multilook",
        }
    }
}

impl fmt::Display for SpeckleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpeckleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rayleigh" | "rayleigh-amplitude" => Ok(SpeckleFamily::RayleighAmplitude),
            "exponential" | "exponential-intensity" => Ok(SpeckleFamily::ExponentialIntensity),
            "gamma" | "gamma-multilook" => Ok(SpeckleFamily::GammaMultilook),
            other => Err(Error::arg(format!("unknown speckle family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpeckleParams {
    pub family: SpeckleFamily,
    /// Number of looks; only read by [`SpeckleFamily::GammaMultilook`].
    pub looks: u32,
    pub seed: u64,
}

impl SpeckleParams {
    pub fn new(family: SpeckleFamily, looks: u32, seed: u64) -> Result<Self> {
        if looks == 0 {
            return Err(Error::arg("number of looks must be at least 1"));
        }
        Ok(Self { family, looks, seed })
    }

    pub fn exponential(seed: u64) -> Self {
        Self { family: SpeckleFamily::ExponentialIntensity, looks: 1, seed }
    }

    pub fn rayleigh(seed: u64) -> Self {
        Self { family: SpeckleFamily::RayleighAmplitude, looks: 1, seed }
    }

    pub fn gamma(looks: u32, seed: u64) -> Result<Self> {
        Self::new(SpeckleFamily::GammaMultilook, looks, seed)
    }
}

/// `-ln(U)` with `U` uniform on `(0, 1]`.
#[inline]
fn unit_exponential(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

/// Draws a `rows x cols` field of i.i.d. unit-mean speckle.
pub fn generate_speckle_field(rows: usize, cols: usize, params: &SpeckleParams) -> Result<GrayImage> {
    if rows == 0 || cols == 0 {
        return Err(Error::arg(format!("speckle field dimensions must be positive, got {rows}x{cols}")));
    }
    if params.looks == 0 {
        return Err(Error::arg("number of looks must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = rows * cols;
    let pixels: Vec<f64> = match params.family {
        SpeckleFamily::ExponentialIntensity => (0..n).map(|_| unit_exponential(&mut rng)).collect(),
        SpeckleFamily::RayleighAmplitude => {
            let scale = (2.0 / std::f64::consts::PI).sqrt();
            (0..n).map(|_| scale * (2.0 * unit_exponential(&mut rng)).sqrt()).collect()
        }
        SpeckleFamily::GammaMultilook => {
            let looks = params.looks;
            let inv = 1.0 / f64::from(looks);
            (0..n)
                .map(|_| {
                    let sum: f64 = (0..looks).map(|_| unit_exponential(&mut rng)).sum();
                    sum * inv
                })
                .collect()
        }
    };
    GrayImage::new(rows, cols, pixels)
}

/// Pixelwise product `clean * field`; no quantization.
pub fn apply_speckle(clean: &GrayImage, field: &GrayImage) -> Result<GrayImage> {
    clean.ensure_same_dims(field)?;
    let pixels = clean.pixels().iter().zip(field.pixels()).map(|(u, s)| u * s).collect();
    Ok(clean.with_pixels(pixels))
}
