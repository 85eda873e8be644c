//! Speckle reduction for grayscale radar imagery.
//!
//! The crate is organised around a single real-valued [`GrayImage`] type:
//!
//! * [`codec`] reads and writes 8-bit binary PGM and indexed BMP files.
//! * [`speckle`] synthesises unit-mean multiplicative speckle fields.
//! * [`directional`] holds the directional smoothing kernels (DS) and the
//!   log-domain enhanced directional smoothing pipeline (EDS).
//! * [`classic`] is the comparison bank: median, Lee, Kuan, Frost, Gamma MAP,
//!   enhanced Lee and enhanced Frost.
//! * [`metrics`] computes noise variance, mean square difference, tiled
//!   equivalent number of looks and deflection ratio.
//! * [`benchmark`] ties everything together into a reproducible comparison
//!   run that emits a report and the filtered images.

pub mod benchmark;
pub mod classic;
pub mod codec;
pub mod directional;
mod error;
mod image;
pub mod metrics;
pub mod speckle;

pub use crate::error::{Error, Result};
pub use crate::image::{quantize, GrayImage, PixelDepthPolicy};

pub use crate::benchmark::{
    run_benchmark, BenchmarkOutcome, BenchmarkSpec, FilterKind, InputSpec, Report, ReportFormat,
};
pub use crate::classic::{ClassicFilterConfig, LocalStats};
pub use crate::directional::{Direction, DirectionSelection, DirectionalConfig, ScanMode};
pub use crate::metrics::{EnlEstimate, MetricsReport};
pub use crate::speckle::{SpeckleFamily, SpeckleParams};
