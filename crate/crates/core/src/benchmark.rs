//! Comparison runs: load or synthesise a noisy image, run a list of filters
//! over it and tabulate the assessment metrics.
//!
//! All filtered images are brought back to 8 bits with
//! [`PixelDepthPolicy::EIGHT_BIT`] before they are assessed and written, so
//! every row of the report is measured in the same domain. MSD is taken
//! against the noisy input; synthetic runs add an `msd_clean` column measured
//! against the speckle-free image.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::classic::{self, ClassicFilterConfig};
use crate::codec::{read_image_file, write_pgm_file};
use crate::directional::{self, DirectionalConfig, ScanMode};
use crate::metrics::{enl_tiled, MetricsReport, DEFAULT_DR_WINDOW, DEFAULT_ENL_TILE};
use crate::speckle::{apply_speckle, generate_speckle_field, SpeckleFamily, SpeckleParams};
use crate::{quantize, Error, GrayImage, PixelDepthPolicy, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterKind {
    Median,
    Lee,
    Kuan,
    Gamma,
    EnhancedLee,
    Frost,
    EnhancedFrost,
    Ds,
    Eds,
}

impl FilterKind {
    pub const ALL: [FilterKind; 9] = [
        FilterKind::Median,
        FilterKind::Lee,
        FilterKind::Kuan,
        FilterKind::Gamma,
        FilterKind::EnhancedLee,
        FilterKind::Frost,
        FilterKind::EnhancedFrost,
        FilterKind::Ds,
        FilterKind::Eds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Median => "median",
            FilterKind::Lee => "lee",
            FilterKind::Kuan => "kuan",
            FilterKind::Gamma => "gamma",
            FilterKind::EnhancedLee => "enhanced-lee",
            FilterKind::Frost => "frost",
            FilterKind::EnhancedFrost => "enhanced-frost",
            FilterKind::Ds => "ds",
            FilterKind::Eds => "eds",
        }
    }

    /// Runs the filter and returns an 8-bit result.
    pub fn apply(self, img: &GrayImage, classic: &ClassicFilterConfig, directional: &DirectionalConfig) -> Result<GrayImage> {
        let raw = match self {
            FilterKind::Median => classic::median_filter(img, classic)?,
            FilterKind::Lee => classic::lee_filter(img, classic)?,
            FilterKind::Kuan => classic::kuan_filter(img, classic)?,
            FilterKind::Gamma => classic::gamma_map_filter(img, classic)?,
            FilterKind::EnhancedLee => classic::enhanced_lee_filter(img, classic)?,
            FilterKind::Frost => classic::frost_filter(img, classic)?,
            FilterKind::EnhancedFrost => classic::enhanced_frost_filter(img, classic)?,
            FilterKind::Ds => directional::ds_filter(img, directional)?,
            FilterKind::Eds => return directional::homomorphic_eds_with(img, directional),
        };
        Ok(quantize(&raw, PixelDepthPolicy::EIGHT_BIT))
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FilterKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown filter {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    /// A PGM or BMP file.
    File(PathBuf),
    /// A constant-valued clean image.
    SyntheticConstant { value: f64, rows: usize, cols: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Markdown,
}

impl ReportFormat {
    fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::arg(format!("unknown report format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub input: InputSpec,
    /// Speckle family and looks. With a file input the file is taken as the clean image.
    pub speckle: Option<(SpeckleFamily, u32)>,
    pub seed: Option<u64>,
    pub filters: Vec<FilterKind>,
    pub window: usize,
    /// Overrides the looks estimate used by the adaptive filters.
    pub looks: Option<f64>,
    pub scan_mode: ScanMode,
    pub enl_tile: usize,
    pub output_dir: PathBuf,
    pub report_format: ReportFormat,
}

impl BenchmarkSpec {
    /// All nine filters, 3x3 windows, in-place scan, 25-pixel ENL tiles, CSV.
    pub fn new(input: InputSpec, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input,
            speckle: None,
            seed: None,
            filters: FilterKind::ALL.to_vec(),
            window: 3,
            looks: None,
            scan_mode: ScanMode::InPlaceSequential,
            enl_tile: DEFAULT_ENL_TILE,
            output_dir: output_dir.into(),
            report_format: ReportFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.filters.is_empty() {
            return Err(Error::arg("at least one filter is required"));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.filters.iter().find(|f| !seen.insert(**f)) {
            return Err(Error::arg(format!("filter {dup} listed twice")));
        }
        DirectionalConfig::new(self.window, self.scan_mode)?;
        if let Some(looks) = self.looks {
            ClassicFilterConfig::new(self.window, looks)?;
        }
        if self.enl_tile == 0 {
            return Err(Error::arg("ENL tile size must be positive"));
        }
        if let InputSpec::SyntheticConstant { value, rows, cols } = self.input {
            if !(0.0..=255.0).contains(&value) {
                return Err(Error::arg(format!("synthetic value {value} is outside [0, 255]")));
            }
            if rows == 0 || cols == 0 {
                return Err(Error::arg("synthetic dimensions must be positive"));
            }
            if self.seed.is_none() {
                return Err(Error::arg("a synthetic input requires a seed"));
            }
        }
        if let Some((_, looks)) = self.speckle {
            if looks == 0 {
                return Err(Error::arg("speckle looks must be at least 1"));
            }
            if self.seed.is_none() {
                return Err(Error::arg("speckle synthesis requires a seed"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Row 0 is the unfiltered image, then one row per filter in spec order.
    pub rows: Vec<MetricsReport>,
    pub has_clean: bool,
    pub window: usize,
    pub scan_mode: ScanMode,
    pub looks: f64,
    pub looks_estimated: bool,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl Report {
    /// CSV with header `filter,nv,msd,enl,dr` (plus `msd_clean` for synthetic runs).
    /// Absent values are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("filter,nv,msd,enl,dr");
        if self.has_clean {
            out.push_str(",msd_clean");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{},{},{},{}", row.filter_name, row.nv, opt(row.msd), opt(row.enl), opt(row.dr));
            if self.has_clean {
                let _ = write!(out, ",{}", opt(row.msd_clean));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let dash = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Assessment parameters vs. filters ({w}x{w} window, looks {l}{est}, directional scan {m})\n",
            w = self.window,
            l = self.looks,
            est = if self.looks_estimated { " estimated from ENL" } else { "" },
            m = self.scan_mode,
        );
        out.push_str("| Filter | NV | MSD | ENL | DR |");
        if self.has_clean {
            out.push_str(" MSD vs clean (extension) |");
        }
        out.push_str("\n|---|---|---|---|---|");
        if self.has_clean {
            out.push_str("---|");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "| {} | {} | {} | {} | {} |", row.filter_name, row.nv, dash(row.msd), dash(row.enl), dash(row.dr));
            if self.has_clean {
                let _ = write!(out, " {} |", dash(row.msd_clean));
            }
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => self.to_markdown(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkOutcome {
    pub report: Report,
    pub report_path: PathBuf,
    /// Every PGM written, noisy image first when one was synthesised.
    pub images: Vec<PathBuf>,
}

/// Rounded tiled ENL of `img`, or 1 when the image has no usable tile.
pub fn estimate_looks(img: &GrayImage, tile: usize) -> f64 {
    if img.rows() < tile || img.cols() < tile {
        return 1.0;
    }
    enl_tiled(img, tile).map_or(1.0, |e| e.enl.round().max(1.0))
}

struct Prepared {
    stem: String,
    noisy: GrayImage,
    clean: Option<GrayImage>,
    synthesised: bool,
}

fn prepare(spec: &BenchmarkSpec) -> Result<Prepared> {
    let (stem, base, synthetic) = match &spec.input {
        InputSpec::File(path) => {
            let img = read_image_file(path).map_err(at_path(path))?;
            let stem = path.file_stem().map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned());
            (stem, img, false)
        }
        InputSpec::SyntheticConstant { value, rows, cols } => {
            let img = GrayImage::filled(*rows, *cols, PixelDepthPolicy::EIGHT_BIT.quantize_value(*value))?;
            ("synthetic".to_string(), img, true)
        }
    };
    match (spec.speckle, spec.seed) {
        (Some((family, looks)), Some(seed)) => {
            let params = SpeckleParams::new(family, looks, seed)?;
            let field = generate_speckle_field(base.rows(), base.cols(), &params)?;
            let noisy = quantize(&apply_speckle(&base, &field)?, PixelDepthPolicy::EIGHT_BIT);
            Ok(Prepared { stem, noisy, clean: Some(base), synthesised: true })
        }
        (Some(_), None) => Err(Error::arg("speckle synthesis requires a seed")),
        (None, _) => {
            base.check_u8()?;
            let clean = synthetic.then(|| base.clone());
            Ok(Prepared { stem, noisy: base, clean, synthesised: false })
        }
    }
}

/// Prefixes I/O errors with the path involved.
fn at_path(path: &Path) -> impl FnOnce(Error) -> Error + '_ {
    move |e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    }
}

/// Runs every filter in `spec` and writes the filtered images and the report
/// into `spec.output_dir`.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkOutcome> {
    spec.validate()?;
    let Prepared { stem, noisy, clean, synthesised } = prepare(spec)?;

    let (looks, looks_estimated) = match spec.looks {
        Some(l) => (l, false),
        None => (estimate_looks(&noisy, spec.enl_tile), true),
    };
    let classic_cfg = ClassicFilterConfig::new(spec.window, looks)?;
    let directional_cfg = DirectionalConfig::new(spec.window, spec.scan_mode)?;

    let filtered: Vec<GrayImage> = spec
        .filters
        .par_iter()
        .map(|kind| kind.apply(&noisy, &classic_cfg, &directional_cfg))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(1 + filtered.len());
    rows.push(MetricsReport::assess("noisy", &noisy, None, clean.as_ref(), spec.enl_tile, DEFAULT_DR_WINDOW)?);
    for (kind, img) in spec.filters.iter().zip(&filtered) {
        rows.push(MetricsReport::assess(kind.name(), img, Some(&noisy), clean.as_ref(), spec.enl_tile, DEFAULT_DR_WINDOW)?);
    }
    let report = Report {
        rows,
        has_clean: clean.is_some(),
        window: spec.window,
        scan_mode: spec.scan_mode,
        looks,
        looks_estimated,
    };

    std::fs::create_dir_all(&spec.output_dir).map_err(|e| at_path(&spec.output_dir)(e.into()))?;
    let mut images = Vec::new();
    if synthesised {
        let path = spec.output_dir.join(format!("{stem}_noisy.pgm"));
        write_pgm_file(&path, &noisy).map_err(at_path(&path))?;
        images.push(path);
    }
    for (kind, img) in spec.filters.iter().zip(&filtered) {
        let path = spec.output_dir.join(format!("{stem}_{kind}.pgm"));
        write_pgm_file(&path, img).map_err(at_path(&path))?;
        images.push(path);
    }
    let report_path = spec.output_dir.join(format!("{stem}_report.{}", spec.report_format.extension()));
    std::fs::write(&report_path, report.render(spec.report_format)).map_err(|e| at_path(&report_path)(e.into()))?;

    Ok(BenchmarkOutcome { report, report_path, images })
}
