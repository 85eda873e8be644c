//! Command-line front end for [`despeckle::run_benchmark`].
//!
//! Exit codes: 0 on success, 1 when the run fails, 2 on a usage error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, CommandFactory, Parser};
use despeckle::speckle::SpeckleFamily;
use despeckle::{run_benchmark, BenchmarkSpec, FilterKind, InputSpec, ReportFormat, ScanMode};

#[derive(Debug, Parser)]
#[command(
    name = "despeckle",
    version,
    about = "Run the speckle filter bank on an image and report NV, MSD, ENL and DR",
    group(ArgGroup::new("source").required(true).args(["input", "synthetic"]))
)]
struct Args {
    /// 8-bit binary PGM or indexed BMP to filter
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Synthetic clean image, e.g. constant:100:256x256
    #[arg(long, value_name = "constant:VALUE:ROWSxCOLS", value_parser = parse_synthetic)]
    synthetic: Option<InputSpec>,

    /// Multiply the input by speckle: rayleigh, exponential or gamma[:LOOKS]
    #[arg(long, value_name = "FAMILY[:LOOKS]", value_parser = parse_speckle)]
    speckle: Option<(SpeckleFamily, u32)>,

    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Comma-separated filter list (default: all nine)
    #[arg(long, value_name = "LIST", value_delimiter = ',', value_parser = parse_filter)]
    filters: Vec<FilterKind>,

    /// Odd kernel size shared by every filter
    #[arg(long, value_name = "N", default_value_t = 3)]
    window: usize,

    /// Number of looks for the adaptive filters (default: estimated from ENL)
    #[arg(long, value_name = "N")]
    looks: Option<f64>,

    /// Directional scan: in-place or out-of-place
    #[arg(long, value_name = "MODE", default_value = "in-place", value_parser = parse_scan_mode)]
    scan_mode: ScanMode,

    /// ENL tile side in pixels
    #[arg(long, value_name = "N", default_value_t = 25)]
    enl_tile: usize,

    /// Output directory for filtered images and the report
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Report format: csv or markdown
    #[arg(long, value_name = "FORMAT", default_value = "csv", value_parser = parse_format)]
    format: ReportFormat,
}

fn parse_synthetic(s: &str) -> Result<InputSpec, String> {
    let rest = s.strip_prefix("constant:").ok_or("expected constant:VALUE:ROWSxCOLS")?;
    let (value, dims) = rest.split_once(':').ok_or("expected constant:VALUE:ROWSxCOLS")?;
    let value: f64 = value.parse().map_err(|_| format!("invalid constant value {value:?}"))?;
    let (rows, cols) = dims.split_once('x').ok_or("dimensions must look like ROWSxCOLS")?;
    let rows: usize = rows.parse().map_err(|_| format!("invalid row count {rows:?}"))?;
    let cols: usize = cols.parse().map_err(|_| format!("invalid column count {cols:?}"))?;
    Ok(InputSpec::SyntheticConstant { value, rows, cols })
}

fn parse_speckle(s: &str) -> Result<(SpeckleFamily, u32), String> {
    let (family, looks) = match s.split_once(':') {
        Some((f, l)) => (f, Some(l)),
        None => (s, None),
    };
    let family: SpeckleFamily = family.parse().map_err(|e: despeckle::Error| e.to_string())?;
    let looks = match looks {
        Some(l) => l.parse::<u32>().ok().filter(|&l| l >= 1).ok_or_else(|| format!("invalid looks {l:?}"))?,
        None => 1,
    };
    if looks != 1 && family != SpeckleFamily::GammaMultilook {
        return Err(format!("{family} speckle is single-look"));
    }
    Ok((family, looks))
}

fn parse_filter(s: &str) -> Result<FilterKind, String> {
    s.trim().parse().map_err(|e: despeckle::Error| e.to_string())
}

fn parse_scan_mode(s: &str) -> Result<ScanMode, String> {
    s.parse().map_err(|e: despeckle::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: despeckle::Error| e.to_string())
}

/// Parses `argv` (program name first) into a validated benchmark spec.
pub fn cli_parse<I, T>(argv: I) -> Result<BenchmarkSpec, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let input = match (args.input, args.synthetic) {
        (Some(path), None) => InputSpec::File(path),
        (None, Some(synthetic)) => synthetic,
        _ => unreachable!("clap enforces exactly one input source"),
    };
    let mut spec = BenchmarkSpec::new(input, args.out);
    spec.speckle = args.speckle;
    spec.seed = args.seed;
    if !args.filters.is_empty() {
        spec.filters = args.filters;
    }
    spec.window = args.window;
    spec.looks = args.looks;
    spec.scan_mode = args.scan_mode;
    spec.enl_tile = args.enl_tile;
    spec.report_format = args.format;
    spec.validate()
        .map_err(|e| Args::command().error(ErrorKind::ValueValidation, e.to_string()))?;
    Ok(spec)
}

/// Parses `argv`, runs the benchmark and prints the report to stdout.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let spec = match cli_parse(argv) {
        Ok(spec) => spec,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run_benchmark(&spec) {
        Ok(outcome) => {
            let report = &outcome.report;
            print!("{}", report.render(spec.report_format));
            eprintln!(
                "{} filters, {w}x{w} window, looks {l}{est}, {m} directional scan; wrote {} images and {}",
                spec.filters.len(),
                outcome.images.len(),
                outcome.report_path.display(),
                w = report.window,
                l = report.looks,
                est = if report.looks_estimated { " (estimated)" } else { "" },
                m = report.scan_mode,
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
