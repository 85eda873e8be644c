//! Directional smoothing.
//!
//! For every interior pixel the mean of its neighbours is taken along four
//! lines through the pixel (horizontal, vertical and the two diagonals,
//! always excluding the pixel itself). The pixel is replaced with the mean
//! whose value is closest to the pixel; ties go to the first direction in
//! [`Direction::ALL`]. Border pixels that the window cannot cover are left
//! untouched.
//!
//! Two scan semantics are available. [`ScanMode::InPlaceSequential`] walks the
//! image row by row and writes each result back immediately, so later pixels
//! see already-smoothed neighbours. [`ScanMode::OutOfPlace`] reads only the
//! input and can be run in parallel.
//!
//! [`ds_filter`] applies the pass to linear intensities. [`homomorphic_eds`]
//! wraps the same pass in `log(v + 1)` / `exp(.) - 1` with 8-bit rounding.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::{quantize, Error, GrayImage, PixelDepthPolicy, Result};

pub const MIN_WINDOW: usize = 3;
pub const MAX_WINDOW: usize = 33;
pub const DIRECTION_COUNT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanMode {
    #[default]
    InPlaceSequential,
    OutOfPlace,
}

impl ScanMode {
    pub fn name(self) -> &'static str {
        match self {
            ScanMode::InPlaceSequential => "in-place",
            ScanMode::OutOfPlace => "out-of-place",
        }
    }
}

impl fmt::Display for ScanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in-place" | "in-place-sequential" => Ok(ScanMode::InPlaceSequential),
            "out-of-place" => Ok(ScanMode::OutOfPlace),
            other => Err(Error::arg(format!("unknown scan mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionalConfig {
    scan_mode: ScanMode,
    window: usize,
}

impl DirectionalConfig {
    pub fn new(window: usize, scan_mode: ScanMode) -> Result<Self> {
        if window % 2 == 0 || !(MIN_WINDOW..=MAX_WINDOW).contains(&window) {
            return Err(Error::arg(format!(
                "directional window must be odd and within {MIN_WINDOW}..={MAX_WINDOW}, got {window}"
            )));
        }
        Ok(Self { scan_mode, window })
    }

    pub fn scan_mode(&self) -> ScanMode {
        self.scan_mode
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of averaging directions; four for every window size.
    pub fn directions(&self) -> usize {
        DIRECTION_COUNT
    }

    pub fn with_scan_mode(self, scan_mode: ScanMode) -> Self {
        Self { scan_mode, ..self }
    }
}

impl Default for DirectionalConfig {
    fn default() -> Self {
        Self { scan_mode: ScanMode::InPlaceSequential, window: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Left and right neighbours.
    Horizontal,
    /// Above and below.
    Vertical,
    /// Top-left and bottom-right.
    MainDiagonal,
    /// Bottom-left and top-right.
    AntiDiagonal,
}

impl Direction {
    /// Selection order; earlier entries win ties.
    pub const ALL: [Direction; DIRECTION_COUNT] =
        [Direction::Horizontal, Direction::Vertical, Direction::MainDiagonal, Direction::AntiDiagonal];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Unit step `(drow, dcol)` along the ray.
    fn step(self) -> (isize, isize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::Vertical => (1, 0),
            Direction::MainDiagonal => (1, 1),
            Direction::AntiDiagonal => (1, -1),
        }
    }
}

/// Per-pixel record of the direction choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionSelection {
    pub averages: [f64; DIRECTION_COUNT],
    pub deviations: [f64; DIRECTION_COUNT],
    pub chosen: Direction,
}

impl DirectionSelection {
    fn select(center: f64, averages: [f64; DIRECTION_COUNT]) -> Self {
        let deviations = averages.map(|d| (d - center).abs());
        let mut best = 0;
        for n in 1..DIRECTION_COUNT {
            if deviations[n] < deviations[best] {
                best = n;
            }
        }
        Self { averages, deviations, chosen: Direction::ALL[best] }
    }

    pub fn value(&self) -> f64 {
        self.averages[self.chosen.index()]
    }
}

#[inline]
fn averages_3x3(v: &[f64], cols: usize, r: usize, c: usize) -> [f64; DIRECTION_COUNT] {
    let at = |r: usize, c: usize| v[r * cols + c];
    [
        (at(r, c - 1) + at(r, c + 1)) / 2.0,
        (at(r - 1, c) + at(r + 1, c)) / 2.0,
        (at(r - 1, c - 1) + at(r + 1, c + 1)) / 2.0,
        (at(r + 1, c - 1) + at(r - 1, c + 1)) / 2.0,
    ]
}

#[inline]
fn averages_rays(v: &[f64], cols: usize, r: usize, c: usize, half: usize) -> [f64; DIRECTION_COUNT] {
    let count = (2 * half) as f64;
    Direction::ALL.map(|dir| {
        let (dr, dc) = dir.step();
        let mut sum = 0.0;
        for k in -(half as isize)..=(half as isize) {
            if k == 0 {
                continue;
            }
            let rr = (r as isize + k * dr) as usize;
            let cc = (c as isize + k * dc) as usize;
            sum += v[rr * cols + cc];
        }
        sum / count
    })
}

/// Direction averages and choice for the 3x3 neighbourhood of interior pixel `(r, c)`.
pub fn directional_averages_3x3(img: &GrayImage, r: usize, c: usize) -> Result<DirectionSelection> {
    if r == 0 || c == 0 || r + 1 >= img.rows() || c + 1 >= img.cols() {
        return Err(Error::arg(format!(
            "({r}, {c}) is not an interior pixel of a {}x{} image",
            img.rows(),
            img.cols()
        )));
    }
    let avg = averages_3x3(img.pixels(), img.cols(), r, c);
    Ok(DirectionSelection::select(img.get(r, c), avg))
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

fn run_pass<F>(img: &GrayImage, half: usize, mode: ScanMode, averages: F) -> GrayImage
where
    F: Fn(&[f64], usize, usize, usize) -> [f64; DIRECTION_COUNT] + Sync,
{
    let (rows, cols) = (img.rows(), img.cols());
    let src = img.pixels();
    let mut out = src.to_vec();
    match mode {
        ScanMode::InPlaceSequential => {
            for r in half..rows - half {
                for c in half..cols - half {
                    let sel = DirectionSelection::select(out[r * cols + c], averages(&out, cols, r, c));
                    out[r * cols + c] = sel.value();
                }
            }
        }
        ScanMode::OutOfPlace => {
            out.par_chunks_mut(cols)
                .enumerate()
                .skip(half)
                .take(rows - 2 * half)
                .for_each(|(r, line)| {
                    for c in half..cols - half {
                        line[c] = DirectionSelection::select(src[r * cols + c], averages(src, cols, r, c)).value();
                    }
                });
        }
    }
    img.with_pixels(out)
}

/// One 3x3 directional pass over the interior of `img`.
pub fn eds_pass(img: &GrayImage, cfg: &DirectionalConfig) -> Result<GrayImage> {
    if cfg.window != 3 {
        return Err(Error::arg(format!(
            "eds_pass is the 3x3 kernel, got window {}; use generalized_directional_pass",
            cfg.window
        )));
    }
    check_fits(img, 3)?;
    Ok(run_pass(img, 1, cfg.scan_mode, averages_3x3))
}

/// Directional pass for any odd window in `3..=33`.
///
/// Each direction averages the `window - 1` pixels on its ray through the
/// center. A border of `(window - 1) / 2` pixels is copied unchanged.
pub fn generalized_directional_pass(img: &GrayImage, cfg: &DirectionalConfig) -> Result<GrayImage> {
    let window = cfg.window;
    if window % 2 == 0 || !(MIN_WINDOW..=MAX_WINDOW).contains(&window) {
        return Err(Error::arg(format!("invalid directional window {window}")));
    }
    check_fits(img, window)?;
    if window == 3 {
        return Ok(run_pass(img, 1, cfg.scan_mode, averages_3x3));
    }
    let half = window / 2;
    Ok(run_pass(img, half, cfg.scan_mode, move |v, cols, r, c| averages_rays(v, cols, r, c, half)))
}

/// Directional smoothing applied directly to linear intensities.
pub fn ds_filter(img: &GrayImage, cfg: &DirectionalConfig) -> Result<GrayImage> {
    generalized_directional_pass(img, cfg)
}

/// The homomorphic wrapper around an arbitrary inner pass.
///
/// The 8-bit input is shifted by one, log-transformed, passed to `inner`,
/// exponentiated, rounded, shifted back and clamped to `[0, 255]`.
pub fn homomorphic_pipeline<F>(img: &GrayImage, inner: F) -> Result<GrayImage>
where
    F: FnOnce(&GrayImage) -> Result<GrayImage>,
{
    img.check_u8()?;
    // +1 keeps log away from zero
    let log_domain = img.map(|p| (p + 1.0).ln());
    let smoothed = inner(&log_domain)?;
    if !smoothed.same_dims(img) {
        return Err(Error::arg("inner pass changed the image dimensions"));
    }
    let restored = smoothed.map(|p| p.exp().round() - 1.0);
    Ok(quantize(&restored, PixelDepthPolicy::EIGHT_BIT))
}

/// Enhanced directional smoothing: the default in-place 3x3 pass run in the log domain.
pub fn homomorphic_eds(img: &GrayImage) -> Result<GrayImage> {
    homomorphic_eds_with(img, &DirectionalConfig::default())
}

pub fn homomorphic_eds_with(img: &GrayImage, cfg: &DirectionalConfig) -> Result<GrayImage> {
    homomorphic_pipeline(img, |v| generalized_directional_pass(v, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PATCH: [[f64; 3]; 3] = [[0.0, 9.0, 12.0], [2.0, 10.0, 4.0], [8.0, 11.0, 20.0]];

    /// Line-by-line 1-indexed double loop, kept independent of the real pass.
    #[allow(clippy::needless_range_loop)]
    fn reference_eds(v: &GrayImage) -> GrayImage {
        let (rows, cols) = (v.rows(), v.cols());
        let mut m = vec![vec![0.0; cols + 1]; rows + 1];
        for r in 1..=rows {
            for c in 1..=cols {
                m[r][c] = v.get(r - 1, c - 1);
            }
        }
        for r in 2..=rows - 1 {
            for c in 2..=cols - 1 {
                let mut d = [0.0; 5];
                d[1] = (m[r][c - 1] + m[r][c + 1]) / 2.0;
                d[2] = (m[r - 1][c] + m[r + 1][c]) / 2.0;
                d[3] = (m[r - 1][c - 1] + m[r + 1][c + 1]) / 2.0;
                d[4] = (m[r + 1][c - 1] + m[r - 1][c + 1]) / 2.0;
                let mut big_d = [0.0; 5];
                for n in 1..=4 {
                    big_d[n] = (d[n] - m[r][c]).abs();
                }
                let mut a_dmin = 1;
                for n in 2..=4 {
                    if big_d[n] < big_d[a_dmin] {
                        a_dmin = n;
                    }
                }
                m[r][c] = d[a_dmin];
            }
        }
        GrayImage::from_fn(rows, cols, |r, c| m[r + 1][c + 1]).unwrap()
    }

    fn random_image(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> GrayImage {
        GrayImage::from_fn(rows, cols, |_, _| rng.random_range(0..256) as f64).unwrap()
    }

    fn out_of_place(window: usize) -> DirectionalConfig {
        DirectionalConfig::new(window, ScanMode::OutOfPlace).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(DirectionalConfig::new(4, ScanMode::OutOfPlace).is_err());
        assert!(DirectionalConfig::new(1, ScanMode::OutOfPlace).is_err());
        assert!(DirectionalConfig::new(35, ScanMode::OutOfPlace).is_err());
        let cfg = DirectionalConfig::new(33, ScanMode::OutOfPlace).unwrap();
        assert_eq!(cfg.directions(), 4);
        assert_eq!(DirectionalConfig::default().window(), 3);
        assert_eq!(DirectionalConfig::default().scan_mode(), ScanMode::InPlaceSequential);
    }

    #[test]
    fn averages_on_reference_patch() {
        let img = GrayImage::from_rows(&PATCH).unwrap();
        let sel = directional_averages_3x3(&img, 1, 1).unwrap();
        assert_eq!(sel.averages, [3.0, 10.0, 10.0, 10.0]);
        assert_eq!(sel.deviations, [7.0, 0.0, 0.0, 0.0]);
        assert_eq!(sel.chosen, Direction::Vertical);
    }

    #[test]
    fn constant_neighbourhood_picks_first() {
        let img = GrayImage::filled(3, 3, 6.0).unwrap();
        let sel = directional_averages_3x3(&img, 1, 1).unwrap();
        assert_eq!(sel.averages, [6.0; 4]);
        assert_eq!(sel.deviations, [0.0; 4]);
        assert_eq!(sel.chosen, Direction::Horizontal);
    }

    #[test]
    fn diagonal_wins() {
        let img = GrayImage::from_rows(&[[1.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 9.0]]).unwrap();
        let sel = directional_averages_3x3(&img, 1, 1).unwrap();
        assert_eq!(sel.averages, [0.0, 0.0, 5.0, 0.0]);
        assert_eq!(sel.deviations, [5.0, 5.0, 0.0, 5.0]);
        assert_eq!(sel.chosen, Direction::MainDiagonal);
    }

    #[test]
    fn border_coordinates_rejected() {
        let img = GrayImage::filled(4, 4, 1.0).unwrap();
        assert!(directional_averages_3x3(&img, 0, 1).is_err());
        assert!(directional_averages_3x3(&img, 1, 3).is_err());
        assert!(directional_averages_3x3(&img, 2, 2).is_ok());
    }

    #[test]
    fn too_small_images_rejected() {
        let img = GrayImage::filled(2, 5, 1.0).unwrap();
        assert!(eds_pass(&img, &DirectionalConfig::default()).is_err());
        let img = GrayImage::filled(4, 4, 1.0).unwrap();
        assert!(generalized_directional_pass(&img, &out_of_place(5)).is_err());
        assert!(eds_pass(&img, &out_of_place(5)).is_err());
    }

    #[test]
    fn constant_images_are_fixed() {
        let img = GrayImage::filled(7, 9, 42.0).unwrap();
        for mode in [ScanMode::InPlaceSequential, ScanMode::OutOfPlace] {
            for w in [3, 5, 7] {
                let cfg = DirectionalConfig::new(w, mode).unwrap();
                assert_eq!(generalized_directional_pass(&img, &cfg).unwrap(), img);
            }
        }
    }

    #[test]
    fn single_interior_pixel_patch() {
        let img = GrayImage::from_rows(&PATCH).unwrap();
        for mode in [ScanMode::InPlaceSequential, ScanMode::OutOfPlace] {
            let out = eds_pass(&img, &DirectionalConfig::default().with_scan_mode(mode)).unwrap();
            assert_eq!(out, img);
        }
    }

    #[test]
    fn in_place_matches_reference_interpreter() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xED5);
        for _ in 0..200 {
            let rows = rng.random_range(3..10);
            let cols = rng.random_range(3..10);
            let img = random_image(&mut rng, rows, cols);
            let out = eds_pass(&img, &DirectionalConfig::default()).unwrap();
            assert_eq!(out, reference_eds(&img));
        }
    }

    #[test]
    fn in_place_differs_from_out_of_place() {
        // the second interior pixel reads the already-updated first one
        let img = GrayImage::from_rows(&[
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 10.0, 4.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let seq = eds_pass(&img, &DirectionalConfig::default()).unwrap();
        let par = eds_pass(&img, &out_of_place(3)).unwrap();
        assert_eq!(seq.get(1, 1), 2.0);
        assert_eq!(seq.get(1, 2), 1.0);
        assert_eq!(par.get(1, 2), 5.0);
    }

    #[test]
    fn window_three_reduces_to_eds_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let img = random_image(&mut rng, 12, 15);
        for mode in [ScanMode::InPlaceSequential, ScanMode::OutOfPlace] {
            let cfg = DirectionalConfig::default().with_scan_mode(mode);
            assert_eq!(generalized_directional_pass(&img, &cfg).unwrap(), eds_pass(&img, &cfg).unwrap());
            // the general ray code gives the same answer as the 3x3 kernel
            let rays = run_pass(&img, 1, mode, |v, cols, r, c| averages_rays(v, cols, r, c, 1));
            assert_eq!(rays, eds_pass(&img, &cfg).unwrap());
        }
    }

    #[test]
    fn ds_equals_raw_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let img = random_image(&mut rng, 10, 10);
        let cfg = DirectionalConfig::default();
        assert_eq!(ds_filter(&img, &cfg).unwrap(), eds_pass(&img, &cfg).unwrap());
    }

    #[test]
    fn ds_lowers_noise_variance_on_speckle() {
        use crate::metrics::noise_variance;
        use crate::speckle::{apply_speckle, generate_speckle_field, SpeckleParams};
        let clean = GrayImage::filled(128, 128, 100.0).unwrap();
        let field = generate_speckle_field(128, 128, &SpeckleParams::exponential(2024)).unwrap();
        let noisy = quantize(&apply_speckle(&clean, &field).unwrap(), PixelDepthPolicy::EIGHT_BIT);
        let out = ds_filter(&noisy, &DirectionalConfig::default()).unwrap();
        let (before, after) = (noise_variance(&noisy), noise_variance(&out));
        assert!(after < before, "{after} >= {before}");
        assert_eq!(before, NOISY_NV_BASELINE);
        assert_eq!(after, DS_NV_BASELINE);
    }
    // recorded from the seeded run above
    const NOISY_NV_BASELINE: f64 = 14388.272583007813;
    const DS_NV_BASELINE: f64 = 9195.482762403384;

    #[test]
    fn five_window_keeps_vertical_edge() {
        let img = GrayImage::from_fn(9, 10, |_, c| if c < 5 { 0.0 } else { 100.0 }).unwrap();
        for mode in [ScanMode::InPlaceSequential, ScanMode::OutOfPlace] {
            let cfg = DirectionalConfig::new(5, mode).unwrap();
            let out = generalized_directional_pass(&img, &cfg).unwrap();
            for r in 2..7 {
                assert_eq!(out.get(r, 4), 0.0);
                assert_eq!(out.get(r, 5), 100.0);
            }
            assert_eq!(out, img);
        }
    }

    #[test]
    fn homomorphic_identity_chain_is_exact() {
        for k in 0..=255u32 {
            let k1 = f64::from(k) + 1.0;
            assert_eq!(k1.ln().exp().round(), k1, "gray value {k}");
        }
        let img = GrayImage::from_fn(16, 16, |r, c| (r * 16 + c) as f64).unwrap();
        let out = homomorphic_pipeline(&img, |v| Ok(v.clone())).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn homomorphic_eds_on_patch() {
        let img = GrayImage::from_rows(&PATCH).unwrap();
        let out = homomorphic_eds(&img).unwrap();
        assert_eq!(out.get(1, 1), 10.0);
        assert_eq!(out, img);
    }

    #[test]
    fn homomorphic_eds_constant_images() {
        for k in [0.0, 1.0, 17.0, 128.0, 254.0, 255.0] {
            let img = GrayImage::filled(6, 5, k).unwrap();
            assert_eq!(homomorphic_eds(&img).unwrap(), img);
        }
    }

    #[test]
    fn homomorphic_rejects_non_8bit() {
        let img = GrayImage::filled(3, 3, 10.5).unwrap();
        assert!(matches!(homomorphic_eds(&img), Err(Error::Range { .. })));
        let img = GrayImage::filled(3, 3, 256.0).unwrap();
        assert!(homomorphic_eds(&img).is_err());
    }

    fn image_strategy() -> impl Strategy<Value = GrayImage> {
        (3usize..12, 3usize..12).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0.0f64..255.0, r * c)
                .prop_map(move |px| GrayImage::new(r, c, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn out_of_place_invariants(img in image_strategy()) {
            let out = eds_pass(&img, &out_of_place(3)).unwrap();
            let (lo, hi) = img.min_max();
            let (rows, cols) = (img.rows(), img.cols());
            for r in 0..rows {
                for c in 0..cols {
                    let o = out.get(r, c);
                    prop_assert!(lo <= o && o <= hi);
                    if r == 0 || c == 0 || r == rows - 1 || c == cols - 1 {
                        prop_assert_eq!(o.to_bits(), img.get(r, c).to_bits());
                    } else {
                        let sel = directional_averages_3x3(&img, r, c).unwrap();
                        let dev = (o - img.get(r, c)).abs();
                        prop_assert!(sel.deviations.iter().all(|&d| dev <= d));
                    }
                }
            }
        }

        #[test]
        fn in_place_stays_in_range(img in image_strategy()) {
            let out = eds_pass(&img, &DirectionalConfig::default()).unwrap();
            let (lo, hi) = img.min_max();
            prop_assert!(out.pixels().iter().all(|&o| lo <= o && o <= hi));
            prop_assert_eq!(out.row(0), img.row(0));
            prop_assert_eq!(out.row(img.rows() - 1), img.row(img.rows() - 1));
        }

        #[test]
        fn step_edges_are_fixed_points(rows in 3usize..14, cols in 3usize..14, split in 1usize..13,
                                       horizontal in any::<bool>(), window in prop_oneof![Just(3usize), Just(5)]) {
            prop_assume!(rows >= window && cols >= window);
            let img = GrayImage::from_fn(rows, cols, |r, c| {
                let pos = if horizontal { r } else { c };
                if pos < split { 0.0 } else { 100.0 }
            }).unwrap();
            let out = generalized_directional_pass(&img, &out_of_place(window)).unwrap();
            prop_assert_eq!(out, img);
        }
    }
}
