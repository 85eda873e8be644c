//! Fixtures shared by the criterion benchmarks.

use despeckle::speckle::{apply_speckle, generate_speckle_field};
use despeckle::{quantize, GrayImage, PixelDepthPolicy, SpeckleParams};

/// An 8-bit speckled scene: two flat regions split by a diagonal edge with a
/// bright square target, multiplied by single-look intensity speckle.
pub fn speckled_scene(rows: usize, cols: usize, seed: u64) -> GrayImage {
    let clean = GrayImage::from_fn(rows, cols, |r, c| {
        let target = (rows / 3..rows / 3 + rows / 10).contains(&r) && (cols / 3..cols / 3 + cols / 10).contains(&c);
        if target {
            200.0
        } else if r + c < (rows + cols) / 2 {
            60.0
        } else {
            110.0
        }
    })
    .expect("non-empty scene");
    let field = generate_speckle_field(rows, cols, &SpeckleParams::exponential(seed)).expect("valid field");
    quantize(&apply_speckle(&clean, &field).expect("same dims"), PixelDepthPolicy::EIGHT_BIT)
}
