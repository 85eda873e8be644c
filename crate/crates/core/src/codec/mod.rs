//! 8-bit grayscale file codecs.
//!
//! Two formats are supported: binary PGM (`P5`, maxval 255), which is the
//! canonical exchange format, and uncompressed 8-bit indexed Windows BMP.

mod bmp;
mod pgm;

use std::path::Path;

pub use bmp::{read_bmp8, write_bmp8};
pub use pgm::{read_pgm, write_pgm};

use crate::{Error, GrayImage, Result};

/// Decodes either format, picking the codec from the magic bytes.
pub fn read_image(bytes: &[u8]) -> Result<GrayImage> {
    match bytes.get(..2) {
        Some(b"P5") => read_pgm(bytes),
        Some(b"BM") => read_bmp8(bytes),
        _ => Err(Error::UnsupportedFormat("expected a binary PGM (P5) or BMP file".into())),
    }
}

pub fn read_image_file(path: impl AsRef<Path>) -> Result<GrayImage> {
    read_image(&std::fs::read(path)?)
}

pub fn write_pgm_file(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    std::fs::write(path, write_pgm(img)?)?;
    Ok(())
}
