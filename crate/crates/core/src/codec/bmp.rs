use crate::{Error, GrayImage, Result};

const FILE_HEADER_LEN: usize = 14;
const INFO_HEADER_LEN: usize = 40;
const PALETTE_LEN: usize = 256 * 4;
const BI_RGB: u32 = 0;
// 72 dpi
const PIXELS_PER_METRE: i32 = 2835;

fn u16_at(b: &[u8], off: usize, field: &'static str) -> Result<u16> {
    b.get(off..off + 2)
        .map(|s| u16::from_le_bytes([s[0], s[1]]))
        .ok_or_else(|| Error::decode(field, "file truncated"))
}

fn u32_at(b: &[u8], off: usize, field: &'static str) -> Result<u32> {
    b.get(off..off + 4)
        .map(|s| u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
        .ok_or_else(|| Error::decode(field, "file truncated"))
}

#[inline]
fn row_stride(cols: usize) -> usize {
    (cols + 3) & !3
}

/// Decodes an uncompressed 8-bit indexed BMP.
///
/// Each index is mapped through the palette. Gray entries (R=G=B) map to
/// their common value; colored entries are converted with
/// `0.299R + 0.587G + 0.114B`, rounded. Both bottom-up (positive height) and
/// top-down (negative height) rasters are accepted.
pub fn read_bmp8(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.get(..2) != Some(b"BM") {
        return Err(Error::decode("magic", "expected \"BM\""));
    }
    let data_offset = u32_at(bytes, 10, "data offset")? as usize;
    let info_len = u32_at(bytes, 14, "info header")? as usize;
    if info_len < INFO_HEADER_LEN {
        return Err(Error::UnsupportedFormat(format!("BMP info header of {info_len} bytes")));
    }
    let width = u32_at(bytes, 18, "width")? as i32;
    let height = u32_at(bytes, 22, "height")? as i32;
    let bit_count = u16_at(bytes, 28, "bit count")?;
    let compression = u32_at(bytes, 30, "compression")?;
    let colors_used = u32_at(bytes, 46, "colors used")? as usize;

    if bit_count != 8 {
        return Err(Error::UnsupportedFormat(format!("{bit_count}-bit BMP, only 8-bit indexed is supported")));
    }
    if compression != BI_RGB {
        return Err(Error::UnsupportedFormat(format!("compressed BMP (compression {compression})")));
    }
    if width <= 0 || height == 0 {
        return Err(Error::decode("width", format!("invalid dimensions {width}x{height}")));
    }
    let cols = width as usize;
    let rows = height.unsigned_abs() as usize;
    let bottom_up = height > 0;

    let n_colors = if colors_used == 0 { 256 } else { colors_used.min(256) };
    let palette_start = FILE_HEADER_LEN + info_len;
    let palette_bytes = bytes
        .get(palette_start..palette_start + 4 * n_colors)
        .ok_or_else(|| Error::decode("palette", "file truncated"))?;
    let palette: Vec<u8> = palette_bytes
        .chunks_exact(4)
        .map(|bgra| {
            let (b, g, r) = (bgra[0], bgra[1], bgra[2]);
            if r == g && g == b {
                r
            } else {
                (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)).round() as u8
            }
        })
        .collect();

    let stride = row_stride(cols);
    let raster = bytes
        .get(data_offset..)
        .filter(|r| r.len() >= stride * (rows - 1) + cols)
        .ok_or_else(|| Error::decode("payload", format!("expected {rows} rows of {stride} bytes")))?;

    let mut pixels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let file_row = if bottom_up { rows - 1 - r } else { r };
        let line = &raster[file_row * stride..file_row * stride + cols];
        for (c, &idx) in line.iter().enumerate() {
            let gray = *palette.get(idx as usize).ok_or_else(|| {
                Error::decode("payload", format!("palette index {idx} at row {r}, col {c} exceeds {n_colors} entries"))
            })?;
            pixels.push(f64::from(gray));
        }
    }
    GrayImage::new(rows, cols, pixels)
}

/// Encodes as a bottom-up 8-bit BMP with an identity grayscale palette.
pub fn write_bmp8(img: &GrayImage) -> Result<Vec<u8>> {
    let data = img.to_u8()?;
    let (rows, cols) = (img.rows(), img.cols());
    let stride = row_stride(cols);
    let data_offset = FILE_HEADER_LEN + INFO_HEADER_LEN + PALETTE_LEN;
    let image_size = stride * rows;
    let file_size = data_offset + image_size;
    let too_big = || Error::arg(format!("{rows}x{cols} image is too large for BMP"));
    let file_size_u32 = u32::try_from(file_size).map_err(|_| too_big())?;
    let width = i32::try_from(cols).map_err(|_| too_big())?;
    let height = i32::try_from(rows).map_err(|_| too_big())?;

    let mut out = Vec::with_capacity(file_size);
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&file_size_u32.to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(&(data_offset as u32).to_le_bytes());

    out.extend_from_slice(&(INFO_HEADER_LEN as u32).to_le_bytes());
    out.extend_from_slice(&width.to_le_bytes());
    out.extend_from_slice(&height.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&8u16.to_le_bytes());
    out.extend_from_slice(&BI_RGB.to_le_bytes());
    out.extend_from_slice(&(image_size as u32).to_le_bytes());
    out.extend_from_slice(&PIXELS_PER_METRE.to_le_bytes());
    out.extend_from_slice(&PIXELS_PER_METRE.to_le_bytes());
    out.extend_from_slice(&256u32.to_le_bytes());
    out.extend_from_slice(&256u32.to_le_bytes());

    for i in 0..=255u8 {
        out.extend_from_slice(&[i, i, i, 0]);
    }

    let pad = [0u8; 3];
    for r in (0..rows).rev() {
        out.extend_from_slice(&data[r * cols..(r + 1) * cols]);
        out.extend_from_slice(&pad[..stride - cols]);
    }
    debug_assert_eq!(out.len(), file_size);
    Ok(out)
}
