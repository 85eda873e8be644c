use crate::{Error, GrayImage, Result};

/// Decodes a binary PGM with maxval 255. `#` comments in the header are skipped.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.get(..2) != Some(b"P5") {
        return Err(Error::decode("magic", "expected \"P5\""));
    }
    let mut pos = 2;
    let cols = header_number(bytes, &mut pos, "width")?;
    let rows = header_number(bytes, &mut pos, "height")?;
    let maxval = header_number(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(Error::decode("maxval", format!("unsupported maxval {maxval}, only 255 is accepted")));
    }
    if cols == 0 || rows == 0 {
        return Err(Error::decode("width", format!("zero-sized image {cols}x{rows}")));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::decode("maxval", "missing whitespace after maxval")),
    }
    let n = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::decode("width", "image dimensions overflow"))?;
    let payload = &bytes[pos..];
    if payload.len() < n {
        return Err(Error::decode(
            "payload",
            format!("expected {n} bytes of pixel data, found {}", payload.len()),
        ));
    }
    GrayImage::from_u8(rows, cols, &payload[..n])
}

/// Encodes as `P5\n<cols> <rows>\n255\n` followed by the raw raster.
pub fn write_pgm(img: &GrayImage) -> Result<Vec<u8>> {
    let data = img.to_u8()?;
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend_from_slice(&data);
    Ok(out)
}

fn header_number(bytes: &[u8], pos: &mut usize, field: &'static str) -> Result<usize> {
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            }
            _ => break,
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::decode(field, "expected a decimal number"));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::decode(field, "number out of range"))
}
