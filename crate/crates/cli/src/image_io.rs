//! Grayscale PGM (P2/P5) and PNG files as fields with values in `[0, 1]`.

use std::fs;
use std::path::Path;

use elastica_core::ScalarField64;
use image::{DynamicImage, ImageBuffer, Luma};

use crate::error::{CliError, Result};

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    /// Plain (ASCII) PGM, `P2`.
    PgmAscii,
    /// Raw (binary) PGM, `P5`.
    PgmBinary,
    Png,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BitDepth {
    #[default]
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> u16 {
        match self {
            BitDepth::Eight => u8::MAX as u16,
            BitDepth::Sixteen => u16::MAX,
        }
    }
}

/// Format implied by the file extension: `.pgm` saves as `P5`, `.png` as PNG.
pub fn format_for_path(path: &Path) -> Result<ImageFormat> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("pgm") => Ok(ImageFormat::PgmBinary),
        Some("png") => Ok(ImageFormat::Png),
        _ => Err(CliError::format(
            path,
            "unsupported image extension (expected .pgm or .png)",
        )),
    }
}

/// Clamps to `[0, 1]` and rounds half up to an integer level in `0..=max`.
/// NaN maps to 0.
pub fn quantize(value: f64, max: u16) -> u16 {
    if value.is_nan() {
        return 0;
    }
    let scaled = value.clamp(0.0, 1.0) * max as f64;
    (scaled + 0.5).floor().min(max as f64) as u16
}

/// Reads a PGM or PNG file, detected from its leading bytes.
pub fn load_image(path: impl AsRef<Path>) -> Result<ScalarField64> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        decode_pgm(&bytes).map_err(|m| CliError::format(path, m))
    } else if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(&bytes, path)
    } else {
        Err(CliError::format(
            path,
            "unsupported image format (expected PGM P2/P5 or PNG)",
        ))
    }
}

/// Writes an 8-bit image in the format implied by the extension.
pub fn save_image(field: &ScalarField64, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    save_image_as(field, path, format_for_path(path)?, BitDepth::Eight)
}

pub fn save_image_as(
    field: &ScalarField64,
    path: impl AsRef<Path>,
    format: ImageFormat,
    depth: BitDepth,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        ImageFormat::PgmAscii | ImageFormat::PgmBinary => {
            encode_pgm(field, format == ImageFormat::PgmAscii, depth)
        }
        ImageFormat::Png => encode_png(field, depth).map_err(|source| CliError::Png {
            path: path.to_path_buf(),
            source,
        })?,
    };
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Splits the PGM header into tokens, skipping `#` comments. Returns the
/// tokens and the offset just past the single whitespace after the last one.
fn pgm_header(bytes: &[u8], count: usize) -> std::result::Result<(Vec<&str>, usize), String> {
    let mut tokens = Vec::with_capacity(count);
    let mut pos = 0;
    while tokens.len() < count {
        match bytes.get(pos) {
            None => return Err("truncated PGM header".into()),
            Some(b'#') => {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            }
            Some(c) if c.is_ascii_whitespace() => pos += 1,
            Some(_) => {
                let start = pos;
                while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
                    pos += 1;
                }
                let token =
                    std::str::from_utf8(&bytes[start..pos]).map_err(|_| "non-ASCII PGM header")?;
                tokens.push(token);
            }
        }
    }
    Ok((tokens, pos + 1))
}

fn parse_dim(token: &str, what: &str) -> std::result::Result<usize, String> {
    token
        .parse::<usize>()
        .map_err(|_| format!("invalid PGM {what} {token:?}"))
}

pub fn decode_pgm(bytes: &[u8]) -> std::result::Result<ScalarField64, String> {
    let (header, data_start) = pgm_header(bytes, 4)?;
    let ascii = match header[0] {
        "P2" => true,
        "P5" => false,
        other => return Err(format!("unsupported PGM magic {other:?}")),
    };
    let width = parse_dim(header[1], "width")?;
    let height = parse_dim(header[2], "height")?;
    let maxval = parse_dim(header[3], "maxval")?;
    if maxval == 0 || maxval > u16::MAX as usize {
        return Err(format!("PGM maxval {maxval} outside 1..=65535"));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| "PGM dimensions overflow".to_string())?;

    let samples: Vec<usize> = if ascii {
        let text = std::str::from_utf8(bytes.get(data_start..).unwrap_or(&[]))
            .map_err(|_| "non-ASCII P2 data")?;
        let values = text
            .split_ascii_whitespace()
            .take(n)
            .map(|t| parse_dim(t, "sample"))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if values.len() < n {
            return Err(format!("P2 data holds {} of {n} samples", values.len()));
        }
        values
    } else {
        let wide = maxval > 255;
        let need = if wide { 2 * n } else { n };
        let data = bytes.get(data_start..data_start + need).ok_or_else(|| {
            format!(
                "P5 data holds {} of {need} bytes",
                bytes.len().saturating_sub(data_start)
            )
        })?;
        if wide {
            data.chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]) as usize)
                .collect()
        } else {
            data.iter().map(|&b| b as usize).collect()
        }
    };
    if let Some(bad) = samples.iter().find(|&&s| s > maxval) {
        return Err(format!("PGM sample {bad} exceeds maxval {maxval}"));
    }
    let scale = maxval as f64;
    ScalarField64::from_vec(
        width,
        height,
        samples.into_iter().map(|s| s as f64 / scale).collect(),
    )
    .map_err(|e| e.to_string())
}

pub fn encode_pgm(field: &ScalarField64, ascii: bool, depth: BitDepth) -> Vec<u8> {
    let max = depth.max_value();
    let magic = if ascii { "P2" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n{max}\n", field.width(), field.height()).into_bytes();
    let levels = field.as_slice().iter().map(|&v| quantize(v, max));
    if ascii {
        for (k, level) in levels.enumerate() {
            let sep = if (k + 1) % field.width() == 0 {
                '\n'
            } else {
                ' '
            };
            out.extend_from_slice(format!("{level}{sep}").as_bytes());
        }
    } else if depth == BitDepth::Eight {
        out.extend(levels.map(|l| l as u8));
    } else {
        for level in levels {
            out.extend_from_slice(&level.to_be_bytes());
        }
    }
    out
}

fn decode_png(bytes: &[u8], path: &Path) -> Result<ScalarField64> {
    let img =
        image::load_from_memory_with_format(bytes, image::ImageFormat::Png).map_err(|source| {
            CliError::Png {
                path: path.to_path_buf(),
                source,
            }
        })?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    let data: Vec<f64> = match img {
        DynamicImage::ImageLuma8(buf) => buf
            .into_raw()
            .into_iter()
            .map(|v| v as f64 / 255.0)
            .collect(),
        DynamicImage::ImageLuma16(buf) => buf
            .into_raw()
            .into_iter()
            .map(|v| v as f64 / 65535.0)
            .collect(),
        other => {
            return Err(CliError::format(
                path,
                format!("PNG is not grayscale (color type {:?})", other.color()),
            ))
        }
    };
    Ok(ScalarField64::from_vec(width, height, data)?)
}

fn encode_png(field: &ScalarField64, depth: BitDepth) -> image::ImageResult<Vec<u8>> {
    let (w, h) = (field.width() as u32, field.height() as u32);
    let max = depth.max_value();
    let img = match depth {
        BitDepth::Eight => {
            let raw = field
                .as_slice()
                .iter()
                .map(|&v| quantize(v, max) as u8)
                .collect();
            DynamicImage::ImageLuma8(
                ImageBuffer::<Luma<u8>, _>::from_raw(w, h, raw).expect("buffer matches dimensions"),
            )
        }
        BitDepth::Sixteen => {
            let raw = field.as_slice().iter().map(|&v| quantize(v, max)).collect();
            DynamicImage::ImageLuma16(
                ImageBuffer::<Luma<u16>, _>::from_raw(w, h, raw)
                    .expect("buffer matches dimensions"),
            )
        }
    };
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png)?;
    Ok(out.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> ScalarField64 {
        ScalarField64::from_fn(7, 5, |i, j| (i * 5 + j) as f64 / 34.0).unwrap()
    }

    #[test]
    fn quantization_rounds_half_up_and_clamps() {
        assert_eq!(quantize(0.5, 255), 128);
        assert_eq!(quantize(127.5 / 255.0, 255), 128);
        assert_eq!(quantize(127.49 / 255.0, 255), 127);
        assert_eq!(quantize(-0.3, 255), 0);
        assert_eq!(quantize(1.7, 255), 255);
        assert_eq!(quantize(f64::NAN, 255), 0);
        assert_eq!(quantize(1.0, 65535), 65535);
    }

    #[test]
    fn ascii_and_binary_agree() {
        let f = ramp();
        for depth in [BitDepth::Eight, BitDepth::Sixteen] {
            let a = decode_pgm(&encode_pgm(&f, true, depth)).unwrap();
            let b = decode_pgm(&encode_pgm(&f, false, depth)).unwrap();
            assert_eq!(a, b);
            let bound = 0.5 / depth.max_value() as f64 + 1e-12;
            assert!((&a - &f).max_abs() <= bound);
        }
    }

    #[test]
    fn header_comments_are_skipped() {
        let bytes = b"P2\n# made by hand\n3 2 # dims\n4\n0 1 2\n3 4 0\n";
        let f = decode_pgm(bytes).unwrap();
        assert_eq!(f.dims(), (3, 2));
        assert_eq!(f.as_slice(), &[0.0, 0.25, 0.5, 0.75, 1.0, 0.0]);
    }

    #[test]
    fn malformed_pgm_is_rejected() {
        assert!(decode_pgm(b"P5\n2 2\n255\n\x00\x01")
            .unwrap_err()
            .contains("2 of 4"));
        assert!(decode_pgm(b"P2\n2 1\n3\n1 9\n")
            .unwrap_err()
            .contains("exceeds"));
        assert!(decode_pgm(b"P2\n2 1\n0\n0 0\n").is_err());
        assert!(decode_pgm(b"P2\n2").is_err());
        assert!(decode_pgm(b"P6\n1 1\n255\n...").is_err());
    }

    #[test]
    fn png_roundtrip_in_memory() {
        let f = ramp();
        for depth in [BitDepth::Eight, BitDepth::Sixteen] {
            let bytes = encode_png(&f, depth).unwrap();
            let g = decode_png(&bytes, Path::new("mem.png")).unwrap();
            assert!((&g - &f).max_abs() <= 0.5 / depth.max_value() as f64 + 1e-12);
        }
    }

    #[test]
    fn extension_selects_format() {
        assert_eq!(
            format_for_path(Path::new("a.PGM")).unwrap(),
            ImageFormat::PgmBinary
        );
        assert_eq!(
            format_for_path(Path::new("a.png")).unwrap(),
            ImageFormat::Png
        );
        assert!(format_for_path(Path::new("a.jpg")).is_err());
        assert!(format_for_path(Path::new("noext")).is_err());
    }
}
