//! Mask files: 8-bit grayscale PNG and binary PGM (P5). Pixel values are
//! label IDs and are read back verbatim.

use std::fs;
use std::io::{Cursor, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mask::LabelMask;

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskFormat {
    Png,
    Pgm,
}

impl MaskFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MaskFormat::Png => "png",
            MaskFormat::Pgm => "pgm",
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("png") => Ok(MaskFormat::Png),
            Some("pgm") => Ok(MaskFormat::Pgm),
            _ => Err(Error::UnsupportedFormat(format!(
                "cannot infer mask format from {}",
                path.display()
            ))),
        }
    }
}

impl std::str::FromStr for MaskFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "png" => Ok(MaskFormat::Png),
            "pgm" => Ok(MaskFormat::Pgm),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Loads a mask, optionally checking it against `(width, height)`.
///
/// The format is detected from the file contents, not the extension.
pub fn load_mask_file(path: impl AsRef<Path>, expected_dims: Option<(usize, usize)>) -> Result<LabelMask> {
    let path = path.as_ref();
    let load = || -> Result<LabelMask> {
        let bytes = fs::read(path)?;
        let mask = decode_mask(&bytes)?;
        if let Some(dims) = expected_dims {
            if mask.dims() != dims {
                return Err(Error::dims(mask.dims(), dims));
            }
        }
        Ok(mask)
    };
    load().map_err(|e| e.with_path(path))
}

pub fn decode_mask(bytes: &[u8]) -> Result<LabelMask> {
    if bytes.starts_with(PNG_MAGIC) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P") && bytes.len() >= 2 {
        decode_pnm(bytes)
    } else {
        Err(Error::UnsupportedFormat("neither PNG nor PGM".into()))
    }
}

fn decode_png(bytes: &[u8]) -> Result<LabelMask> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Malformed(format!("png: {e}")))?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if color != png::ColorType::Grayscale {
        return Err(Error::UnsupportedColorType(format!("{color:?}")));
    }
    if depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedBitDepth(format!("{} bits", depth as u8)));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Malformed("png: image too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Malformed(format!("png: {e}")))?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let labels = if frame.line_size == w {
        buf.truncate(w * h);
        buf
    } else {
        buf.chunks(frame.line_size).take(h).flat_map(|row| row[..w].iter().copied()).collect()
    };
    LabelMask::new(w, h, labels)
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Malformed(format!("pgm: bad {what}")))
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<LabelMask> {
    match &bytes[..2] {
        b"P5" => {}
        b"P6" | b"P3" | b"P7" => {
            return Err(Error::UnsupportedColorType(format!(
                "netpbm {}",
                String::from_utf8_lossy(&bytes[..2])
            )))
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "netpbm {} (only binary P5 is supported)",
                String::from_utf8_lossy(other)
            )))
        }
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Malformed(format!("pgm: maxval {maxval}")));
    }
    if maxval > 255 {
        return Err(Error::UnsupportedBitDepth("16 bits".into()));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Malformed("pgm: missing separator after maxval".into()));
    }
    let data = &bytes[cur.pos + 1..];
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::Malformed("pgm: dimensions overflow".into()))?;
    if data.len() < n {
        return Err(Error::Malformed(format!(
            "pgm: expected {n} pixel bytes, found {}",
            data.len()
        )));
    }
    let raster = &data[..n];
    if let Some(&v) = raster.iter().find(|&&v| v as usize > maxval) {
        return Err(Error::Malformed(format!("pgm: pixel value {v} exceeds maxval {maxval}")));
    }
    LabelMask::new(width, height, raster.to_vec())
}

pub fn encode_png(mask: &LabelMask) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, mask.width() as u32, mask.height() as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let png_err = |e: png::EncodingError| Error::Malformed(format!("png: {e}"));
        let mut writer = enc.write_header().map_err(png_err)?;
        writer.write_image_data(mask.as_slice()).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(out)
}

pub fn encode_pgm(mask: &LabelMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    out.extend_from_slice(mask.as_slice());
    out
}

pub fn save_mask_file(path: impl AsRef<Path>, mask: &LabelMask, format: MaskFormat) -> Result<()> {
    let path = path.as_ref();
    let write = || -> Result<()> {
        let bytes = match format {
            MaskFormat::Png => encode_png(mask)?,
            MaskFormat::Pgm => encode_pgm(mask),
        };
        let mut f = fs::File::create(path)?;
        f.write_all(&bytes)?;
        Ok(())
    };
    write().map_err(|e| e.with_path(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_bytes_verbatim() {
        let bytes = b"P5\n2 2\n255\n\x00\x01\x01\x02";
        let m = decode_mask(bytes).unwrap();
        assert_eq!(m.dims(), (2, 2));
        assert_eq!(m.as_slice(), &[0, 1, 1, 2]);
    }

    #[test]
    fn pgm_header_comments_and_small_maxval() {
        let bytes = b"P5 # mask\n3 # w\n1\n# max\n4\n\x00\x04\x02";
        let m = decode_mask(bytes).unwrap();
        assert_eq!(m.as_slice(), &[0, 4, 2]);
        assert!(decode_mask(b"P5\n3 1\n3\n\x00\x04\x02").is_err());
    }

    #[test]
    fn pgm_rejections() {
        let e = decode_mask(b"P5\n1 1\n65535\n\x00\x01").unwrap_err();
        assert!(e.to_string().contains("unsupported bit depth"), "{e}");
        let e = decode_mask(b"P6\n1 1\n255\n\x00\x00\x00").unwrap_err();
        assert!(matches!(e, Error::UnsupportedColorType(_)));
        let e = decode_mask(b"P2\n1 1\n255\n0\n").unwrap_err();
        assert!(matches!(e, Error::UnsupportedFormat(_)));
        assert!(matches!(decode_mask(b"P5\n2 2\n255\n\x00"), Err(Error::Malformed(_))));
        assert!(decode_mask(b"GIF89a").is_err());
    }

    #[test]
    fn png_round_trip() {
        let m = LabelMask::from_rows(&[[0u8, 1, 2], [255, 7, 0]]).unwrap();
        assert_eq!(decode_mask(&encode_png(&m).unwrap()).unwrap(), m);
        assert_eq!(decode_mask(&encode_pgm(&m)).unwrap(), m);
    }

    fn png_with(color: png::ColorType, depth: png::BitDepth, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        let mut enc = png::Encoder::new(&mut out, 1, 1);
        enc.set_color(color);
        enc.set_depth(depth);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(data).unwrap();
        w.finish().unwrap();
        out
    }

    #[test]
    fn png_rejections() {
        let e = decode_mask(&png_with(png::ColorType::Grayscale, png::BitDepth::Sixteen, &[0, 1])).unwrap_err();
        assert_eq!(e.to_string(), "unsupported bit depth: 16 bits");
        let e = decode_mask(&png_with(png::ColorType::Rgb, png::BitDepth::Eight, &[1, 2, 3])).unwrap_err();
        assert!(matches!(e, Error::UnsupportedColorType(_)));
        let e = decode_mask(&png_with(png::ColorType::Grayscale, png::BitDepth::Four, &[0x10])).unwrap_err();
        assert!(matches!(e, Error::UnsupportedBitDepth(_)));
    }

    #[test]
    fn load_reports_path_and_dims() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.pgm");
        let m = LabelMask::zeros(4, 3).unwrap();
        save_mask_file(&p, &m, MaskFormat::Pgm).unwrap();
        assert_eq!(load_mask_file(&p, Some((4, 3))).unwrap(), m);
        let e = load_mask_file(&p, Some((3, 4))).unwrap_err();
        assert_eq!(e.kind(), "dimension_mismatch");
        assert!(e.to_string().contains("m.pgm"));
        let e = load_mask_file(dir.path().join("missing.png"), None).unwrap_err();
        assert_eq!(e.kind(), "io");
    }
}
