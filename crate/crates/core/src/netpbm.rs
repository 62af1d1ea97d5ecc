//! PGM (P2/P5) and PPM (P3/P6) decoding and encoding.
//!
//! Encoders always emit the canonical binary form: magic, one space-separated
//! `width height` line, `255`, a single newline, then raw samples.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::image::{GrayImage, RgbImage};

#[derive(Debug, Error)]
pub enum PnmError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated payload: expected {expected} samples, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("unsupported netpbm variant: {0}")]
    Unsupported(String),
}

impl PnmError {
    /// Stable numeric code per failure class.
    pub fn code(&self) -> u8 {
        match self {
            PnmError::Io { .. } => 10,
            PnmError::MalformedHeader(_) => 11,
            PnmError::TruncatedPayload { .. } => 12,
            PnmError::Unsupported(_) => 13,
        }
    }
}

/// A decoded raster, keeping track of whether the source was gray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PnmImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl PnmImage {
    pub fn into_rgb(self) -> RgbImage {
        match self {
            PnmImage::Gray(g) => g.to_rgb(),
            PnmImage::Rgb(c) => c,
        }
    }
}

pub fn decode_file(path: impl AsRef<Path>) -> Result<PnmImage, PnmError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| PnmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode(&bytes)
}

/// Decodes a file and promotes gray images to RGB.
pub fn decode_image(path: impl AsRef<Path>) -> Result<RgbImage, PnmError> {
    decode_file(path).map(PnmImage::into_rgb)
}

pub fn decode(bytes: &[u8]) -> Result<PnmImage, PnmError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(2);
    let (channels, ascii) = match magic {
        b"P2" => (1, true),
        b"P3" => (3, true),
        b"P5" => (1, false),
        b"P6" => (3, false),
        b"P1" | b"P4" | b"P7" => {
            return Err(PnmError::Unsupported(String::from_utf8_lossy(magic).into_owned()))
        }
        _ => return Err(PnmError::MalformedHeader("missing P2/P3/P5/P6 magic".into())),
    };
    let width = r.header_number("width")?;
    let height = r.header_number("height")?;
    let maxval = r.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PnmError::MalformedHeader("zero dimension".into()));
    }
    if maxval == 0 {
        return Err(PnmError::MalformedHeader("maxval must be positive".into()));
    }
    if maxval > 255 {
        return Err(PnmError::Unsupported(format!("16-bit maxval {maxval}")));
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| PnmError::MalformedHeader("dimensions overflow".into()))?;

    let samples = if ascii {
        let mut out = Vec::with_capacity(expected);
        while out.len() < expected {
            match r.ascii_number()? {
                Some(v) => out.push(v),
                None => {
                    return Err(PnmError::TruncatedPayload {
                        expected,
                        actual: out.len(),
                    })
                }
            }
        }
        out
    } else {
        // Exactly one whitespace byte separates maxval from the raster.
        match r.bytes.get(r.pos) {
            Some(b) if b.is_ascii_whitespace() => r.pos += 1,
            _ => return Err(PnmError::MalformedHeader("no whitespace after maxval".into())),
        }
        let raster = &r.bytes[r.pos..];
        if raster.len() < expected {
            return Err(PnmError::TruncatedPayload {
                expected,
                actual: raster.len(),
            });
        }
        raster[..expected].iter().map(|&b| b as usize).collect()
    };

    let mut data = Vec::with_capacity(expected);
    for v in samples {
        if v > maxval {
            return Err(PnmError::MalformedHeader(format!("sample {v} exceeds maxval {maxval}")));
        }
        data.push(if maxval == 255 {
            v as u8
        } else {
            ((v * 255 + maxval / 2) / maxval) as u8
        });
    }
    Ok(if channels == 1 {
        PnmImage::Gray(GrayImage::from_raw(width, height, data).expect("validated dimensions"))
    } else {
        PnmImage::Rgb(RgbImage::from_raw(width, height, data).expect("validated dimensions"))
    })
}

pub fn encode(img: &PnmImage) -> Vec<u8> {
    match img {
        PnmImage::Gray(g) => encode_pgm(g),
        PnmImage::Rgb(c) => encode_ppm(c),
    }
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    with_header("P6", img.width(), img.height(), img.as_raw())
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    with_header("P5", img.width(), img.height(), img.as_raw())
}

fn with_header(magic: &str, w: usize, h: usize, raster: &[u8]) -> Vec<u8> {
    let mut header = String::new();
    let _ = write!(header, "{magic}\n{w} {h}\n255\n");
    let mut out = header.into_bytes();
    out.extend_from_slice(raster);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> &[u8] {
        let end = (self.pos + n).min(self.bytes.len());
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        s
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Option<Result<usize, String>> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.bytes.get(self.pos).map(|b| Err(format!("unexpected byte 0x{b:02x}")));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        Some(digits.parse().map_err(|_| format!("number {digits} out of range")))
    }

    fn header_number(&mut self, what: &str) -> Result<usize, PnmError> {
        match self.number() {
            Some(Ok(v)) => Ok(v),
            Some(Err(e)) => Err(PnmError::MalformedHeader(format!("{what}: {e}"))),
            None => Err(PnmError::MalformedHeader(format!("missing {what}"))),
        }
    }

    fn ascii_number(&mut self) -> Result<Option<usize>, PnmError> {
        match self.number() {
            Some(Ok(v)) => Ok(Some(v)),
            Some(Err(e)) => Err(PnmError::MalformedHeader(format!("raster: {e}"))),
            None => Ok(None),
        }
    }
}
