//! Netpbm bitmap (P1/P4) reading and writing, plus graymap (P2/P5) reading.

use thiserror::Error;

use crate::imaging::{BinaryImage, GrayImage};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PnmError {
    #[error("bad magic number `{0}`")]
    BadMagic(String),
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("truncated raster: expected {expected} {unit}, found {found}")]
    Truncated {
        expected: usize,
        found: usize,
        unit: &'static str,
    },
    #[error("invalid raster value `{0}`")]
    BadValue(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbmVariant {
    /// ASCII.
    P1,
    /// Packed binary, rows padded to whole bytes, MSB first.
    P4,
}

/// Cursor over a netpbm header, skipping whitespace and `#` comments.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Option<&'a str> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or(""))
    }

    fn number(&mut self, what: &str) -> Result<usize, PnmError> {
        let tok = self
            .token()
            .ok_or_else(|| PnmError::BadHeader(format!("missing {what}")))?;
        match tok.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(PnmError::BadHeader(format!("invalid {what} `{tok}`"))),
        }
    }

    /// Binary rasters start after exactly one whitespace byte.
    fn raster(&self) -> &'a [u8] {
        let start = (self.pos + 1).min(self.bytes.len());
        &self.bytes[start..]
    }
}

fn magic(bytes: &[u8]) -> Result<[u8; 2], PnmError> {
    match bytes {
        [b'P', d, ..] => Ok([b'P', *d]),
        _ => Err(PnmError::BadMagic(
            String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned(),
        )),
    }
}

/// Decode a PBM image. Bit value 1 is black.
pub fn parse_pbm(bytes: &[u8]) -> Result<BinaryImage, PnmError> {
    let variant = match &magic(bytes)? {
        b"P1" => PbmVariant::P1,
        b"P4" => PbmVariant::P4,
        m => return Err(PnmError::BadMagic(String::from_utf8_lossy(m).into_owned())),
    };
    let mut hdr = Header { bytes, pos: 2 };
    let width = hdr.number("width")?;
    let height = hdr.number("height")?;
    let n = width * height;

    let pixels = match variant {
        PbmVariant::P1 => {
            let mut pixels = Vec::with_capacity(n);
            hdr.skip_space();
            while pixels.len() < n && hdr.pos < bytes.len() {
                match bytes[hdr.pos] {
                    b'0' => pixels.push(false),
                    b'1' => pixels.push(true),
                    b if b.is_ascii_whitespace() => {}
                    b'#' => {
                        hdr.skip_space();
                        continue;
                    }
                    b => return Err(PnmError::BadValue((b as char).to_string())),
                }
                hdr.pos += 1;
            }
            if pixels.len() < n {
                return Err(PnmError::Truncated {
                    expected: n,
                    found: pixels.len(),
                    unit: "pixels",
                });
            }
            pixels
        }
        PbmVariant::P4 => {
            let stride = width.div_ceil(8);
            let raster = hdr.raster();
            if raster.len() < stride * height {
                return Err(PnmError::Truncated {
                    expected: stride * height,
                    found: raster.len(),
                    unit: "bytes",
                });
            }
            let mut pixels = Vec::with_capacity(n);
            for r in 0..height {
                let row = &raster[r * stride..(r + 1) * stride];
                pixels.extend((0..width).map(|c| row[c / 8] >> (7 - c % 8) & 1 == 1));
            }
            pixels
        }
    };
    BinaryImage::from_pixels(height, width, pixels).map_err(|e| PnmError::BadHeader(e.to_string()))
}

/// Canonical PBM encoding: magic, newline, `w h`, newline, raster. P1 rows
/// are space-separated digits, one row per line.
pub fn write_pbm(img: &BinaryImage, variant: PbmVariant) -> Vec<u8> {
    let (h, w) = (img.height(), img.width());
    let mut out = Vec::new();
    match variant {
        PbmVariant::P1 => {
            out.extend_from_slice(format!("P1\n{w} {h}\n").as_bytes());
            for r in 0..h {
                for c in 0..w {
                    if c > 0 {
                        out.push(b' ');
                    }
                    out.push(if img.get(r, c) { b'1' } else { b'0' });
                }
                out.push(b'\n');
            }
        }
        PbmVariant::P4 => {
            out.extend_from_slice(format!("P4\n{w} {h}\n").as_bytes());
            let stride = w.div_ceil(8);
            for r in 0..h {
                let mut row = vec![0u8; stride];
                for c in 0..w {
                    if img.get(r, c) {
                        row[c / 8] |= 0x80 >> (c % 8);
                    }
                }
                out.extend_from_slice(&row);
            }
        }
    }
    out
}

/// Decode a PGM image (P2 or P5) with maxval up to 255, rescaled to 0..=255.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, PnmError> {
    let ascii = match &magic(bytes)? {
        b"P2" => true,
        b"P5" => false,
        m => return Err(PnmError::BadMagic(String::from_utf8_lossy(m).into_owned())),
    };
    let mut hdr = Header { bytes, pos: 2 };
    let width = hdr.number("width")?;
    let height = hdr.number("height")?;
    let maxval = hdr.number("maxval")?;
    if maxval > 255 {
        return Err(PnmError::BadHeader(format!(
            "maxval {maxval} above 255 is not supported"
        )));
    }
    let n = width * height;
    let raw: Vec<usize> = if ascii {
        let mut v = Vec::with_capacity(n);
        while v.len() < n {
            let Some(tok) = hdr.token() else { break };
            v.push(tok.parse::<usize>().map_err(|_| PnmError::BadValue(tok.to_string()))?);
        }
        v
    } else {
        hdr.raster().iter().take(n).map(|&b| b as usize).collect()
    };
    if raw.len() < n {
        return Err(PnmError::Truncated {
            expected: n,
            found: raw.len(),
            unit: "samples",
        });
    }
    let data = raw
        .into_iter()
        .map(|v| {
            if v > maxval {
                Err(PnmError::BadValue(v.to_string()))
            } else {
                Ok((v * 255 / maxval) as u8)
            }
        })
        .collect::<Result<Vec<u8>, _>>()?;
    GrayImage::from_data(height, width, data).map_err(|e| PnmError::BadHeader(e.to_string()))
}
