//! Binary and grayscale rasters, thresholding, nearest-neighbour scaling,
//! minimal bounding boxes and the octant partition of a box.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImagingError {
    #[error("image contains no black pixel")]
    EmptyImage,
    #[error("invalid image dimensions {height}x{width}")]
    BadDimensions { height: usize, width: usize },
    #[error("pixel buffer holds {got} values, expected {expected}")]
    BadPixelCount { expected: usize, got: usize },
}

/// Row-major black/white raster. `true` is black (ink).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    height: usize,
    width: usize,
    pixels: Vec<bool>,
}

impl BinaryImage {
    /// All-white image.
    pub fn new(height: usize, width: usize) -> Result<Self, ImagingError> {
        Self::filled(height, width, false)
    }

    pub fn filled(height: usize, width: usize, black: bool) -> Result<Self, ImagingError> {
        if height == 0 || width == 0 {
            return Err(ImagingError::BadDimensions { height, width });
        }
        Ok(Self {
            height,
            width,
            pixels: vec![black; height * width],
        })
    }

    pub fn from_pixels(height: usize, width: usize, pixels: Vec<bool>) -> Result<Self, ImagingError> {
        if height == 0 || width == 0 {
            return Err(ImagingError::BadDimensions { height, width });
        }
        if pixels.len() != height * width {
            return Err(ImagingError::BadPixelCount {
                expected: height * width,
                got: pixels.len(),
            });
        }
        Ok(Self { height, width, pixels })
    }

    /// Parse rows of `#` (black) and `.` (white). Handy for tests and fixtures.
    pub fn from_ascii(rows: &[&str]) -> Result<Self, ImagingError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut pixels = Vec::with_capacity(height * width);
        for row in rows {
            if row.chars().count() != width {
                return Err(ImagingError::BadDimensions { height, width });
            }
            pixels.extend(row.chars().map(|c| c == '#'));
        }
        Self::from_pixels(height, width, pixels)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.width + col]
    }

    /// Like [`get`](Self::get) but treats out-of-range coordinates as white.
    #[inline]
    pub fn get_signed(&self, row: isize, col: isize) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.height
            && (col as usize) < self.width
            && self.get(row as usize, col as usize)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, black: bool) {
        self.pixels[row * self.width + col] = black;
    }

    pub fn black_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    /// Iterate `(row, col)` of black pixels in row-major order.
    pub fn black_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(move |(i, _)| (i / w, i % w))
    }

    /// Copy of the sub-rectangle covered by `bbox`.
    pub fn crop(&self, bbox: &BoundingBox) -> BinaryImage {
        let mut pixels = Vec::with_capacity(bbox.h * bbox.w);
        for r in bbox.top..bbox.top + bbox.h {
            let start = r * self.width + bbox.left;
            pixels.extend_from_slice(&self.pixels[start..start + bbox.w]);
        }
        BinaryImage {
            height: bbox.h,
            width: bbox.w,
            pixels,
        }
    }

    /// Gray image with black mapped to 0 and white to 255.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            height: self.height,
            width: self.width,
            data: self.pixels.iter().map(|&b| if b { 0 } else { 255 }).collect(),
        }
    }
}

impl fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryImage {}x{}", self.height, self.width)?;
        for r in 0..self.height {
            for c in 0..self.width {
                f.write_str(if self.get(r, c) { "#" } else { "." })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Row-major 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn from_data(height: usize, width: usize, data: Vec<u8>) -> Result<Self, ImagingError> {
        if height == 0 || width == 0 {
            return Err(ImagingError::BadDimensions { height, width });
        }
        if data.len() != height * width {
            return Err(ImagingError::BadPixelCount {
                expected: height * width,
                got: data.len(),
            });
        }
        Ok(Self { height, width, data })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    /// Nearest-neighbour resize using the same index mapping as [`scale_to`].
    pub fn scale_to(&self, out_h: usize, out_w: usize) -> Result<GrayImage, ImagingError> {
        if out_h == 0 || out_w == 0 {
            return Err(ImagingError::BadDimensions {
                height: out_h,
                width: out_w,
            });
        }
        let mut data = Vec::with_capacity(out_h * out_w);
        for r in 0..out_h {
            let src_r = r * self.height / out_h;
            for c in 0..out_w {
                data.push(self.get(src_r, c * self.width / out_w));
            }
        }
        GrayImage::from_data(out_h, out_w, data)
    }
}

/// Axis-aligned rectangle `[top, top + h) x [left, left + w)` in pixel units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundingBox {
    pub top: usize,
    pub left: usize,
    pub h: usize,
    pub w: usize,
}

impl BoundingBox {
    pub fn new(top: usize, left: usize, h: usize, w: usize) -> Self {
        debug_assert!(h >= 1 && w >= 1);
        Self { top, left, h, w }
    }

    pub fn bottom(&self) -> usize {
        self.top + self.h
    }

    pub fn right(&self) -> usize {
        self.left + self.w
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.top && row < self.bottom() && col >= self.left && col < self.right()
    }

    /// Continuous centre `(row, col)`.
    pub fn center(&self) -> (f64, f64) {
        (
            self.top as f64 + self.h as f64 / 2.0,
            self.left as f64 + self.w as f64 / 2.0,
        )
    }

    pub fn diagonal(&self) -> f64 {
        (self.h as f64).hypot(self.w as f64)
    }
}

/// One of the eight triangular sectors of a bounding box, numbered
/// clockwise on screen starting just below the right half of the horizontal
/// midline (angle measured from +columns toward +rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OctantId(u8);

impl OctantId {
    pub const ALL: [OctantId; 8] = [
        OctantId(0),
        OctantId(1),
        OctantId(2),
        OctantId(3),
        OctantId(4),
        OctantId(5),
        OctantId(6),
        OctantId(7),
    ];

    pub fn new(index: u8) -> Option<Self> {
        (index < 8).then_some(Self(index))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Black iff `intensity < threshold`.
pub fn binarize(img: &GrayImage, threshold: u8) -> BinaryImage {
    BinaryImage {
        height: img.height,
        width: img.width,
        pixels: img.data.iter().map(|&v| v < threshold).collect(),
    }
}

/// Otsu's threshold for the rule "black iff intensity < t".
///
/// Scans every `t` in `0..=255` and keeps the one maximising the between-class
/// variance, preferring the smallest `t` on ties. Returns 128 when no
/// threshold separates the pixels into two non-empty classes.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in &img.data {
        hist[v as usize] += 1;
    }
    let total: u64 = hist.iter().sum();
    let total_sum: u64 = hist.iter().enumerate().map(|(v, &n)| v as u64 * n).sum();

    let mut best: Option<(u8, f64)> = None;
    let (mut n_low, mut sum_low) = (0u64, 0u64);
    for t in 0..=255usize {
        // Class "low" holds intensities < t.
        if t > 0 {
            n_low += hist[t - 1];
            sum_low += (t as u64 - 1) * hist[t - 1];
        }
        let n_high = total - n_low;
        if n_low == 0 || n_high == 0 {
            continue;
        }
        let mean_low = sum_low as f64 / n_low as f64;
        let mean_high = (total_sum - sum_low) as f64 / n_high as f64;
        let diff = mean_low - mean_high;
        let var = n_low as f64 * n_high as f64 * diff * diff;
        if best.is_none_or(|(_, v)| var > v) {
            best = Some((t as u8, var));
        }
    }
    best.map_or(128, |(t, _)| t)
}

/// Nearest-neighbour resize: output `(r, c)` copies input
/// `(r * height / out_h, c * width / out_w)`.
pub fn scale_to(img: &BinaryImage, out_h: usize, out_w: usize) -> Result<BinaryImage, ImagingError> {
    if out_h == 0 || out_w == 0 {
        return Err(ImagingError::BadDimensions {
            height: out_h,
            width: out_w,
        });
    }
    let mut pixels = Vec::with_capacity(out_h * out_w);
    for r in 0..out_h {
        let src_r = r * img.height / out_h;
        for c in 0..out_w {
            pixels.push(img.get(src_r, c * img.width / out_w));
        }
    }
    Ok(BinaryImage {
        height: out_h,
        width: out_w,
        pixels,
    })
}

/// Smallest axis-aligned rectangle enclosing every black pixel.
pub fn minimal_bounding_box(img: &BinaryImage) -> Result<BoundingBox, ImagingError> {
    let mut rows = (usize::MAX, 0usize);
    let mut cols = (usize::MAX, 0usize);
    for (r, c) in img.black_pixels() {
        rows = (rows.0.min(r), rows.1.max(r));
        cols = (cols.0.min(c), cols.1.max(c));
    }
    if rows.0 == usize::MAX {
        return Err(ImagingError::EmptyImage);
    }
    Ok(BoundingBox {
        top: rows.0,
        left: cols.0,
        h: rows.1 - rows.0 + 1,
        w: cols.1 - cols.0 + 1,
    })
}

/// Octant of the pixel `(row, col)` inside `bbox`.
///
/// The angle is taken in box-normalised coordinates, so the sector borders are
/// exactly the two midlines and the two diagonals of the box even when it is
/// not square. All comparisons are done in integers (doubled coordinates
/// scaled by the box size), so pixels on a border are classified exactly: a
/// border ray belongs to the sector it starts. The centre pixel maps to 0.
pub fn octant_of(row: usize, col: usize, bbox: &BoundingBox) -> OctantId {
    // Offsets from the centre in half-pixel units: 2*(col+0.5) - 2*cx.
    let dx2 = 2 * col as i64 + 1 - (2 * bbox.left as i64 + bbox.w as i64);
    let dy2 = 2 * row as i64 + 1 - (2 * bbox.top as i64 + bbox.h as i64);
    // Normalise so that the box becomes a square: multiply x by h and y by w.
    let a = dx2 * bbox.h as i64;
    let b = dy2 * bbox.w as i64;
    OctantId(sector_of(a, b))
}

/// Sector `floor(atan2(b, a) / 45deg)` with the angle in `[0, 360)`, evaluated
/// exactly on integers. `(0, 0)` maps to 0.
pub(crate) fn sector_of(a: i64, b: i64) -> u8 {
    if a == 0 && b == 0 {
        return 0;
    }
    if b >= 0 && a > 0 {
        if b < a {
            0
        } else {
            1
        }
    } else if a <= 0 && b > 0 {
        if b > -a {
            2
        } else {
            3
        }
    } else if a < 0 && b <= 0 {
        if b > a {
            4
        } else {
            5
        }
    } else if a >= 0 && b < 0 {
        if a < -b {
            6
        } else {
            7
        }
    } else {
        unreachable!("all sign combinations covered")
    }
}
