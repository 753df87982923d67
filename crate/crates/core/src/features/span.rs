use crate::imaging::BinaryImage;

use super::{require_frame, FeatureError, FeatureVector, FRAME};

const BANDS: usize = 4;

/// White pixels before the first black one, scanning `line` from its start.
fn margin(line: impl Iterator<Item = bool>) -> usize {
    let mut n = 0;
    for black in line {
        if black {
            break;
        }
        n += 1;
    }
    n
}

fn row_margins(img: &BinaryImage, r: usize) -> (usize, usize) {
    let w = img.width();
    (
        margin((0..w).map(|c| img.get(r, c))),
        margin((0..w).rev().map(|c| img.get(r, c))),
    )
}

fn col_margins(img: &BinaryImage, c: usize) -> (usize, usize) {
    let h = img.height();
    (
        margin((0..h).map(|r| img.get(r, c))),
        margin((0..h).rev().map(|r| img.get(r, c))),
    )
}

/// Effective span, coarse variant: mean left and right margins over four
/// horizontal bands of eight rows, each divided by the frame width.
pub fn span8(img: &BinaryImage) -> Result<FeatureVector, FeatureError> {
    require_frame(img)?;
    let band_rows = FRAME / BANDS;
    let mut out = Vec::with_capacity(2 * BANDS);
    for band in 0..BANDS {
        let (mut left, mut right) = (0usize, 0usize);
        for r in band * band_rows..(band + 1) * band_rows {
            let (l, rt) = row_margins(img, r);
            left += l;
            right += rt;
        }
        let denom = (band_rows * FRAME) as f64;
        out.push(left as f64 / denom);
        out.push(right as f64 / denom);
    }
    Ok(FeatureVector::new(out))
}

/// Effective span, full variant: `(left, right)` margins of every row, then
/// `(top, bottom)` margins of every column, each divided by 32.
pub fn span128(img: &BinaryImage) -> Result<FeatureVector, FeatureError> {
    require_frame(img)?;
    let n = FRAME as f64;
    let mut out = Vec::with_capacity(4 * FRAME);
    for r in 0..FRAME {
        let (l, rt) = row_margins(img, r);
        out.push(l as f64 / n);
        out.push(rt as f64 / n);
    }
    for c in 0..FRAME {
        let (t, b) = col_margins(img, c);
        out.push(t as f64 / n);
        out.push(b as f64 / n);
    }
    Ok(FeatureVector::new(out))
}
