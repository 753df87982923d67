use crate::imaging::{minimal_bounding_box, BinaryImage, BoundingBox};

use super::{FeatureError, FeatureVector};

/// Scan directions as `(d_row, d_col)`: rows, columns, the 45 degree
/// diagonal (up-right) and the 135 degree diagonal (down-right).
pub(crate) const DIRECTIONS: [(isize, isize); 4] = [(0, 1), (1, 0), (-1, 1), (1, 1)];

/// Length of the maximal black run through each pixel along `dir` (0 for
/// white pixels).
fn run_lengths(img: &BinaryImage, (dr, dc): (isize, isize)) -> Vec<usize> {
    let (h, w) = (img.height(), img.width());
    let mut lengths = vec![0usize; h * w];
    for r in 0..h {
        for c in 0..w {
            if !img.get(r, c) || lengths[r * w + c] != 0 {
                continue;
            }
            // Walk back to the start of the run, then forward across it.
            let (mut sr, mut sc) = (r as isize, c as isize);
            while img.get_signed(sr - dr, sc - dc) {
                sr -= dr;
                sc -= dc;
            }
            let mut cells = Vec::new();
            let (mut cr, mut cc) = (sr, sc);
            while img.get_signed(cr, cc) {
                cells.push(cr as usize * w + cc as usize);
                cr += dr;
                cc += dc;
            }
            for &i in &cells {
                lengths[i] = cells.len();
            }
        }
    }
    lengths
}

/// The nine overlapping regions of a bounding box, row-major: top-left
/// offsets `floor(i*h/4)`, `floor(j*w/4)` for `i, j` in `0..3`, size
/// `ceil(h/2) x ceil(w/2)`, clipped to the box.
pub(crate) fn run_regions(bbox: &BoundingBox) -> [BoundingBox; 9] {
    let (rh, rw) = (bbox.h.div_ceil(2), bbox.w.div_ceil(2));
    std::array::from_fn(|k| {
        let (i, j) = (k / 3, k % 3);
        let top = i * bbox.h / 4;
        let left = j * bbox.w / 4;
        BoundingBox::new(
            bbox.top + top,
            bbox.left + left,
            rh.min(bbox.h - top),
            rw.min(bbox.w - left),
        )
    })
}

/// Longest-run features over nine overlapping regions of the bounding box.
///
/// For every scan line crossing a region, the longest black run touching the
/// region's stretch of that line is measured over the whole line (runs may
/// extend past the region). The per-line maxima are summed, divided by
/// `h * w` of the bounding box and clamped to 1. Layout: regions row-major,
/// then (row, column, 45 degree, 135 degree).
pub fn run36(img: &BinaryImage) -> Result<FeatureVector, FeatureError> {
    let bbox = minimal_bounding_box(img)?;
    Ok(run36_in_box(img, &bbox))
}

pub(crate) fn run36_in_box(img: &BinaryImage, bbox: &BoundingBox) -> FeatureVector {
    let maps: Vec<Vec<usize>> = DIRECTIONS.iter().map(|&d| run_lengths(img, d)).collect();
    let w = img.width();
    let norm = (bbox.h * bbox.w) as f64;

    let mut out = Vec::with_capacity(36);
    for region in run_regions(bbox) {
        let (rh, rw) = (region.h, region.w);
        for (d, map) in maps.iter().enumerate() {
            // Scan line index of a region pixel at local offset (y, x).
            let (n_lines, line_of): (usize, fn(usize, usize, usize) -> usize) = match d {
                0 => (rh, |y, _, _| y),
                1 => (rw, |_, x, _| x),
                2 => (rh + rw - 1, |y, x, _| y + x),
                _ => (rh + rw - 1, |y, x, rw| y + rw - 1 - x),
            };
            let mut best = vec![0usize; n_lines];
            for y in 0..rh {
                for x in 0..rw {
                    let len = map[(region.top + y) * w + region.left + x];
                    let line = line_of(y, x, rw);
                    best[line] = best[line].max(len);
                }
            }
            let total: usize = best.iter().sum();
            out.push((total as f64 / norm).min(1.0));
        }
    }
    FeatureVector::new(out)
}
