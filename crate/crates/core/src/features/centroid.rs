use crate::imaging::{minimal_bounding_box, octant_of, BinaryImage, BoundingBox, OctantId};

use super::octants::octant_triangle;
use super::{FeatureError, FeatureVector};

/// Mean black-pixel position per octant, normalised to the bounding box as
/// `((row - top) / h, (col - left) / w)`. An octant with no black pixel
/// reports the centroid of its triangle instead.
pub fn centroid16(img: &BinaryImage) -> Result<FeatureVector, FeatureError> {
    let bbox = minimal_bounding_box(img)?;
    // Work in box coordinates so translated glyphs give bit-identical output.
    let local = img.crop(&bbox);
    Ok(centroid16_in_box(&local, &BoundingBox::new(0, 0, bbox.h, bbox.w)))
}

pub(crate) fn centroid16_in_box(img: &BinaryImage, bbox: &BoundingBox) -> FeatureVector {
    let mut sums = [(0.0f64, 0.0f64, 0usize); 8];
    for r in bbox.top..bbox.bottom() {
        for c in bbox.left..bbox.right() {
            if img.get(r, c) {
                let acc = &mut sums[octant_of(r, c, bbox).index()];
                acc.0 += r as f64 + 0.5;
                acc.1 += c as f64 + 0.5;
                acc.2 += 1;
            }
        }
    }

    let (top, left) = (bbox.top as f64, bbox.left as f64);
    let (h, w) = (bbox.h as f64, bbox.w as f64);
    let mut out = Vec::with_capacity(16);
    for octant in OctantId::ALL {
        let (sr, sc, n) = sums[octant.index()];
        let (row, col) = if n > 0 {
            (sr / n as f64, sc / n as f64)
        } else {
            let t = octant_triangle(bbox, octant);
            ((t[0].0 + t[1].0 + t[2].0) / 3.0, (t[0].1 + t[1].1 + t[2].1) / 3.0)
        };
        out.push(((row - top) / h).clamp(0.0, 1.0));
        out.push(((col - left) / w).clamp(0.0, 1.0));
    }
    FeatureVector::new(out)
}
