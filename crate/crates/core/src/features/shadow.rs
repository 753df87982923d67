use crate::imaging::{minimal_bounding_box, octant_of, BinaryImage, BoundingBox, OctantId};

use super::octants::{side_segment, OctantSide};
use super::{FeatureError, FeatureVector};

/// Shadow features: projections of each octant's black pixels onto the three
/// sides of that octant.
///
/// Every side is cut into `ceil(length)` unit bins and pixel centres are
/// projected perpendicularly onto it. The bins reachable from the octant's
/// pixels (black or white) form the largest possible shadow of that side;
/// the covered fraction, first covered position and one-past-last covered
/// position are all measured in units of that largest shadow, so a fully
/// black octant casts exactly `(1, 0, 1)` on every side.
///
/// Layout: octant 0..7, sides (perimeter, midline, diagonal), then
/// `(covered, first, last)`. Octants without black pixels emit zeros.
pub fn shadow72(img: &BinaryImage) -> Result<FeatureVector, FeatureError> {
    let bbox = minimal_bounding_box(img)?;
    Ok(shadow72_in_box(img, &bbox))
}

pub(crate) fn shadow72_in_box(img: &BinaryImage, bbox: &BoundingBox) -> FeatureVector {
    // Bucket pixel centres by octant once.
    let mut members: [Vec<(f64, f64, bool)>; 8] = Default::default();
    for r in bbox.top..bbox.bottom() {
        for c in bbox.left..bbox.right() {
            let o = octant_of(r, c, bbox).index();
            members[o].push((r as f64 + 0.5, c as f64 + 0.5, img.get(r, c)));
        }
    }

    let mut out = Vec::with_capacity(72);
    for octant in OctantId::ALL {
        let pixels = &members[octant.index()];
        let any_black = pixels.iter().any(|p| p.2);
        for side in OctantSide::ALL {
            if !any_black {
                out.extend_from_slice(&[0.0; 3]);
                continue;
            }
            let ((r0, c0), (r1, c1)) = side_segment(bbox, octant, side);
            let (dr, dc) = (r1 - r0, c1 - c0);
            let len = dr.hypot(dc);
            let bins = (len.ceil() as usize).max(1);
            let mut possible = vec![false; bins];
            let mut covered = vec![false; bins];
            for &(pr, pc, black) in pixels {
                let s = ((pr - r0) * dr + (pc - c0) * dc) / len;
                let bin = (s.floor().max(0.0) as usize).min(bins - 1);
                possible[bin] = true;
                covered[bin] |= black;
            }
            out.extend_from_slice(&shadow_triple(&possible, &covered));
        }
    }
    FeatureVector::new(out)
}

/// `(covered fraction, first, one-past-last)` over the compacted list of
/// reachable bins.
fn shadow_triple(possible: &[bool], covered: &[bool]) -> [f64; 3] {
    let reach: Vec<bool> = possible
        .iter()
        .zip(covered)
        .filter(|(&p, _)| p)
        .map(|(_, &c)| c)
        .collect();
    let n = reach.len() as f64;
    let hits = reach.iter().filter(|&&c| c).count();
    match (reach.iter().position(|&c| c), reach.iter().rposition(|&c| c)) {
        (Some(first), Some(last)) => [hits as f64 / n, first as f64 / n, (last + 1) as f64 / n],
        _ => [0.0; 3],
    }
}
