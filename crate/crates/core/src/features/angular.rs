use crate::imaging::{minimal_bounding_box, BinaryImage};

use super::{FeatureError, FeatureVector};

const ANGLES_DEG: [f64; 4] = [0.0, 22.5, 45.0, 67.5];

/// Angular distances from the four bounding-box corners.
///
/// From each corner (top-left, top-right, bottom-right, bottom-left) four rays
/// leave at 0, 22.5, 45 and 67.5 degrees from the adjacent horizontal edge,
/// turning into the box. The feature is the distance along the ray to the
/// first point inside a black pixel, divided by the box diagonal, or 1.0 if
/// the ray leaves the box without meeting one. Distances are exact: each
/// black pixel is intersected with the ray as a closed unit square, and
/// contacts of zero length (a ray grazing a pixel corner) do not count.
pub fn angular16(img: &BinaryImage) -> Result<FeatureVector, FeatureError> {
    let bbox = minimal_bounding_box(img)?;
    let local = img.crop(&bbox);
    Ok(angular16_local(&local))
}

/// Entry and exit distances of the ray `origin + t * dir` through the closed
/// square `[r, r+1] x [c, c+1]`, if it crosses it over a positive length.
fn chord(origin: (f64, f64), dir: (f64, f64), (r, c): (f64, f64)) -> Option<f64> {
    const EPS: f64 = 1e-12;
    let (mut enter, mut exit) = (0.0f64, f64::INFINITY);
    for (o, d, lo) in [(origin.0, dir.0, r), (origin.1, dir.1, c)] {
        if d.abs() < EPS {
            if o < lo - EPS || o > lo + 1.0 + EPS {
                return None;
            }
        } else {
            let (a, b) = ((lo - o) / d, (lo + 1.0 - o) / d);
            enter = enter.max(a.min(b));
            exit = exit.min(a.max(b));
        }
    }
    (exit - enter > EPS).then_some(enter)
}

/// Features of an image that is exactly its own bounding box.
fn angular16_local(img: &BinaryImage) -> FeatureVector {
    let (h, w) = (img.height() as f64, img.width() as f64);
    let diag = h.hypot(w);
    let corners = [
        ((0.0, 0.0), (1.0, 1.0)),
        ((0.0, w), (1.0, -1.0)),
        ((h, w), (-1.0, -1.0)),
        ((h, 0.0), (-1.0, 1.0)),
    ];
    let black: Vec<(f64, f64)> = img.black_pixels().map(|(r, c)| (r as f64, c as f64)).collect();
    let mut out = Vec::with_capacity(16);
    for (origin, (sr, sc)) in corners {
        for deg in ANGLES_DEG {
            let (sin, cos) = deg.to_radians().sin_cos();
            let dir = (sr * sin, sc * cos);
            let first = black
                .iter()
                .filter_map(|&p| chord(origin, dir, p))
                .fold(f64::INFINITY, f64::min);
            out.push(if first.is_finite() {
                (first / diag).min(1.0)
            } else {
                1.0
            });
        }
    }
    FeatureVector::new(out)
}
