use crate::imaging::BinaryImage;

use super::{require_frame, FeatureError, FeatureVector, FRAME};

/// Half-open pixel rectangle `[top, bottom) x [left, right)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Region {
    pub top: usize,
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
}

impl Region {
    fn geometric_center(&self) -> (f64, f64) {
        (
            (self.top + self.bottom) as f64 / 2.0,
            (self.left + self.right) as f64 / 2.0,
        )
    }

    /// Mean black pixel centre, or the geometric centre for an empty region.
    pub(crate) fn center_of_gravity(&self, img: &BinaryImage) -> (f64, f64) {
        let (mut sr, mut sc, mut n) = (0.0, 0.0, 0usize);
        for r in self.top..self.bottom {
            for c in self.left..self.right {
                if img.get(r, c) {
                    sr += r as f64 + 0.5;
                    sc += c as f64 + 0.5;
                    n += 1;
                }
            }
        }
        if n == 0 {
            self.geometric_center()
        } else {
            (sr / n as f64, sc / n as f64)
        }
    }

    /// Split into (top-left, top-right, bottom-left, bottom-right) at the
    /// rounded position `at`, kept strictly inside the region along every axis
    /// spanning at least two pixels.
    pub(crate) fn split(&self, at: (f64, f64)) -> [Region; 4] {
        let split_line = |v: f64, lo: usize, hi: usize| -> usize {
            let s = v.round().max(0.0) as usize;
            if hi - lo >= 2 {
                s.clamp(lo + 1, hi - 1)
            } else {
                s.clamp(lo, hi)
            }
        };
        let sr = split_line(at.0, self.top, self.bottom);
        let sc = split_line(at.1, self.left, self.right);
        [
            Region {
                top: self.top,
                left: self.left,
                bottom: sr,
                right: sc,
            },
            Region {
                top: self.top,
                left: sc,
                bottom: sr,
                right: self.right,
            },
            Region {
                top: sr,
                left: self.left,
                bottom: self.bottom,
                right: sc,
            },
            Region {
                top: sr,
                left: sc,
                bottom: self.bottom,
                right: self.right,
            },
        ]
    }
}

/// Dynamic centre of gravity: the frame is split into four at its centre of
/// gravity and each part once more at its own, giving 4 + 16 points emitted
/// as `(row / 32, col / 32)`.
pub fn dcg40(img: &BinaryImage) -> Result<FeatureVector, FeatureError> {
    require_frame(img)?;
    if img.black_count() == 0 {
        return Err(FeatureError::EmptyImage);
    }
    let root = Region {
        top: 0,
        left: 0,
        bottom: FRAME,
        right: FRAME,
    };
    let level1 = root.split(root.center_of_gravity(img));
    let cg1: Vec<(f64, f64)> = level1.iter().map(|r| r.center_of_gravity(img)).collect();

    let n = FRAME as f64;
    let mut out = Vec::with_capacity(40);
    for &(r, c) in &cg1 {
        out.push(r / n);
        out.push(c / n);
    }
    for (region, &cg) in level1.iter().zip(&cg1) {
        for child in region.split(cg) {
            let (r, c) = child.center_of_gravity(img);
            out.push(r / n);
            out.push(c / n);
        }
    }
    Ok(FeatureVector::new(out))
}
