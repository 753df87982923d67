//! Continuous geometry of the eight octant triangles of a bounding box.

use crate::imaging::{BoundingBox, OctantId};

/// Point in continuous image coordinates `(row, col)`.
pub type Point = (f64, f64);

/// The three sides of an octant triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OctantSide {
    /// Half of a box edge, from the edge midpoint to the corner.
    Perimeter,
    /// Half of a midline, from the box centre to the edge midpoint.
    Midline,
    /// Half of a diagonal, from the box centre to the corner.
    Diagonal,
}

impl OctantSide {
    pub const ALL: [OctantSide; 3] = [OctantSide::Perimeter, OctantSide::Midline, OctantSide::Diagonal];
}

/// Offsets (in half box sizes, `(row, col)`) of the edge midpoint and the
/// corner bounding each octant.
const MIDPOINT: [(f64, f64); 8] = [
    (0.0, 1.0),
    (1.0, 0.0),
    (1.0, 0.0),
    (0.0, -1.0),
    (0.0, -1.0),
    (-1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
];
const CORNER: [(f64, f64); 8] = [
    (1.0, 1.0),
    (1.0, 1.0),
    (1.0, -1.0),
    (1.0, -1.0),
    (-1.0, -1.0),
    (-1.0, -1.0),
    (-1.0, 1.0),
    (-1.0, 1.0),
];

/// Vertices `[centre, edge midpoint, corner]` of the octant triangle.
pub fn octant_triangle(bbox: &BoundingBox, octant: OctantId) -> [Point; 3] {
    let (cr, cc) = bbox.center();
    let (hr, hc) = (bbox.h as f64 / 2.0, bbox.w as f64 / 2.0);
    let at = |(dr, dc): (f64, f64)| (cr + dr * hr, cc + dc * hc);
    let k = octant.index();
    [(cr, cc), at(MIDPOINT[k]), at(CORNER[k])]
}

/// Start and end points of one side of an octant triangle. Sides are
/// oriented away from the box centre (the perimeter side starts at the edge
/// midpoint).
pub fn side_segment(bbox: &BoundingBox, octant: OctantId, side: OctantSide) -> (Point, Point) {
    let [c, m, k] = octant_triangle(bbox, octant);
    match side {
        OctantSide::Perimeter => (m, k),
        OctantSide::Midline => (c, m),
        OctantSide::Diagonal => (c, k),
    }
}
