//! Brute-force reference implementations of the feature extractors and
//! random image generators shared by the integration tests.
//!
//! The oracles only use the public image accessors. Geometry is redone from
//! scratch: octants by `atan2`, triangles by angle, runs by walking every
//! line, centres of gravity by recursion.

#![allow(dead_code)]

use numeral_ocr::rng::SplitMix64;
use numeral_ocr::BinaryImage;

#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub top: usize,
    pub left: usize,
    pub h: usize,
    pub w: usize,
}

/// Random image of `h x w` whose black pixels fall inside a random
/// sub-rectangle, with at least one black pixel.
pub fn random_image(rng: &mut SplitMix64, h: usize, w: usize) -> BinaryImage {
    let density = rng.uniform(0.03, 0.7);
    let sub_h = 1 + rng.below(h as u64) as usize;
    let sub_w = 1 + rng.below(w as u64) as usize;
    let top = rng.below((h - sub_h + 1) as u64) as usize;
    let left = rng.below((w - sub_w + 1) as u64) as usize;
    let mut img = BinaryImage::new(h, w).unwrap();
    for r in top..top + sub_h {
        for c in left..left + sub_w {
            if rng.next_f64() < density {
                img.set(r, c, true);
            }
        }
    }
    if img.black_count() == 0 {
        img.set(top + sub_h / 2, left + sub_w / 2, true);
    }
    img
}

/// Random image with a random size in `8..=32` on both axes.
pub fn random_small_image(rng: &mut SplitMix64) -> BinaryImage {
    let h = 8 + rng.below(25) as usize;
    let w = 8 + rng.below(25) as usize;
    random_image(rng, h, w)
}

pub fn bounding_rect(img: &BinaryImage) -> Rect {
    let (mut r0, mut c0, mut r1, mut c1) = (usize::MAX, usize::MAX, 0, 0);
    for r in 0..img.height() {
        for c in 0..img.width() {
            if img.get(r, c) {
                r0 = r0.min(r);
                c0 = c0.min(c);
                r1 = r1.max(r);
                c1 = c1.max(c);
            }
        }
    }
    assert!(r0 != usize::MAX, "image has no black pixel");
    Rect {
        top: r0,
        left: c0,
        h: r1 - r0 + 1,
        w: c1 - c0 + 1,
    }
}

/// Octant of a pixel from the angle of its centre in box-normalised
/// coordinates, 0 degrees along +columns and 90 along +rows.
pub fn octant(r: usize, c: usize, b: &Rect) -> usize {
    let u = (c as f64 + 0.5 - (b.left as f64 + b.w as f64 / 2.0)) / b.w as f64;
    let v = (r as f64 + 0.5 - (b.top as f64 + b.h as f64 / 2.0)) / b.h as f64;
    if u == 0.0 && v == 0.0 {
        return 0;
    }
    let mut deg = v.atan2(u).to_degrees();
    if deg < 0.0 {
        deg += 360.0;
    }
    let mut q = deg / 45.0;
    if (q - q.round()).abs() < 1e-9 {
        q = q.round();
    }
    (q.floor() as usize) % 8
}

type Pt = (f64, f64);

/// Point where the ray from the box centre at `deg` (a multiple of 45)
/// leaves the box, as `(row, col)`.
fn boundary_point(b: &Rect, deg: f64) -> Pt {
    let (s, c) = deg.to_radians().sin_cos();
    let scale = 0.5 / s.abs().max(c.abs());
    let snap = |x: f64| (x * 2.0).round() / 2.0;
    let (u, v) = (snap(c * scale), snap(s * scale));
    (
        b.top as f64 + b.h as f64 / 2.0 + v * b.h as f64,
        b.left as f64 + b.w as f64 / 2.0 + u * b.w as f64,
    )
}

/// `[centre, edge midpoint, corner]` of octant `k`.
pub fn triangle(b: &Rect, k: usize) -> [Pt; 3] {
    let centre = (b.top as f64 + b.h as f64 / 2.0, b.left as f64 + b.w as f64 / 2.0);
    let start = boundary_point(b, 45.0 * k as f64);
    let end = boundary_point(b, 45.0 * (k + 1) as f64);
    if k.is_multiple_of(2) {
        [centre, start, end]
    } else {
        [centre, end, start]
    }
}

fn pixels_of_octant(img: &BinaryImage, b: &Rect, k: usize) -> Vec<(Pt, bool)> {
    let mut out = Vec::new();
    for r in b.top..b.top + b.h {
        for c in b.left..b.left + b.w {
            if octant(r, c, b) == k {
                out.push(((r as f64 + 0.5, c as f64 + 0.5), img.get(r, c)));
            }
        }
    }
    out
}

pub fn shadow72(img: &BinaryImage) -> Vec<f64> {
    let b = bounding_rect(img);
    let mut out = Vec::new();
    for k in 0..8 {
        let [centre, mid, corner] = triangle(&b, k);
        let pixels = pixels_of_octant(img, &b, k);
        let any_black = pixels.iter().any(|p| p.1);
        for (a, z) in [(mid, corner), (centre, mid), (centre, corner)] {
            if !any_black {
                out.extend([0.0, 0.0, 0.0]);
                continue;
            }
            let len = ((z.0 - a.0).powi(2) + (z.1 - a.1).powi(2)).sqrt();
            let unit = ((z.0 - a.0) / len, (z.1 - a.1) / len);
            let n = (len.ceil() as usize).max(1);
            let mut reachable = vec![false; n];
            let mut shaded = vec![false; n];
            for &((pr, pc), black) in &pixels {
                let s = (pr - a.0) * unit.0 + (pc - a.1) * unit.1;
                let bin = (s.floor().max(0.0) as usize).min(n - 1);
                reachable[bin] = true;
                if black {
                    shaded[bin] = true;
                }
            }
            let seq: Vec<bool> = (0..n).filter(|&i| reachable[i]).map(|i| shaded[i]).collect();
            let total = seq.len() as f64;
            let hits: Vec<usize> = (0..seq.len()).filter(|&i| seq[i]).collect();
            out.push(hits.len() as f64 / total);
            out.push(hits[0] as f64 / total);
            out.push((hits[hits.len() - 1] + 1) as f64 / total);
        }
    }
    out
}

pub fn centroid16(img: &BinaryImage) -> Vec<f64> {
    let b = bounding_rect(img);
    let mut out = Vec::new();
    for k in 0..8 {
        let black: Vec<Pt> = pixels_of_octant(img, &b, k)
            .into_iter()
            .filter(|p| p.1)
            .map(|p| p.0)
            .collect();
        let (r, c) = if black.is_empty() {
            let t = triangle(&b, k);
            ((t[0].0 + t[1].0 + t[2].0) / 3.0, (t[0].1 + t[1].1 + t[2].1) / 3.0)
        } else {
            let n = black.len() as f64;
            (
                black.iter().map(|p| p.0).sum::<f64>() / n,
                black.iter().map(|p| p.1).sum::<f64>() / n,
            )
        };
        out.push((r - b.top as f64) / b.h as f64);
        out.push((c - b.left as f64) / b.w as f64);
    }
    out
}

/// Ray marching with an arbitrary step from the four box corners.
pub fn angular16(img: &BinaryImage, step: f64) -> Vec<f64> {
    let b = bounding_rect(img);
    let (t, l) = (b.top as f64, b.left as f64);
    let (bot, rt) = (t + b.h as f64, l + b.w as f64);
    let diag = ((b.h * b.h + b.w * b.w) as f64).sqrt();
    let origins = [
        ((t, l), (1.0, 1.0)),
        ((t, rt), (1.0, -1.0)),
        ((bot, rt), (-1.0, -1.0)),
        ((bot, l), (-1.0, 1.0)),
    ];
    let mut out = Vec::new();
    for ((r0, c0), (sr, sc)) in origins {
        for deg in [0.0f64, 22.5, 45.0, 67.5] {
            let (dr, dc) = (sr * deg.to_radians().sin(), sc * deg.to_radians().cos());
            let mut value = 1.0;
            let mut i = 0usize;
            loop {
                let d = i as f64 * step;
                let (y, x) = (r0 + d * dr, c0 + d * dc);
                let eps = 1e-9;
                if y < t - eps || y > bot + eps || x < l - eps || x > rt + eps {
                    break;
                }
                let py = (y.max(t).floor() as usize).min(b.top + b.h - 1);
                let px = (x.max(l).floor() as usize).min(b.left + b.w - 1);
                if img.get(py, px) {
                    value = (d / diag).min(1.0);
                    break;
                }
                i += 1;
            }
            out.push(value);
        }
    }
    out
}

fn left_margin(img: &BinaryImage, r: usize) -> usize {
    (0..32).find(|&c| img.get(r, c)).unwrap_or(32)
}

fn right_margin(img: &BinaryImage, r: usize) -> usize {
    (0..32).find(|&k| img.get(r, 31 - k)).unwrap_or(32)
}

fn top_margin(img: &BinaryImage, c: usize) -> usize {
    (0..32).find(|&r| img.get(r, c)).unwrap_or(32)
}

fn bottom_margin(img: &BinaryImage, c: usize) -> usize {
    (0..32).find(|&k| img.get(31 - k, c)).unwrap_or(32)
}

pub fn span8(img: &BinaryImage) -> Vec<f64> {
    let mut out = Vec::new();
    for band in 0..4 {
        let rows = band * 8..band * 8 + 8;
        let l: usize = rows.clone().map(|r| left_margin(img, r)).sum();
        let r: usize = rows.map(|r| right_margin(img, r)).sum();
        out.push(l as f64 / 8.0 / 32.0);
        out.push(r as f64 / 8.0 / 32.0);
    }
    out
}

pub fn span128(img: &BinaryImage) -> Vec<f64> {
    let mut out = Vec::new();
    for r in 0..32 {
        out.push(left_margin(img, r) as f64 / 32.0);
        out.push(right_margin(img, r) as f64 / 32.0);
    }
    for c in 0..32 {
        out.push(top_margin(img, c) as f64 / 32.0);
        out.push(bottom_margin(img, c) as f64 / 32.0);
    }
    out
}

/// Half-open `[top, bottom) x [left, right)`.
type Reg = (usize, usize, usize, usize);

fn gravity(img: &BinaryImage, (top, left, bottom, right): Reg) -> Pt {
    let cells: Vec<Pt> = (top..bottom)
        .flat_map(|r| (left..right).map(move |c| (r, c)))
        .filter(|&(r, c)| img.get(r, c))
        .map(|(r, c)| (r as f64 + 0.5, c as f64 + 0.5))
        .collect();
    if cells.is_empty() {
        return ((top + bottom) as f64 / 2.0, (left + right) as f64 / 2.0);
    }
    let n = cells.len() as f64;
    (
        cells.iter().map(|p| p.0).sum::<f64>() / n,
        cells.iter().map(|p| p.1).sum::<f64>() / n,
    )
}

fn split_at(v: f64, lo: usize, hi: usize) -> usize {
    let s = v.round() as i64;
    let (a, z) = if hi - lo >= 2 {
        (lo as i64 + 1, hi as i64 - 1)
    } else {
        (lo as i64, hi as i64)
    };
    s.max(a).min(z) as usize
}

fn quarters(img: &BinaryImage, reg: Reg) -> [Reg; 4] {
    let (top, left, bottom, right) = reg;
    let g = gravity(img, reg);
    let sr = split_at(g.0, top, bottom);
    let sc = split_at(g.1, left, right);
    [
        (top, left, sr, sc),
        (top, sc, sr, right),
        (sr, left, bottom, sc),
        (sr, sc, bottom, right),
    ]
}

pub fn dcg40(img: &BinaryImage) -> Vec<f64> {
    let level1 = quarters(img, (0, 0, 32, 32));
    let mut out = Vec::new();
    for &reg in &level1 {
        let g = gravity(img, reg);
        out.extend([g.0 / 32.0, g.1 / 32.0]);
    }
    for &reg in &level1 {
        for child in quarters(img, reg) {
            let g = gravity(img, child);
            out.extend([g.0 / 32.0, g.1 / 32.0]);
        }
    }
    out
}

/// Every cell of the full image line through `(r, c)` along `dir`, in order.
fn full_line(img: &BinaryImage, r: usize, c: usize, dir: (i64, i64)) -> Vec<(usize, usize)> {
    let inside = |y: i64, x: i64| y >= 0 && x >= 0 && (y as usize) < img.height() && (x as usize) < img.width();
    let (mut y, mut x) = (r as i64, c as i64);
    while inside(y - dir.0, x - dir.1) {
        y -= dir.0;
        x -= dir.1;
    }
    let mut cells = Vec::new();
    while inside(y, x) {
        cells.push((y as usize, x as usize));
        y += dir.0;
        x += dir.1;
    }
    cells
}

pub fn run36(img: &BinaryImage) -> Vec<f64> {
    let b = bounding_rect(img);
    let (rh, rw) = (b.h.div_ceil(2), b.w.div_ceil(2));
    let dirs = [(0i64, 1i64), (1, 0), (-1, 1), (1, 1)];
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let top = b.top + i * b.h / 4;
            let left = b.left + j * b.w / 4;
            let bottom = (top + rh).min(b.top + b.h);
            let right = (left + rw).min(b.left + b.w);
            let in_region = |(y, x): (usize, usize)| y >= top && y < bottom && x >= left && x < right;
            for dir in dirs {
                // Identify each line by its first cell in the image.
                let mut lines: Vec<Vec<(usize, usize)>> = Vec::new();
                for y in top..bottom {
                    for x in left..right {
                        let line = full_line(img, y, x, dir);
                        if !lines.iter().any(|l| l[0] == line[0]) {
                            lines.push(line);
                        }
                    }
                }
                let mut total = 0usize;
                for line in &lines {
                    let mut best = 0usize;
                    let mut k = 0;
                    while k < line.len() {
                        if !img.get(line[k].0, line[k].1) {
                            k += 1;
                            continue;
                        }
                        let start = k;
                        while k < line.len() && img.get(line[k].0, line[k].1) {
                            k += 1;
                        }
                        if line[start..k].iter().any(|&p| in_region(p)) {
                            best = best.max(k - start);
                        }
                    }
                    total += best;
                }
                out.push((total as f64 / (b.h * b.w) as f64).min(1.0));
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
