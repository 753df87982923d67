//! Deterministic synthetic numerals: stroke templates of the ten
//! Arabic-Indic digit shapes, rasterised onto the 32x32 frame and perturbed
//! by translation, stroke thickness and pixel-flip noise.

use crate::features::FRAME;
use crate::imaging::BinaryImage;
use crate::rng::{derive_seed, SplitMix64};

use super::{Dataset, Sample};

type Stroke = Vec<(f64, f64)>;

fn ellipse(center: (f64, f64), radii: (f64, f64), points: usize) -> Stroke {
    (0..=points)
        .map(|i| {
            let t = i as f64 / points as f64 * std::f64::consts::TAU;
            (center.0 + radii.0 * t.sin(), center.1 + radii.1 * t.cos())
        })
        .collect()
}

/// Polylines `(row, col)` of each digit class, in frame coordinates.
pub fn glyph_strokes(class: usize) -> Vec<Stroke> {
    match class {
        // Sifr: a small diamond.
        0 => vec![vec![
            (12.5, 16.0),
            (16.0, 19.5),
            (19.5, 16.0),
            (16.0, 12.5),
            (12.5, 16.0),
        ]],
        1 => vec![vec![(5.0, 15.0), (27.0, 17.0)]],
        2 => vec![vec![(27.0, 13.0), (6.0, 13.0), (9.5, 17.0), (6.0, 21.0)]],
        3 => vec![vec![
            (27.0, 11.0),
            (6.0, 11.0),
            (9.5, 14.0),
            (6.0, 17.0),
            (9.5, 20.0),
            (5.0, 23.0),
        ]],
        4 => vec![vec![
            (6.0, 21.0),
            (6.0, 13.0),
            (11.0, 11.0),
            (14.0, 18.0),
            (16.5, 11.5),
            (22.0, 10.5),
            (27.0, 13.0),
            (27.0, 21.0),
        ]],
        5 => vec![ellipse((17.0, 16.0), (8.0, 6.5), 24)],
        6 => vec![vec![(6.0, 9.0), (7.0, 20.0), (27.0, 21.0)]],
        7 => vec![vec![(6.0, 8.0), (27.0, 16.0), (6.0, 24.0)]],
        8 => vec![vec![(27.0, 8.0), (6.0, 16.0), (27.0, 24.0)]],
        9 => vec![ellipse((11.0, 14.0), (5.0, 5.0), 20), vec![(11.0, 19.0), (27.0, 19.0)]],
        _ => panic!("digit class {class} out of range"),
    }
}

/// Rasterise `strokes` shifted by `(dr, dc)` with a square brush of side
/// `thickness`. Pixels falling outside the frame are dropped.
pub fn render(strokes: &[Stroke], shift: (i32, i32), thickness: usize) -> BinaryImage {
    let mut img = BinaryImage::new(FRAME, FRAME).expect("frame is non-empty");
    let mut plot = |r: f64, c: f64| {
        let (r0, c0) = (r.floor() as i64 + shift.0 as i64, c.floor() as i64 + shift.1 as i64);
        for dr in 0..thickness as i64 {
            for dc in 0..thickness as i64 {
                let (rr, cc) = (r0 + dr, c0 + dc);
                if (0..FRAME as i64).contains(&rr) && (0..FRAME as i64).contains(&cc) {
                    img.set(rr as usize, cc as usize, true);
                }
            }
        }
    };
    for stroke in strokes {
        for seg in stroke.windows(2) {
            let ((r0, c0), (r1, c1)) = (seg[0], seg[1]);
            let steps = ((r1 - r0).abs().max((c1 - c0).abs()) * 8.0).ceil().max(1.0) as usize;
            for i in 0..=steps {
                let t = i as f64 / steps as f64;
                plot(r0 + t * (r1 - r0), c0 + t * (c1 - c0));
            }
        }
    }
    img
}

/// Unperturbed render of a class template.
pub fn clean_template(class: usize) -> BinaryImage {
    render(&glyph_strokes(class), (0, 0), 1)
}

/// Perturbation parameters for [`generate_synthetic_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    /// Translations are drawn uniformly from `[-max_shift, max_shift]` on both axes.
    pub max_shift: i32,
    /// Stroke thickness is drawn uniformly from this inclusive range.
    pub thickness: (usize, usize),
    /// Independent per-pixel flip probability.
    pub flip_prob: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            max_shift: 2,
            thickness: (1, 2),
            flip_prob: 0.02,
        }
    }
}

impl SyntheticConfig {
    /// No translation, thin strokes, no noise.
    pub fn clean() -> Self {
        Self {
            max_shift: 0,
            thickness: (1, 1),
            flip_prob: 0.0,
        }
    }
}

/// `per_class` instances of each digit with the default perturbations.
pub fn generate_synthetic(per_class: usize, seed: u64) -> Dataset {
    generate_synthetic_with(per_class, seed, &SyntheticConfig::default())
}

/// Samples are ordered by class, then by instance index. Instance `i` of
/// class `k` depends only on `(seed, k, i)`.
pub fn generate_synthetic_with(per_class: usize, seed: u64, cfg: &SyntheticConfig) -> Dataset {
    let mut samples = Vec::with_capacity(10 * per_class);
    for class in 0..10usize {
        let strokes = glyph_strokes(class);
        for i in 0..per_class {
            let mut rng = SplitMix64::new(derive_seed(seed, &[class as u64, i as u64]));
            let span = (2 * cfg.max_shift + 1) as u64;
            let dr = rng.below(span) as i32 - cfg.max_shift;
            let dc = rng.below(span) as i32 - cfg.max_shift;
            let thickness = cfg.thickness.0 + rng.below((cfg.thickness.1 - cfg.thickness.0 + 1) as u64) as usize;
            let mut img = render(&strokes, (dr, dc), thickness);
            if cfg.flip_prob > 0.0 {
                for r in 0..FRAME {
                    for c in 0..FRAME {
                        if rng.next_f64() < cfg.flip_prob {
                            img.set(r, c, !img.get(r, c));
                        }
                    }
                }
            }
            // Noise could in principle wipe a glyph; keep every sample non-empty.
            if img.black_count() == 0 {
                img = render(&strokes, (dr, dc), thickness);
            }
            samples.push(Sample {
                image: img,
                label: class as u8,
                source: samples.len(),
            });
        }
    }
    Dataset { samples }
}

fn hamming(a: &BinaryImage, b: &BinaryImage) -> usize {
    a.pixels().iter().zip(b.pixels()).filter(|(x, y)| x != y).count()
}

/// Class of the clean template closest in Hamming distance (smallest class
/// on ties).
pub fn nearest_template(img: &BinaryImage) -> usize {
    (0..10)
        .min_by_key(|&k| (hamming(img, &clean_template(k)), k))
        .expect("ten classes")
}
