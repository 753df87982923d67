//! Labelled numeral images: PBM/PGM ingestion through a manifest, synthetic
//! generation, and the per-class train/test split.

mod pnm;
mod synthetic;

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::features::FRAME;
use crate::imaging::{binarize, minimal_bounding_box, otsu_threshold, scale_to, BinaryImage};
use crate::rng::{derive_seed, SplitMix64};

pub use pnm::{parse_pbm, parse_pgm, write_pbm, PbmVariant, PnmError};
pub use synthetic::{
    clean_template, generate_synthetic, generate_synthetic_with, glyph_strokes, nearest_template, render,
    SyntheticConfig,
};

pub const NUM_CLASSES: usize = 10;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("manifest line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{path}: {reason}")]
    Image { path: PathBuf, reason: String },
    #[error("manifest lists no samples")]
    EmptyManifest,
    #[error("class {class} has {available} samples, {required} required")]
    InsufficientSamples {
        class: usize,
        available: usize,
        required: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    /// Always 32x32.
    pub image: BinaryImage,
    pub label: u8,
    /// Manifest line number, or generation index for synthetic data.
    pub source: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut counts = [0; NUM_CLASSES];
        for s in &self.samples {
            counts[s.label as usize] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
}

/// Bring an arbitrary binary image onto the 32x32 frame: crop to the glyph's
/// bounding box and stretch it with nearest-neighbour sampling. Frame-sized
/// images are kept untouched.
pub fn normalize_binary(img: &BinaryImage) -> Result<BinaryImage, String> {
    if img.height() == FRAME && img.width() == FRAME {
        return Ok(img.clone());
    }
    let bbox = minimal_bounding_box(img).map_err(|e| e.to_string())?;
    scale_to(&img.crop(&bbox), FRAME, FRAME).map_err(|e| e.to_string())
}

/// Decode an image file's bytes into a frame-sized binary image. PBM input is
/// used as is; PGM input is scaled to the frame first and then thresholded
/// with Otsu's method.
pub fn decode_image(bytes: &[u8]) -> Result<BinaryImage, String> {
    match bytes.get(..2) {
        Some(b"P1") | Some(b"P4") => normalize_binary(&parse_pbm(bytes).map_err(|e| e.to_string())?),
        Some(b"P2") | Some(b"P5") => {
            let gray = parse_pgm(bytes).map_err(|e| e.to_string())?;
            let gray = gray.scale_to(FRAME, FRAME).map_err(|e| e.to_string())?;
            let img = binarize(&gray, otsu_threshold(&gray));
            if img.black_count() == 0 {
                return Err("image contains no black pixel after thresholding".into());
            }
            Ok(img)
        }
        _ => Err("not a PBM or PGM file".into()),
    }
}

/// Load the samples listed in a manifest (`relative/path.pbm,label` per
/// line, `#` comments and blank lines ignored). Paths are resolved against
/// `base`. The source id of each sample is its 1-based line number.
pub fn load_manifest(text: &str, base: &Path) -> Result<Dataset, DatasetError> {
    let mut samples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let entry = raw.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        let (path, label) = entry.rsplit_once(',').ok_or_else(|| DatasetError::Parse {
            line,
            reason: format!("expected `path,label`, got `{entry}`"),
        })?;
        let label: u8 = match label.trim().parse::<usize>() {
            Ok(l) if l < NUM_CLASSES => l as u8,
            Ok(l) => {
                return Err(DatasetError::Parse {
                    line,
                    reason: format!("label {l} out of range 0..=9"),
                })
            }
            Err(_) => {
                return Err(DatasetError::Parse {
                    line,
                    reason: format!("invalid label `{}`", label.trim()),
                })
            }
        };
        let path = base.join(path.trim());
        let image = std::fs::read(&path)
            .map_err(|e| e.to_string())
            .and_then(|bytes| decode_image(&bytes))
            .map_err(|reason| DatasetError::Image {
                path: path.clone(),
                reason,
            })?;
        samples.push(Sample {
            image,
            label,
            source: line,
        });
    }
    if samples.is_empty() {
        return Err(DatasetError::EmptyManifest);
    }
    Ok(Dataset { samples })
}

/// Read a manifest file; relative image paths resolve against its directory.
pub fn load_manifest_file(path: &Path) -> Result<Dataset, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|e| DatasetError::Image {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    load_manifest(&text, path.parent().unwrap_or_else(|| Path::new(".")))
}

/// Per class, shuffle with a seed derived from `seed` and the class, take the
/// first `train_per_class` for training and the next `test_per_class` for
/// testing. Samples are emitted class by class.
pub fn split(
    ds: &Dataset,
    train_per_class: usize,
    test_per_class: usize,
    seed: u64,
) -> Result<SplitPair, DatasetError> {
    let mut by_class: Vec<Vec<&Sample>> = vec![Vec::new(); NUM_CLASSES];
    for s in &ds.samples {
        by_class[s.label as usize].push(s);
    }
    let required = train_per_class + test_per_class;
    let mut train = Vec::with_capacity(NUM_CLASSES * train_per_class);
    let mut test = Vec::with_capacity(NUM_CLASSES * test_per_class);
    for (class, members) in by_class.iter_mut().enumerate() {
        if members.len() < required {
            return Err(DatasetError::InsufficientSamples {
                class,
                available: members.len(),
                required,
            });
        }
        SplitMix64::new(derive_seed(seed, &[class as u64])).shuffle(members);
        train.extend(members[..train_per_class].iter().map(|&s| s.clone()));
        test.extend(members[train_per_class..required].iter().map(|&s| s.clone()));
    }
    debug_assert!({
        let ids: HashSet<usize> = train.iter().map(|s| s.source).collect();
        test.iter().all(|s| !ids.contains(&s.source))
    });
    Ok(SplitPair {
        train: Dataset { samples: train },
        test: Dataset { samples: test },
    })
}

/// Write every sample as `c{label}_{index}.pbm` under `dir` plus a
/// `manifest.csv` listing them. Returns the manifest path.
pub fn write_dataset(ds: &Dataset, dir: &Path, variant: PbmVariant) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = String::from("# path,label\n");
    for (i, s) in ds.samples.iter().enumerate() {
        let name = format!("c{}_{:05}.pbm", s.label, i);
        std::fs::write(dir.join(&name), write_pbm(&s.image, variant))?;
        manifest.push_str(&format!("{name},{}\n", s.label));
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest)?;
    Ok(path)
}
