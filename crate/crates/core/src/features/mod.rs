//! Feature extraction: the mapping from a preprocessed binary numeral image
//! to a normalised feature vector.
//!
//! Seven extractors are provided. Four of them (`shadow72`, `centroid16`,
//! `angular16`, `run36`) work relative to the minimal bounding box of the
//! glyph and are therefore translation invariant; the other three (`span8`,
//! `span128`, `dcg40`) are defined on the fixed 32x32 frame.
//!
//! Extractors are combined into the seven numbered feature sets of
//! [`FeatureSetId`]; [`extract_set`] concatenates their outputs in order.

mod angular;
mod centroid;
mod dcg;
mod octants;
mod run;
mod shadow;
mod span;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::imaging::{BinaryImage, ImagingError};

pub use angular::angular16;
pub use centroid::centroid16;
pub use dcg::dcg40;
pub use octants::{octant_triangle, OctantSide};
pub use run::run36;
pub use shadow::shadow72;
pub use span::{span128, span8};

/// Side length of the preprocessed frame.
pub const FRAME: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("image contains no black pixel")]
    EmptyImage,
    #[error("expected a {FRAME}x{FRAME} frame, got {height}x{width}")]
    WrongFrameSize { height: usize, width: usize },
}

impl From<ImagingError> for FeatureError {
    fn from(e: ImagingError) -> Self {
        match e {
            ImagingError::EmptyImage => FeatureError::EmptyImage,
            // Only minimal_bounding_box is called from here, and it can fail
            // with nothing else.
            other => unreachable!("unexpected imaging error: {other}"),
        }
    }
}

pub(crate) fn require_frame(img: &BinaryImage) -> Result<(), FeatureError> {
    if img.height() != FRAME || img.width() != FRAME {
        return Err(FeatureError::WrongFrameSize {
            height: img.height(),
            width: img.width(),
        });
    }
    Ok(())
}

/// Ordered feature values, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(
            values.iter().all(|v| (0.0..=1.0).contains(v)),
            "feature out of range: {values:?}"
        );
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The individual extractors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extractor {
    Shadow72,
    Centroid16,
    Angular16,
    Span8,
    Span128,
    Dcg40,
    Run36,
}

impl Extractor {
    pub const ALL: [Extractor; 7] = [
        Extractor::Shadow72,
        Extractor::Centroid16,
        Extractor::Angular16,
        Extractor::Span8,
        Extractor::Span128,
        Extractor::Dcg40,
        Extractor::Run36,
    ];

    pub fn dimension(self) -> usize {
        match self {
            Extractor::Shadow72 => 72,
            Extractor::Centroid16 => 16,
            Extractor::Angular16 => 16,
            Extractor::Span8 => 8,
            Extractor::Span128 => 128,
            Extractor::Dcg40 => 40,
            Extractor::Run36 => 36,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Extractor::Shadow72 => "shadow72",
            Extractor::Centroid16 => "centroid16",
            Extractor::Angular16 => "angular16",
            Extractor::Span8 => "span8",
            Extractor::Span128 => "span128",
            Extractor::Dcg40 => "dcg40",
            Extractor::Run36 => "run36",
        }
    }

    /// Whether the extractor requires the fixed 32x32 frame.
    pub fn frame_relative(self) -> bool {
        matches!(self, Extractor::Span8 | Extractor::Span128 | Extractor::Dcg40)
    }

    pub fn extract(self, img: &BinaryImage) -> Result<FeatureVector, FeatureError> {
        match self {
            Extractor::Shadow72 => shadow72(img),
            Extractor::Centroid16 => centroid16(img),
            Extractor::Angular16 => angular16(img),
            Extractor::Span8 => span8(img),
            Extractor::Span128 => span128(img),
            Extractor::Dcg40 => dcg40(img),
            Extractor::Run36 => run36(img),
        }
    }
}

impl fmt::Display for Extractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Identifier of one of the seven feature-set compositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureSetId {
    Set1,
    Set2,
    Set3,
    Set4,
    Set5,
    Set6,
    Set7,
}

impl FeatureSetId {
    pub const ALL: [FeatureSetId; 7] = [
        FeatureSetId::Set1,
        FeatureSetId::Set2,
        FeatureSetId::Set3,
        FeatureSetId::Set4,
        FeatureSetId::Set5,
        FeatureSetId::Set6,
        FeatureSetId::Set7,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn spec(self) -> &'static FeatureSetSpec {
        &REGISTRY[self as usize]
    }
}

impl fmt::Display for FeatureSetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Set{}", self.number())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown feature set `{0}` (expected Set1..Set7)")]
pub struct UnknownFeatureSet(pub String);

impl FromStr for FeatureSetId {
    type Err = UnknownFeatureSet;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let digits = t
            .strip_prefix("Set")
            .or_else(|| t.strip_prefix("set"))
            .map(|d| d.trim_start_matches('#'))
            .unwrap_or(t);
        match digits.parse::<usize>() {
            Ok(n @ 1..=7) => Ok(FeatureSetId::ALL[n - 1]),
            _ => Err(UnknownFeatureSet(s.to_string())),
        }
    }
}

/// A named, ordered composition of extractors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSetSpec {
    pub id: FeatureSetId,
    pub extractors: &'static [Extractor],
    pub dimension: usize,
}

impl FeatureSetSpec {
    pub fn all() -> &'static [FeatureSetSpec] {
        &REGISTRY
    }
}

const fn dims(extractors: &[Extractor]) -> usize {
    let mut total = 0;
    let mut i = 0;
    while i < extractors.len() {
        total += match extractors[i] {
            Extractor::Shadow72 => 72,
            Extractor::Centroid16 => 16,
            Extractor::Angular16 => 16,
            Extractor::Span8 => 8,
            Extractor::Span128 => 128,
            Extractor::Dcg40 => 40,
            Extractor::Run36 => 36,
        };
        i += 1;
    }
    total
}

use Extractor::*;

const SET1: &[Extractor] = &[Shadow72, Centroid16];
const SET2: &[Extractor] = &[Angular16, Span8];
const SET3: &[Extractor] = &[Dcg40];
const SET4: &[Extractor] = &[Run36];
const SET5: &[Extractor] = &[Span128];
const SET6: &[Extractor] = &[Run36, Dcg40, Angular16, Span8];
const SET7: &[Extractor] = &[Shadow72, Centroid16, Run36];

static REGISTRY: [FeatureSetSpec; 7] = [
    FeatureSetSpec {
        id: FeatureSetId::Set1,
        extractors: SET1,
        dimension: dims(SET1),
    },
    FeatureSetSpec {
        id: FeatureSetId::Set2,
        extractors: SET2,
        dimension: dims(SET2),
    },
    FeatureSetSpec {
        id: FeatureSetId::Set3,
        extractors: SET3,
        dimension: dims(SET3),
    },
    FeatureSetSpec {
        id: FeatureSetId::Set4,
        extractors: SET4,
        dimension: dims(SET4),
    },
    FeatureSetSpec {
        id: FeatureSetId::Set5,
        extractors: SET5,
        dimension: dims(SET5),
    },
    FeatureSetSpec {
        id: FeatureSetId::Set6,
        extractors: SET6,
        dimension: dims(SET6),
    },
    FeatureSetSpec {
        id: FeatureSetId::Set7,
        extractors: SET7,
        dimension: dims(SET7),
    },
];

/// Concatenate the outputs of the set's extractors in declared order.
pub fn extract_set(img: &BinaryImage, set: &FeatureSetSpec) -> Result<FeatureVector, FeatureError> {
    let mut values = Vec::with_capacity(set.dimension);
    for ex in set.extractors {
        values.extend(ex.extract(img)?.into_inner());
    }
    debug_assert_eq!(values.len(), set.dimension);
    Ok(FeatureVector(values))
}
