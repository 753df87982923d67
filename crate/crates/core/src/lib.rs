//! Handwritten numeral recognition from binary images.
//!
//! The pipeline maps a preprocessed 32x32 binary image to a feature vector
//! ([`features`]) and a feature vector to a class label with a sigmoid
//! multilayer perceptron ([`mlp`]). [`dataset`] loads or synthesises labelled
//! images and [`harness`] runs the comparative experiments over the seven
//! feature sets.

pub mod dataset;
pub mod features;
pub mod harness;
pub mod imaging;
pub mod mlp;
pub mod rng;

pub use features::{extract_set, Extractor, FeatureError, FeatureSetId, FeatureSetSpec, FeatureVector};
pub use imaging::{BinaryImage, BoundingBox, GrayImage, OctantId};
pub use mlp::{LabeledSample, MlpError, MlpModel, TrainConfig, TrainHistory};
