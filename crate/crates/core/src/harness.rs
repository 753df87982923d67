//! Experiment orchestration: per-feature-set benchmarks, hidden-layer sweeps
//! and their CSV reports.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::{generate_synthetic, load_manifest_file, split, Dataset, DatasetError, SplitPair, NUM_CLASSES};
use crate::features::{extract_set, FeatureError, FeatureSetId};
use crate::mlp::{Evaluation, LabeledSample, MlpError, MlpModel, TrainConfig, TrainHistory};
use crate::rng::derive_seed;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{set}: sample {source_id}: {error}")]
    Feature {
        set: FeatureSetId,
        source_id: usize,
        error: FeatureError,
    },
    #[error("{set}: {error}")]
    Mlp { set: FeatureSetId, error: MlpError },
    #[error("{0}")]
    Config(String),
}

/// Where samples come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Manifest(PathBuf),
    Synthetic { per_class: usize, seed: u64 },
}

impl DataSource {
    pub fn load(&self) -> Result<Dataset, DatasetError> {
        match self {
            DataSource::Manifest(path) => load_manifest_file(path),
            DataSource::Synthetic { per_class, seed } => Ok(generate_synthetic(*per_class, *seed)),
        }
    }
}

/// Hidden-layer size of the best network reported for each set.
pub fn default_hidden(set: FeatureSetId) -> usize {
    match set {
        FeatureSetId::Set1 => 54,
        FeatureSetId::Set2 => 14,
        FeatureSetId::Set3 => 24,
        FeatureSetId::Set4 => 24,
        FeatureSetId::Set5 => 80,
        FeatureSetId::Set6 => 65,
        FeatureSetId::Set7 => 80,
    }
}

pub fn architecture(set: FeatureSetId, hidden: usize) -> String {
    format!("{}-{}-{}", set.spec().dimension, hidden, NUM_CLASSES)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: DataSource,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub split_seed: u64,
    pub train: TrainConfig,
    pub sets: Vec<FeatureSetId>,
    /// Overrides the per-set defaults of [`default_hidden`].
    pub hidden: Option<usize>,
    /// Independent initialisations per configuration; the best test accuracy
    /// is reported.
    pub restarts: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            data: DataSource::Synthetic {
                per_class: 300,
                seed: 1,
            },
            train_per_class: 200,
            test_per_class: 100,
            split_seed: 1,
            train: TrainConfig::default(),
            sets: FeatureSetId::ALL.to_vec(),
            hidden: None,
            restarts: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn hidden_for(&self, set: FeatureSetId) -> usize {
        self.hidden.unwrap_or_else(|| default_hidden(set))
    }

    pub fn prepare(&self) -> Result<SplitPair, HarnessError> {
        if self.restarts == 0 {
            return Err(HarnessError::Config("restarts must be >= 1".into()));
        }
        if self.hidden == Some(0) {
            return Err(HarnessError::Config("hidden layer needs at least one neuron".into()));
        }
        self.train.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        let ds = self.data.load()?;
        Ok(split(&ds, self.train_per_class, self.test_per_class, self.split_seed)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub set: FeatureSetId,
    pub arch: String,
    pub train_acc: f64,
    pub test_acc: f64,
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub hidden: usize,
    pub test_acc: f64,
}

/// Extract one feature set from every sample, preserving order.
pub fn extract_samples(ds: &Dataset, set: FeatureSetId) -> Result<Vec<LabeledSample>, HarnessError> {
    ds.samples
        .par_iter()
        .map(|s| {
            extract_set(&s.image, set.spec())
                .map(|features| LabeledSample {
                    features,
                    label: s.label as usize,
                })
                .map_err(|error| HarnessError::Feature {
                    set,
                    source_id: s.source,
                    error,
                })
        })
        .collect()
}

/// Result of training one network on prepared features.
#[derive(Debug, Clone)]
pub struct TrainedRun {
    pub model: MlpModel,
    pub history: TrainHistory,
    pub train_eval: Option<Evaluation>,
    pub test_eval: Evaluation,
}

fn train_once(
    set: FeatureSetId,
    train: &[LabeledSample],
    test: &[LabeledSample],
    hidden: usize,
    cfg: &TrainConfig,
) -> Result<TrainedRun, HarnessError> {
    let wrap = |error| HarnessError::Mlp { set, error };
    let mut model = MlpModel::init(set.spec().dimension, hidden, NUM_CLASSES, cfg.seed).map_err(wrap)?;
    let history = model.train(train, cfg).map_err(wrap)?;
    let train_eval = if train.is_empty() {
        None
    } else {
        Some(model.evaluate(train).map_err(wrap)?)
    };
    let test_eval = model.evaluate(test).map_err(wrap)?;
    Ok(TrainedRun {
        model,
        history,
        train_eval,
        test_eval,
    })
}

/// Train `restarts` networks from seeds derived from `seed` and keep the one
/// with the best test accuracy (earliest on ties). Restart 0 uses `seed`
/// itself.
fn train_best(
    set: FeatureSetId,
    train: &[LabeledSample],
    test: &[LabeledSample],
    hidden: usize,
    cfg: &TrainConfig,
    restarts: usize,
) -> Result<TrainedRun, HarnessError> {
    let mut best: Option<TrainedRun> = None;
    for r in 0..restarts.max(1) {
        let seed = if r == 0 {
            cfg.seed
        } else {
            derive_seed(cfg.seed, &[r as u64])
        };
        let run = train_once(set, train, test, hidden, &TrainConfig { seed, ..*cfg })?;
        if best
            .as_ref()
            .is_none_or(|b| run.test_eval.accuracy > b.test_eval.accuracy)
        {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Train and evaluate a network for one feature set on a prepared split.
pub fn train_set(
    cfg: &ExperimentConfig,
    data: &SplitPair,
    set: FeatureSetId,
    hidden: usize,
) -> Result<TrainedRun, HarnessError> {
    let train = extract_samples(&data.train, set)?;
    let test = extract_samples(&data.test, set)?;
    train_best(set, &train, &test, hidden, &cfg.train, cfg.restarts)
}

/// One row per selected set, ordered Set1..Set7.
pub fn run_bench(cfg: &ExperimentConfig) -> Result<Vec<BenchRow>, HarnessError> {
    let data = cfg.prepare()?;
    let mut sets = cfg.sets.clone();
    sets.sort();
    sets.dedup();
    sets.par_iter()
        .map(|&set| {
            let hidden = cfg.hidden_for(set);
            let run = train_set(cfg, &data, set, hidden)?;
            Ok(BenchRow {
                set,
                arch: architecture(set, hidden),
                train_acc: run.train_eval.map_or(0.0, |e| e.accuracy),
                test_acc: run.test_eval.accuracy,
                epochs: run.history.epochs_run(),
            })
        })
        .collect()
}

/// Train one network per hidden size (seed derived from the master seed and
/// the size) and report test accuracies in input order, plus the size with
/// the highest accuracy (smallest size on ties).
pub fn run_sweep(
    cfg: &ExperimentConfig,
    set: FeatureSetId,
    hidden_sizes: &[usize],
) -> Result<(Vec<SweepRow>, usize), HarnessError> {
    if hidden_sizes.is_empty() {
        return Err(HarnessError::Config("no hidden sizes given".into()));
    }
    if hidden_sizes.contains(&0) {
        return Err(HarnessError::Config("hidden sizes must be >= 1".into()));
    }
    let data = cfg.prepare()?;
    let train = extract_samples(&data.train, set)?;
    let test = extract_samples(&data.test, set)?;
    let rows = hidden_sizes
        .par_iter()
        .map(|&hidden| {
            let tc = TrainConfig {
                seed: derive_seed(cfg.train.seed, &[hidden as u64]),
                ..cfg.train
            };
            let run = train_best(set, &train, &test, hidden, &tc, cfg.restarts)?;
            Ok(SweepRow {
                hidden,
                test_acc: run.test_eval.accuracy,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let best = best_hidden(&rows).expect("non-empty sweep");
    Ok((rows, best))
}

/// Hidden size with the highest test accuracy, smallest size on ties.
pub fn best_hidden(rows: &[SweepRow]) -> Option<usize> {
    rows.iter()
        .fold(None::<&SweepRow>, |best, r| match best {
            Some(b) if b.test_acc > r.test_acc || (b.test_acc == r.test_acc && b.hidden <= r.hidden) => Some(b),
            _ => Some(r),
        })
        .map(|r| r.hidden)
}

fn percent(fraction: f64) -> String {
    format!("{:.2}", fraction * 100.0)
}

pub fn write_bench_report(rows: &[BenchRow]) -> String {
    let mut out = String::from("set,arch,train_acc,test_acc,epochs\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.set,
            r.arch,
            percent(r.train_acc),
            percent(r.test_acc),
            r.epochs
        )
        .unwrap();
    }
    out
}

pub fn write_sweep_report(rows: &[SweepRow]) -> String {
    let mut out = String::from("hidden,test_acc\n");
    for r in rows {
        writeln!(out, "{},{}", r.hidden, percent(r.test_acc)).unwrap();
    }
    out
}

/// Parse a sweep report back into rows (accuracies as fractions).
pub fn parse_sweep_report(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some("hidden,test_acc") {
        return Err("missing sweep header".into());
    }
    lines
        .map(|l| {
            let (h, a) = l.split_once(',').ok_or_else(|| format!("bad row `{l}`"))?;
            Ok(SweepRow {
                hidden: h.parse().map_err(|e| format!("bad hidden size `{h}`: {e}"))?,
                test_acc: a.parse::<f64>().map_err(|e| format!("bad accuracy `{a}`: {e}"))? / 100.0,
            })
        })
        .collect()
}

/// `label,f0,...,f{n-1}` with six decimals per value.
pub fn write_feature_csv(samples: &[LabeledSample], dimension: usize) -> String {
    let mut out = String::from("label");
    for i in 0..dimension {
        write!(out, ",f{i}").unwrap();
    }
    out.push('\n');
    for s in samples {
        write!(out, "{}", s.label).unwrap();
        for v in s.features.values() {
            write!(out, ",{v:.6}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Plain-text confusion matrix, rows are true classes.
pub fn format_confusion(eval: &Evaluation) -> String {
    let mut out = String::from("true\\pred");
    for j in 0..eval.confusion.len() {
        write!(out, "{j:>6}").unwrap();
    }
    out.push('\n');
    for (i, row) in eval.confusion.iter().enumerate() {
        write!(out, "{i:>9}").unwrap();
        for n in row {
            write!(out, "{n:>6}").unwrap();
        }
        out.push('\n');
    }
    out
}
