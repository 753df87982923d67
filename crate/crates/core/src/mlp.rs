//! Single-hidden-layer perceptron with sigmoid units, trained by per-pattern
//! backpropagation with momentum on the sum of squared errors.

use std::fmt::Write as _;

use thiserror::Error;

use crate::features::FeatureVector;
use crate::rng::{derive_seed, SplitMix64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlpError {
    #[error("input has {got} features, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("label {label} out of range for {classes} output classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("empty test set")]
    EmptyTestSet,
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid layer sizes {0:?}: every layer needs at least one neuron")]
    InvalidLayerSizes([usize; 3]),
    #[error("model file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("unsupported model format `{found}` (expected MLPV1)")]
    VersionMismatch { found: String },
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Weights and biases of an `n_in - n_hidden - n_out` network, plus the
/// previous update of every parameter for the momentum term.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
    /// `n_hidden x n_in`, row-major.
    pub hidden_weights: Vec<f64>,
    pub hidden_biases: Vec<f64>,
    /// `n_out x n_hidden`, row-major.
    pub output_weights: Vec<f64>,
    pub output_biases: Vec<f64>,
    prev: Gradients,
}

/// Per-parameter values laid out like the model's parameters. Used both for
/// gradients and for the momentum buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub hidden_weights: Vec<f64>,
    pub hidden_biases: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_biases: Vec<f64>,
}

impl Gradients {
    fn zeros(n_in: usize, n_hidden: usize, n_out: usize) -> Self {
        Self {
            hidden_weights: vec![0.0; n_hidden * n_in],
            hidden_biases: vec![0.0; n_hidden],
            output_weights: vec![0.0; n_out * n_hidden],
            output_biases: vec![0.0; n_out],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Learning rate.
    pub eta: f64,
    /// Momentum.
    pub alpha: f64,
    pub max_epochs: usize,
    /// Training stops once the mean per-sample SSE of an epoch drops below this.
    pub sse_tol: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            eta: 0.8,
            alpha: 0.7,
            max_epochs: 300,
            sse_tol: 0.01,
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), MlpError> {
        if self.eta.is_nan() || self.eta <= 0.0 {
            return Err(MlpError::InvalidConfig(format!("eta must be > 0, got {}", self.eta)));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(MlpError::InvalidConfig(format!(
                "alpha must be in [0, 1), got {}",
                self.alpha
            )));
        }
        if self.max_epochs == 0 {
            return Err(MlpError::InvalidConfig("max_epochs must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: FeatureVector,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    /// Mean per-sample SSE of each epoch.
    pub epoch_sse: Vec<f64>,
}

impl TrainHistory {
    pub fn epochs_run(&self) -> usize {
        self.epoch_sse.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
}

impl Evaluation {
    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.confusion.len()).map(|i| self.confusion[i][i]).sum()
    }
}

/// Activations of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations {
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}

impl MlpModel {
    /// Weights and biases uniform in `[-0.5, 0.5]` from SplitMix64(`seed`),
    /// drawn hidden weights (row-major), hidden biases, output weights,
    /// output biases.
    pub fn init(n_in: usize, n_hidden: usize, n_out: usize, seed: u64) -> Result<Self, MlpError> {
        if n_in == 0 || n_hidden == 0 || n_out == 0 {
            return Err(MlpError::InvalidLayerSizes([n_in, n_hidden, n_out]));
        }
        let mut rng = SplitMix64::new(seed);
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.uniform(-0.5, 0.5)).collect() };
        let hidden_weights = draw(n_hidden * n_in);
        let hidden_biases = draw(n_hidden);
        let output_weights = draw(n_out * n_hidden);
        let output_biases = draw(n_out);
        Ok(Self {
            n_in,
            n_hidden,
            n_out,
            hidden_weights,
            hidden_biases,
            output_weights,
            output_biases,
            prev: Gradients::zeros(n_in, n_hidden, n_out),
        })
    }

    /// Model with every parameter zero.
    pub fn zeros(n_in: usize, n_hidden: usize, n_out: usize) -> Result<Self, MlpError> {
        let mut m = Self::init(n_in, n_hidden, n_out, 0)?;
        m.for_each_param_mut(|p| *p = 0.0);
        Ok(m)
    }

    pub fn layer_sizes(&self) -> (usize, usize, usize) {
        (self.n_in, self.n_hidden, self.n_out)
    }

    pub fn architecture(&self) -> String {
        format!("{}-{}-{}", self.n_in, self.n_hidden, self.n_out)
    }

    pub fn param_count(&self) -> usize {
        self.n_hidden * (self.n_in + 1) + self.n_out * (self.n_hidden + 1)
    }

    /// Visit every parameter in the canonical order (the init draw order).
    pub fn for_each_param_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        self.hidden_weights
            .iter_mut()
            .chain(&mut self.hidden_biases)
            .chain(&mut self.output_weights)
            .chain(&mut self.output_biases)
            .for_each(&mut f);
    }

    pub fn params(&self) -> Vec<f64> {
        self.hidden_weights
            .iter()
            .chain(&self.hidden_biases)
            .chain(&self.output_weights)
            .chain(&self.output_biases)
            .copied()
            .collect()
    }

    fn check_input(&self, input: &[f64]) -> Result<(), MlpError> {
        if input.len() != self.n_in {
            return Err(MlpError::DimensionMismatch {
                expected: self.n_in,
                got: input.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Activations, MlpError> {
        self.check_input(input)?;
        Ok(self.forward_unchecked(input))
    }

    fn forward_unchecked(&self, input: &[f64]) -> Activations {
        let hidden: Vec<f64> = self
            .hidden_weights
            .chunks_exact(self.n_in)
            .zip(&self.hidden_biases)
            .map(|(row, b)| sigmoid(dot(row, input) + b))
            .collect();
        let output = self
            .output_weights
            .chunks_exact(self.n_hidden)
            .zip(&self.output_biases)
            .map(|(row, b)| sigmoid(dot(row, &hidden) + b))
            .collect();
        Activations { hidden, output }
    }

    /// Index of the largest output activation, smallest index on ties.
    pub fn classify(&self, input: &[f64]) -> Result<usize, MlpError> {
        Ok(argmax(&self.forward(input)?.output))
    }

    /// Squared error `sum_k (t_k - o_k)^2` against the 1-of-m target.
    pub fn sample_error(&self, input: &[f64], label: usize) -> Result<f64, MlpError> {
        self.check_sample(input, label)?;
        Ok(sse(&self.forward_unchecked(input).output, label))
    }

    fn check_sample(&self, input: &[f64], label: usize) -> Result<(), MlpError> {
        self.check_input(input)?;
        if label >= self.n_out {
            return Err(MlpError::LabelOutOfRange {
                label,
                classes: self.n_out,
            });
        }
        Ok(())
    }

    /// Gradient of the sample's squared error with respect to every
    /// parameter, plus the error itself.
    pub fn gradients(&self, input: &[f64], label: usize) -> Result<(Gradients, f64), MlpError> {
        self.check_sample(input, label)?;
        let act = self.forward_unchecked(input);
        Ok(self.backprop(input, label, &act))
    }

    fn backprop(&self, input: &[f64], label: usize, act: &Activations) -> (Gradients, f64) {
        let error = sse(&act.output, label);
        // dE/dnet at the output: -2 (t - o) o (1 - o).
        let delta_out: Vec<f64> = act
            .output
            .iter()
            .enumerate()
            .map(|(k, &o)| -2.0 * (target(k, label) - o) * o * (1.0 - o))
            .collect();
        let delta_hidden: Vec<f64> = (0..self.n_hidden)
            .map(|j| {
                let back: f64 = delta_out
                    .iter()
                    .enumerate()
                    .map(|(k, d)| d * self.output_weights[k * self.n_hidden + j])
                    .sum();
                let h = act.hidden[j];
                back * h * (1.0 - h)
            })
            .collect();

        let mut g = Gradients::zeros(self.n_in, self.n_hidden, self.n_out);
        for (k, &d) in delta_out.iter().enumerate() {
            let row = &mut g.output_weights[k * self.n_hidden..(k + 1) * self.n_hidden];
            for (gw, &h) in row.iter_mut().zip(&act.hidden) {
                *gw = d * h;
            }
            g.output_biases[k] = d;
        }
        for (j, &d) in delta_hidden.iter().enumerate() {
            let row = &mut g.hidden_weights[j * self.n_in..(j + 1) * self.n_in];
            for (gw, &x) in row.iter_mut().zip(input) {
                *gw = d * x;
            }
            g.hidden_biases[j] = d;
        }
        (g, error)
    }

    /// One momentum step: `delta = -eta * grad + alpha * previous_delta`.
    fn apply(&mut self, g: &Gradients, eta: f64, alpha: f64) {
        fn step(params: &mut [f64], prev: &mut [f64], grad: &[f64], eta: f64, alpha: f64) {
            for ((p, d), &gr) in params.iter_mut().zip(prev.iter_mut()).zip(grad) {
                *d = -eta * gr + alpha * *d;
                *p += *d;
            }
        }
        step(
            &mut self.hidden_weights,
            &mut self.prev.hidden_weights,
            &g.hidden_weights,
            eta,
            alpha,
        );
        step(
            &mut self.hidden_biases,
            &mut self.prev.hidden_biases,
            &g.hidden_biases,
            eta,
            alpha,
        );
        step(
            &mut self.output_weights,
            &mut self.prev.output_weights,
            &g.output_weights,
            eta,
            alpha,
        );
        step(
            &mut self.output_biases,
            &mut self.prev.output_biases,
            &g.output_biases,
            eta,
            alpha,
        );
    }

    fn check_samples(&self, samples: &[LabeledSample]) -> Result<(), MlpError> {
        samples
            .iter()
            .try_for_each(|s| self.check_sample(s.features.values(), s.label))
    }

    /// One pass over `samples` in an order shuffled by `epoch_seed`, updating
    /// after every pattern. Returns the mean squared error of the samples as
    /// seen just before their own update.
    pub fn train_epoch(
        &mut self,
        samples: &[LabeledSample],
        cfg: &TrainConfig,
        epoch_seed: u64,
    ) -> Result<f64, MlpError> {
        self.check_samples(samples)?;
        Ok(self.train_epoch_unchecked(samples, cfg, epoch_seed))
    }

    fn train_epoch_unchecked(&mut self, samples: &[LabeledSample], cfg: &TrainConfig, epoch_seed: u64) -> f64 {
        if samples.is_empty() {
            return 0.0;
        }
        let mut order: Vec<usize> = (0..samples.len()).collect();
        SplitMix64::new(epoch_seed).shuffle(&mut order);
        let mut total = 0.0;
        for i in order {
            let s = &samples[i];
            let x = s.features.values();
            let act = self.forward_unchecked(x);
            let (g, e) = self.backprop(x, s.label, &act);
            total += e;
            self.apply(&g, cfg.eta, cfg.alpha);
        }
        total / samples.len() as f64
    }

    /// Train until `cfg.max_epochs` or until an epoch's mean SSE falls below
    /// `cfg.sse_tol`. Epoch `k` is shuffled with a seed derived from
    /// `cfg.seed` and `k`.
    pub fn train(&mut self, samples: &[LabeledSample], cfg: &TrainConfig) -> Result<TrainHistory, MlpError> {
        cfg.validate()?;
        self.check_samples(samples)?;
        let mut history = TrainHistory::default();
        for epoch in 0..cfg.max_epochs {
            let sse = self.train_epoch_unchecked(samples, cfg, derive_seed(cfg.seed, &[epoch as u64]));
            history.epoch_sse.push(sse);
            if sse < cfg.sse_tol {
                break;
            }
        }
        Ok(history)
    }

    pub fn evaluate(&self, samples: &[LabeledSample]) -> Result<Evaluation, MlpError> {
        if samples.is_empty() {
            return Err(MlpError::EmptyTestSet);
        }
        self.check_samples(samples)?;
        let mut confusion = vec![vec![0usize; self.n_out]; self.n_out];
        let mut correct = 0usize;
        for s in samples {
            let predicted = argmax(&self.forward_unchecked(s.features.values()).output);
            confusion[s.label][predicted] += 1;
            correct += usize::from(predicted == s.label);
        }
        Ok(Evaluation {
            accuracy: correct as f64 / samples.len() as f64,
            confusion,
        })
    }

    /// Text serialisation: `MLPV1`, the layer sizes, then hidden weight rows,
    /// hidden biases, output weight rows and output biases, one row per line,
    /// 17 significant digits.
    pub fn save(&self) -> String {
        fn line(out: &mut String, values: &[f64]) {
            let mut first = true;
            for v in values {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        let mut out = format!("MLPV1\n{} {} {}\n", self.n_in, self.n_hidden, self.n_out);
        for row in self.hidden_weights.chunks_exact(self.n_in) {
            line(&mut out, row);
        }
        line(&mut out, &self.hidden_biases);
        for row in self.output_weights.chunks_exact(self.n_hidden) {
            line(&mut out, row);
        }
        line(&mut out, &self.output_biases);
        out
    }

    pub fn load(text: &str) -> Result<Self, MlpError> {
        let end = text.lines().count() + 1;
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| MlpError::Parse {
                line: end,
                reason: format!("unexpected end of document, expected {what}"),
            })
        };

        let (_, magic) = next("header")?;
        if magic != "MLPV1" {
            if magic.starts_with("MLPV") {
                return Err(MlpError::VersionMismatch {
                    found: magic.to_string(),
                });
            }
            return Err(MlpError::Parse {
                line: 1,
                reason: format!("bad header `{magic}`"),
            });
        }

        let (ln, sizes) = next("layer sizes")?;
        let sizes: Vec<usize> = sizes
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| MlpError::Parse {
                line: ln,
                reason: format!("bad layer size: {e}"),
            })?;
        let [n_in, n_hidden, n_out] = <[usize; 3]>::try_from(sizes.as_slice()).map_err(|_| MlpError::Parse {
            line: ln,
            reason: format!("expected 3 layer sizes, found {}", sizes.len()),
        })?;
        let mut model = Self::zeros(n_in, n_hidden, n_out).map_err(|e| MlpError::Parse {
            line: ln,
            reason: e.to_string(),
        })?;

        let mut read_row = |width: usize, what: &str| -> Result<Vec<f64>, MlpError> {
            let (ln, text) = next(what)?;
            let row: Vec<f64> = text
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| MlpError::Parse {
                    line: ln,
                    reason: format!("bad number in {what}: {e}"),
                })?;
            if row.len() != width {
                return Err(MlpError::Parse {
                    line: ln,
                    reason: format!("{what}: expected {width} values, found {}", row.len()),
                });
            }
            Ok(row)
        };

        model.hidden_weights.clear();
        for _ in 0..n_hidden {
            model.hidden_weights.extend(read_row(n_in, "hidden weights")?);
        }
        model.hidden_biases = read_row(n_hidden, "hidden biases")?;
        model.output_weights.clear();
        for _ in 0..n_out {
            model.output_weights.extend(read_row(n_hidden, "output weights")?);
        }
        model.output_biases = read_row(n_out, "output biases")?;
        Ok(model)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn target(k: usize, label: usize) -> f64 {
    if k == label {
        1.0
    } else {
        0.0
    }
}

fn sse(output: &[f64], label: usize) -> f64 {
    output
        .iter()
        .enumerate()
        .map(|(k, &o)| (target(k, label) - o).powi(2))
        .sum()
}

/// First index of the maximum.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(values: Vec<f64>, label: usize) -> LabeledSample {
        LabeledSample {
            features: FeatureVector::new(values),
            label,
        }
    }

    fn random_input(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.next_f64()).collect()
    }

    #[test]
    fn init_is_deterministic() {
        let a = MlpModel::init(88, 54, 10, 7).unwrap();
        let b = MlpModel::init(88, 54, 10, 7).unwrap();
        assert_eq!(a, b);
        let c = MlpModel::init(88, 54, 10, 8).unwrap();
        assert_ne!(a.params(), c.params());
    }

    #[test]
    fn init_shapes_and_range() {
        let m = MlpModel::init(2, 2, 1, 3).unwrap();
        assert_eq!(m.hidden_weights.len() + m.hidden_biases.len(), 6);
        assert_eq!(m.output_weights.len() + m.output_biases.len(), 3);
        assert_eq!(m.param_count(), 9);
        assert!(m.params().iter().all(|p| (-0.5..=0.5).contains(p)));
        assert!(MlpModel::init(0, 2, 1, 3).is_err());
    }

    #[test]
    fn init_draw_order() {
        let m = MlpModel::init(3, 2, 2, 99).unwrap();
        let mut rng = SplitMix64::new(99);
        let expected: Vec<f64> = (0..m.param_count()).map(|_| rng.uniform(-0.5, 0.5)).collect();
        assert_eq!(m.params(), expected);
    }

    #[test]
    fn zero_model_outputs_half() {
        let m = MlpModel::zeros(4, 3, 2).unwrap();
        let act = m.forward(&[0.3, 0.9, 0.1, 0.0]).unwrap();
        assert!(act.hidden.iter().chain(&act.output).all(|&a| a == 0.5));
    }

    #[test]
    fn unit_weight_zero_input() {
        let mut m = MlpModel::zeros(1, 1, 1).unwrap();
        m.hidden_weights[0] = 1.0;
        assert_eq!(m.forward(&[0.0]).unwrap().hidden[0], 0.5);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn forward_matches_straight_line_oracle() {
        let mut rng = SplitMix64::new(4);
        let m = MlpModel::init(5, 3, 2, 12).unwrap();
        let x = random_input(&mut rng, 5);
        let act = m.forward(&x).unwrap();
        for j in 0..3 {
            let mut z = m.hidden_biases[j];
            for i in 0..5 {
                z += m.hidden_weights[j * 5 + i] * x[i];
            }
            assert!((act.hidden[j] - 1.0 / (1.0 + (-z).exp())).abs() < 1e-12);
        }
        for k in 0..2 {
            let mut z = m.output_biases[k];
            for j in 0..3 {
                z += m.output_weights[k * 3 + j] * act.hidden[j];
            }
            assert!((act.output[k] - 1.0 / (1.0 + (-z).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_rejects_wrong_length() {
        let m = MlpModel::init(3, 2, 2, 1).unwrap();
        assert_eq!(
            m.forward(&[0.0, 1.0]),
            Err(MlpError::DimensionMismatch { expected: 3, got: 2 })
        );
        assert!(m.classify(&[0.0; 4]).is_err());
    }

    #[test]
    fn zero_step_leaves_model_unchanged() {
        let mut m = MlpModel::init(3, 4, 2, 5).unwrap();
        let before = m.clone();
        let data = vec![sample(vec![0.1, 0.2, 0.3], 0), sample(vec![0.9, 0.8, 0.7], 1)];
        let expected: f64 = data
            .iter()
            .map(|s| before.sample_error(s.features.values(), s.label).unwrap())
            .sum::<f64>()
            / 2.0;
        let cfg = TrainConfig {
            eta: 0.0,
            alpha: 0.0,
            ..TrainConfig::default()
        };
        let got = m.train_epoch(&data, &cfg, 11).unwrap();
        assert_eq!(m.params(), before.params());
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn single_pattern_descends() {
        let mut rng = SplitMix64::new(8);
        for seed in 0..100 {
            let mut m = MlpModel::init(4, 3, 3, seed).unwrap();
            let s = sample(random_input(&mut rng, 4), (seed % 3) as usize);
            let before = m.sample_error(s.features.values(), s.label).unwrap();
            let cfg = TrainConfig {
                eta: 1e-4,
                alpha: 0.0,
                ..TrainConfig::default()
            };
            m.train_epoch(std::slice::from_ref(&s), &cfg, 0).unwrap();
            let after = m.sample_error(s.features.values(), s.label).unwrap();
            assert!(after <= before, "seed {seed}: {after} > {before}");
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = SplitMix64::new(31);
        let m = MlpModel::init(4, 3, 2, 77).unwrap();
        let x = random_input(&mut rng, 4);
        let (g, _) = m.gradients(&x, 1).unwrap();
        let analytic = [g.hidden_weights, g.hidden_biases, g.output_weights, g.output_biases].concat();
        let eps = 1e-5;
        for (i, &a) in analytic.iter().enumerate() {
            let mut plus = m.clone();
            let mut minus = m.clone();
            let mut k = 0;
            plus.for_each_param_mut(|p| {
                if k == i {
                    *p += eps;
                }
                k += 1;
            });
            k = 0;
            minus.for_each_param_mut(|p| {
                if k == i {
                    *p -= eps;
                }
                k += 1;
            });
            let numeric = (plus.sample_error(&x, 1).unwrap() - minus.sample_error(&x, 1).unwrap()) / (2.0 * eps);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            assert!(rel < 1e-4, "param {i}: analytic {a} numeric {numeric}");
        }
    }

    #[test]
    fn momentum_reuses_previous_step() {
        let mut m = MlpModel::zeros(1, 1, 1).unwrap();
        let s = sample(vec![1.0], 0);
        let (g1, _) = m.gradients(&[1.0], 0).unwrap();
        let cfg = TrainConfig {
            eta: 0.5,
            alpha: 0.5,
            ..TrainConfig::default()
        };
        m.train_epoch(std::slice::from_ref(&s), &cfg, 0).unwrap();
        let d1 = -0.5 * g1.output_biases[0];
        assert!((m.output_biases[0] - d1).abs() < 1e-15);
        let (g2, _) = m.gradients(&[1.0], 0).unwrap();
        m.train_epoch(std::slice::from_ref(&s), &cfg, 0).unwrap();
        let d2 = -0.5 * g2.output_biases[0] + 0.5 * d1;
        assert!((m.output_biases[0] - (d1 + d2)).abs() < 1e-15);
    }

    #[test]
    fn train_runs_exact_epochs_without_tolerance() {
        let mut m = MlpModel::init(2, 3, 2, 1).unwrap();
        let data = vec![sample(vec![0.0, 1.0], 1), sample(vec![1.0, 0.0], 0)];
        let cfg = TrainConfig {
            max_epochs: 5,
            sse_tol: 0.0,
            ..TrainConfig::default()
        };
        let h = m.train(&data, &cfg).unwrap();
        assert_eq!(h.epochs_run(), 5);
    }

    #[test]
    fn train_is_deterministic() {
        let data = vec![
            sample(vec![0.0, 1.0], 1),
            sample(vec![1.0, 0.0], 0),
            sample(vec![0.5, 0.5], 1),
        ];
        let cfg = TrainConfig {
            max_epochs: 20,
            sse_tol: 0.0,
            seed: 5,
            ..TrainConfig::default()
        };
        let mut a = MlpModel::init(2, 4, 2, 3).unwrap();
        let mut b = MlpModel::init(2, 4, 2, 3).unwrap();
        assert_eq!(a.train(&data, &cfg).unwrap(), b.train(&data, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn train_rejects_bad_config_and_labels() {
        let mut m = MlpModel::init(2, 2, 2, 1).unwrap();
        let data = vec![sample(vec![0.0, 1.0], 1)];
        let bad = TrainConfig {
            alpha: 1.0,
            ..TrainConfig::default()
        };
        assert!(matches!(m.train(&data, &bad), Err(MlpError::InvalidConfig(_))));
        let bad = TrainConfig {
            eta: 0.0,
            ..TrainConfig::default()
        };
        assert!(matches!(m.train(&data, &bad), Err(MlpError::InvalidConfig(_))));
        let labels = vec![sample(vec![0.0, 1.0], 2)];
        assert!(matches!(
            m.train(&labels, &TrainConfig::default()),
            Err(MlpError::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn argmax_ties_and_order() {
        assert_eq!(argmax(&[0.1, 0.9, 0.3]), 1);
        assert_eq!(argmax(&[0.4, 0.4, 0.4]), 0);
        assert_eq!(argmax(&[0.1, 0.7, 0.7]), 1);
    }

    #[test]
    fn classify_agrees_with_forward() {
        let mut rng = SplitMix64::new(13);
        for seed in 0..100 {
            let m = MlpModel::init(6, 5, 4, seed).unwrap();
            let x = random_input(&mut rng, 6);
            let out = m.forward(&x).unwrap().output;
            let mut best = 0;
            for k in 1..out.len() {
                if out[k] > out[best] {
                    best = k;
                }
            }
            assert_eq!(m.classify(&x).unwrap(), best);
        }
    }

    #[test]
    fn evaluate_counts() {
        // Large positive output bias on class 0 makes the model always pick it.
        let mut m = MlpModel::zeros(2, 2, 3).unwrap();
        m.output_biases[0] = 5.0;
        let all_zero: Vec<_> = (0..4).map(|_| sample(vec![0.3, 0.3], 0)).collect();
        let e = m.evaluate(&all_zero).unwrap();
        assert_eq!(e.accuracy, 1.0);

        let mut mixed: Vec<_> = (0..9).map(|_| sample(vec![0.1, 0.2], 0)).collect();
        mixed.push(sample(vec![0.5, 0.5], 2));
        let e = m.evaluate(&mixed).unwrap();
        assert!((e.accuracy - 0.9).abs() < 1e-15);
        assert_eq!(e.correct(), 9);
        assert_eq!(e.total(), 10);
        assert_eq!(e.confusion[2][0], 1);
        assert_eq!(m.evaluate(&[]), Err(MlpError::EmptyTestSet));
    }

    #[test]
    fn save_load_round_trip() {
        let mut rng = SplitMix64::new(2);
        let m = MlpModel::init(88, 54, 10, 42).unwrap();
        let loaded = MlpModel::load(&m.save()).unwrap();
        assert_eq!(loaded.params(), m.params());
        for _ in 0..10 {
            let x = random_input(&mut rng, 88);
            let (a, b) = (m.forward(&x).unwrap(), loaded.forward(&x).unwrap());
            for (p, q) in a.output.iter().zip(&b.output) {
                assert!((p - q).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn save_format() {
        let mut m = MlpModel::zeros(2, 1, 1).unwrap();
        m.hidden_weights = vec![0.5, -0.25];
        let text = m.save();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "MLPV1");
        assert_eq!(lines[1], "2 1 1");
        assert_eq!(lines[2], "5.0000000000000000e-1 -2.5000000000000000e-1");
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            MlpModel::load("MLPV2\n1 1 1\n"),
            Err(MlpError::VersionMismatch { .. })
        ));
        let m = MlpModel::init(3, 2, 2, 1).unwrap();
        let text = m.save();
        let truncated: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(matches!(MlpModel::load(&truncated), Err(MlpError::Parse { .. })));
        let bad = text.replacen("MLPV1\n3 2 2", "MLPV1\n3 2", 1);
        assert!(matches!(MlpModel::load(&bad), Err(MlpError::Parse { line: 2, .. })));
        let mut garbled: Vec<&str> = text.lines().collect();
        garbled[2] = "0.1 zero 0.3";
        let garbled = garbled.join("\n");
        assert!(matches!(MlpModel::load(&garbled), Err(MlpError::Parse { line: 3, .. })));
        assert!(matches!(
            MlpModel::load(&truncated),
            Err(MlpError::Parse { line: 5, .. })
        ));
        assert!(matches!(MlpModel::load(""), Err(MlpError::Parse { .. })));
    }
}
