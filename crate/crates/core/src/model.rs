//! The elementwise scorer: a 784-8-1 ReLU network with a sigmoid head.
//!
//! With a single sigmoid output `p1 = sigmoid(z)` and `p0 = 1 - p1`, the
//! difference of log-posteriors `log p1 - log p0` is exactly the logit `z`,
//! so the score is read off the pre-activation and never saturates.
//!
//! Parameters live in one flat vector, laid out as
//! `[hidden_weights (8 x 784, row-major) | hidden_bias (8) | output_weights (8) | output_bias (1)]`.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{DatasetSplit, LabeledImage, IMAGE_PIXELS};
use crate::statistic::Hypothesis;

pub const INPUTS: usize = IMAGE_PIXELS;
pub const HIDDEN: usize = 8;

const W1: usize = 0;
const B1: usize = W1 + HIDDEN * INPUTS;
const W2: usize = B1 + HIDDEN;
const B2: usize = W2 + HIDDEN;
pub const PARAMETER_COUNT: usize = B2 + 1;

pub const MODEL_FORMAT: &str = "d3f-mlp/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub seed: u64,
    /// Reweight BCE terms by inverse class frequency.
    pub class_balance: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            batch_size: 128,
            learning_rate: 1e-3,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            seed: 0,
            class_balance: true,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::TrainingSetup(m));
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {b}"));
            }
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return bad(format!("adam_epsilon must be positive, got {}", self.adam_epsilon));
        }
        Ok(())
    }
}

/// One trained (or freshly initialized) realization of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParameters {
    theta: Vec<f64>,
    pub seed: u64,
    /// Epochs of training applied since initialization.
    pub epochs_trained: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Forward {
    pub logit: f64,
    pub p1: f64,
}

impl Forward {
    pub fn p0(&self) -> f64 {
        1.0 - self.p1
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Binary cross-entropy of label `y` against logit `z`.
pub fn bce_with_logit(z: f64, y: f64) -> f64 {
    softplus(z) - y * z
}

impl MlpParameters {
    pub fn from_flat(theta: Vec<f64>, seed: u64) -> Result<Self> {
        if theta.len() != PARAMETER_COUNT {
            return Err(Error::ModelFormat(format!(
                "expected {PARAMETER_COUNT} parameters, got {}",
                theta.len()
            )));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite network parameter".into()));
        }
        Ok(Self {
            theta,
            seed,
            epochs_trained: 0,
        })
    }

    /// All-zero network: every input scores 0.
    pub fn zeros() -> Self {
        Self {
            theta: vec![0.0; PARAMETER_COUNT],
            seed: 0,
            epochs_trained: 0,
        }
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.theta
    }

    pub fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    /// 8 x 784, row-major.
    pub fn hidden_weights(&self) -> &[f64] {
        &self.theta[W1..B1]
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.theta[B1..W2]
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.theta[W2..B2]
    }

    pub fn output_bias(&self) -> f64 {
        self.theta[B2]
    }

    fn hidden_pre(&self, pixels: &[f32]) -> [f64; HIDDEN] {
        let mut pre = [0.0; HIDDEN];
        let (w1, b1) = (self.hidden_weights(), self.hidden_bias());
        for (j, p) in pre.iter_mut().enumerate() {
            let row = &w1[j * INPUTS..(j + 1) * INPUTS];
            *p = b1[j] + row.iter().zip(pixels).map(|(w, &x)| w * f64::from(x)).sum::<f64>();
        }
        pre
    }

    fn logit_unchecked(&self, pixels: &[f32]) -> f64 {
        let pre = self.hidden_pre(pixels);
        self.output_bias()
            + self
                .output_weights()
                .iter()
                .zip(pre)
                .map(|(w, a)| w * a.max(0.0))
                .sum::<f64>()
    }

    pub fn forward(&self, pixels: &[f32]) -> Result<Forward> {
        check_input(pixels)?;
        let logit = self.logit_unchecked(pixels);
        Ok(Forward {
            logit,
            p1: sigmoid(logit),
        })
    }

    /// `log p1 - log p0`, i.e. the logit.
    pub fn elementwise_d3f(&self, pixels: &[f32]) -> Result<f64> {
        check_input(pixels)?;
        Ok(self.logit_unchecked(pixels))
    }

    /// Scores of many images, in order.
    pub fn score_images<'a, I>(&self, images: I) -> Vec<f64>
    where
        I: IntoParallelIterator<Item = &'a LabeledImage>,
        I::Iter: IndexedParallelIterator,
    {
        images
            .into_par_iter()
            .map(|img| self.logit_unchecked(img.pixels()))
            .collect()
    }

    /// Scores of every image in `split` under hypothesis `k`.
    pub fn score_hypothesis(&self, split: &DatasetSplit, k: Hypothesis) -> Vec<f64> {
        let images: Vec<&LabeledImage> = split.iter_hypothesis(k).collect();
        images
            .par_iter()
            .map(|img| self.logit_unchecked(img.pixels()))
            .collect()
    }

    pub fn save(&self, path: &Path, config: &TrainingConfig) -> Result<()> {
        let record = ModelFile {
            format: MODEL_FORMAT.to_string(),
            config: config.clone(),
            params: self.clone(),
        };
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer(std::io::BufWriter::new(f), &record)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<(Self, TrainingConfig)> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let record: ModelFile = serde_json::from_reader(std::io::BufReader::new(f))?;
        if record.format != MODEL_FORMAT {
            return Err(Error::ModelFormat(format!(
                "{}: format tag {:?}, expected {MODEL_FORMAT:?}",
                path.display(),
                record.format
            )));
        }
        let mut params = Self::from_flat(record.params.theta, record.params.seed)?;
        params.epochs_trained = record.params.epochs_trained;
        Ok((params, record.config))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    config: TrainingConfig,
    params: MlpParameters,
}

fn check_input(pixels: &[f32]) -> Result<()> {
    if pixels.len() != INPUTS {
        return Err(Error::Consistency(format!(
            "input has {} values, expected {INPUTS}",
            pixels.len()
        )));
    }
    if pixels.iter().any(|p| !p.is_finite()) {
        return Err(Error::Numeric("non-finite pixel".into()));
    }
    Ok(())
}

/// Uniform bound `sqrt(6 / (fan_in + fan_out))`.
pub fn init_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// Seeded fan-scaled uniform weights, zero biases.
pub fn initialize(seed: u64) -> MlpParameters {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = vec![0.0; PARAMETER_COUNT];
    let hidden = init_bound(INPUTS, HIDDEN);
    for w in &mut theta[W1..B1] {
        *w = rng.random_range(-hidden..hidden);
    }
    let output = init_bound(HIDDEN, 1);
    for w in &mut theta[W2..B2] {
        *w = rng.random_range(-output..output);
    }
    MlpParameters {
        theta,
        seed,
        epochs_trained: 0,
    }
}

/// Weighted mean BCE over a batch and its gradient with respect to the flat
/// parameter vector. `class_weights[k]` multiplies the loss of hypothesis `k`.
pub fn loss_and_gradient(
    params: &MlpParameters,
    inputs: &[&[f32]],
    labels: &[Hypothesis],
    class_weights: [f64; 2],
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; PARAMETER_COUNT];
    let loss = accumulate_gradient(params, inputs, labels, class_weights, &mut grad);
    (loss, grad)
}

fn accumulate_gradient(
    params: &MlpParameters,
    inputs: &[&[f32]],
    labels: &[Hypothesis],
    class_weights: [f64; 2],
    grad: &mut [f64],
) -> f64 {
    grad.fill(0.0);
    let scale = 1.0 / inputs.len() as f64;
    let w2 = params.output_weights().to_vec();
    let mut loss = 0.0;
    for (x, &k) in inputs.iter().zip(labels) {
        let pre = params.hidden_pre(x);
        let z = params.output_bias() + w2.iter().zip(pre).map(|(w, a)| w * a.max(0.0)).sum::<f64>();
        let y = k.label();
        let weight = class_weights[k.index()] * scale;
        loss += weight * bce_with_logit(z, y);
        let dz = weight * (sigmoid(z) - y);
        grad[B2] += dz;
        for j in 0..HIDDEN {
            if pre[j] <= 0.0 {
                continue;
            }
            grad[W2 + j] += dz * pre[j];
            let dh = dz * w2[j];
            grad[B1 + j] += dh;
            let row = &mut grad[W1 + j * INPUTS..W1 + (j + 1) * INPUTS];
            for (g, &xi) in row.iter_mut().zip(x.iter()) {
                if xi != 0.0 {
                    *g += dh * f64::from(xi);
                }
            }
        }
    }
    loss
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl Adam {
    fn new(config: &TrainingConfig) -> Self {
        Self {
            m: vec![0.0; PARAMETER_COUNT],
            v: vec![0.0; PARAMETER_COUNT],
            step: 0,
            lr: config.learning_rate,
            beta1: config.adam_beta1,
            beta2: config.adam_beta2,
            eps: config.adam_epsilon,
        }
    }

    fn update(&mut self, theta: &mut [f64], grad: &[f64]) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        for (((p, &g), m), v) in theta.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    /// Weighted mean BCE over the epoch's mini-batches.
    pub loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub params: MlpParameters,
    /// `(epoch, parameters after that epoch)` for each requested checkpoint.
    pub checkpoints: Vec<(usize, MlpParameters)>,
    pub log: Vec<EpochLog>,
}

/// Inverse-frequency weights `N / (2 N_k)`, or ones when balancing is off.
pub fn class_weights(split: &DatasetSplit, balance: bool) -> [f64; 2] {
    if !balance {
        return [1.0, 1.0];
    }
    let c = split.counts();
    let total = c.total() as f64;
    [total / (2.0 * c.h0 as f64), total / (2.0 * c.h1 as f64)]
}

/// Mini-batch Adam on BCE for exactly `config.epochs` passes.
pub fn train(data: &DatasetSplit, config: &TrainingConfig) -> Result<MlpParameters> {
    Ok(train_with_checkpoints(data, config, &[])?.params)
}

/// Like [`train`], also returning a copy of the parameters after each epoch
/// listed in `checkpoints` (0 means the initialization).
pub fn train_with_checkpoints(
    data: &DatasetSplit,
    config: &TrainingConfig,
    checkpoints: &[usize],
) -> Result<TrainingRun> {
    config.validate()?;
    let counts = data.counts();
    if counts.h0 == 0 || counts.h1 == 0 {
        return Err(Error::TrainingSetup(format!(
            "training data needs both hypotheses, got H0={} H1={}",
            counts.h0, counts.h1
        )));
    }
    let weights = class_weights(data, config.class_balance);
    let mut params = initialize(config.seed);
    let mut saved = Vec::new();
    if checkpoints.contains(&0) {
        saved.push((0, params.clone()));
    }

    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    shuffle_rng.set_stream(1);
    let mut adam = Adam::new(config);
    let mut grad = vec![0.0; PARAMETER_COUNT];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let images = data.images();
    let mut log = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let inputs: Vec<&[f32]> = batch.iter().map(|&i| images[i].pixels()).collect();
            let labels: Vec<Hypothesis> = batch.iter().map(|&i| images[i].hypothesis()).collect();
            let loss = accumulate_gradient(&params, &inputs, &labels, weights, &mut grad);
            if !loss.is_finite() {
                return Err(Error::Numeric(format!("training loss {loss} at epoch {epoch}")));
            }
            epoch_loss += loss * batch.len() as f64;
            adam.update(&mut params.theta, &grad);
        }
        params.epochs_trained = epoch;
        let loss = epoch_loss / data.len() as f64;
        log::info!("seed {} epoch {epoch}: loss {loss:.6}", config.seed);
        log.push(EpochLog { epoch, loss });
        if checkpoints.contains(&epoch) {
            saved.push((epoch, params.clone()));
        }
    }
    if params.theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("training produced non-finite parameters".into()));
    }
    Ok(TrainingRun {
        params,
        checkpoints: saved,
        log,
    })
}
