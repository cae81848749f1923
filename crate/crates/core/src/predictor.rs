//! Fully-connected AGCS regressor: assistance features in, one predicted
//! AGCS per candidate codebook out.
//!
//! Architecture: `[input, hidden × U, G]` with a rectifier on the hidden
//! *and* output layers (labels live in [0, 1], so nonnegative outputs cost
//! no expressivity). Default hidden width is half the full assistance
//! feature count. Weights initialize He-uniform (±√(6/fan_in)) from a seeded
//! stream; hidden biases start at zero, output biases at 0.5 (mid-range of
//! AGCS) so the rectified output layer cannot start dead.
//!
//! Training is plain mini-batch Adam on the mean squared error, fully
//! deterministic given (dataset, config): shuffle order, batch boundaries
//! and summation order are all fixed. The best-validation checkpoint is
//! returned.
//!
//! Checkpoint layout (version 1, little-endian): magic `CBSELNN1`, u32
//! version, u64 config hash, u64 train seed, i64 delta filter (-1 = none),
//! u8 delta-as-feature flag, 3×f64 split fractions, u32 mask length + one
//! byte per mask entry, u64 init seed, u32 layer-width count + u32 widths,
//! then per layer the row-major f64 weights followed by the f64 biases.

use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

/// Initial output-layer bias (mid-range of the AGCS label interval).
pub const OUTPUT_BIAS_INIT: f64 = 0.5;

const MAGIC: &[u8; 8] = b"CBSELNN1";
const FORMAT_VERSION: u32 = 1;

/// Default hidden width: half the full assistance feature count
/// (N1·N2 + F + Q), independent of any feature masking.
pub fn default_hidden_width(full_feature_count: usize) -> usize {
    (full_feature_count / 2).max(1)
}

/// Fully-connected rectifier network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorModel {
    /// `[input, hidden × U, outputs]`.
    pub layer_widths: Vec<usize>,
    /// Per layer, row-major `out × in`.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Deterministically initialize a model: He-uniform weights, zero hidden
/// biases, output biases at [`OUTPUT_BIAS_INIT`].
pub fn init_model(
    input_dim: usize,
    hidden_width: usize,
    num_hidden: usize,
    outputs: usize,
    seed: u64,
) -> PredictorModel {
    assert!(input_dim >= 1 && hidden_width >= 1 && outputs >= 1);
    let mut widths = vec![input_dim];
    widths.extend(std::iter::repeat(hidden_width).take(num_hidden));
    widths.push(outputs);

    let mut rng = SplitMix64::new(seed);
    let mut weights = Vec::with_capacity(widths.len() - 1);
    let mut biases = Vec::with_capacity(widths.len() - 1);
    for l in 0..widths.len() - 1 {
        let fan_in = widths[l];
        let bound = (6.0 / fan_in as f64).sqrt();
        let w: Vec<f64> = (0..widths[l + 1] * fan_in)
            .map(|_| rng.uniform(-bound, bound))
            .collect();
        let is_output = l == widths.len() - 2;
        let b = vec![if is_output { OUTPUT_BIAS_INIT } else { 0.0 }; widths[l + 1]];
        weights.push(w);
        biases.push(b);
    }
    PredictorModel {
        layer_widths: widths,
        weights,
        biases,
        seed,
    }
}

impl PredictorModel {
    pub fn input_dim(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }

    /// Affine-rectifier chain; outputs are nonnegative because the output
    /// layer is rectified too.
    pub fn forward(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "feature length {} does not match input dim {}",
                features.len(),
                self.input_dim()
            )));
        }
        let mut act = features.to_vec();
        for l in 0..self.weights.len() {
            act = self.layer_forward(l, &act);
        }
        Ok(act)
    }

    fn layer_forward(&self, l: usize, input: &[f64]) -> Vec<f64> {
        let out_dim = self.layer_widths[l + 1];
        let in_dim = self.layer_widths[l];
        let mut out = Vec::with_capacity(out_dim);
        for o in 0..out_dim {
            let mut z = self.biases[l][o];
            let row = &self.weights[l][o * in_dim..(o + 1) * in_dim];
            for (w, x) in row.iter().zip(input) {
                z += w * x;
            }
            out.push(z.max(0.0));
        }
        out
    }

    /// Forward pass keeping pre-activations and activations per layer.
    fn forward_trace(&self, features: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut pre = Vec::with_capacity(self.weights.len());
        let mut act = vec![features.to_vec()];
        for l in 0..self.weights.len() {
            let in_dim = self.layer_widths[l];
            let out_dim = self.layer_widths[l + 1];
            let input = act.last().unwrap();
            let mut z = Vec::with_capacity(out_dim);
            for o in 0..out_dim {
                let mut s = self.biases[l][o];
                let row = &self.weights[l][o * in_dim..(o + 1) * in_dim];
                for (w, x) in row.iter().zip(input) {
                    s += w * x;
                }
                z.push(s);
            }
            let a: Vec<f64> = z.iter().map(|v| v.max(0.0)).collect();
            pre.push(z);
            act.push(a);
        }
        (pre, act)
    }

    /// True when some pre-activation at this sample sits within `tol` of the
    /// rectifier kink, where finite differences are unreliable.
    pub fn has_kink_near(&self, features: &[f64], tol: f64) -> bool {
        let (pre, _) = self.forward_trace(features);
        pre.iter().flatten().any(|z| z.abs() < tol)
    }

    fn num_params(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }
}

/// Per-sample loss: squared ℓ2 distance averaged over the outputs.
pub fn loss(pred: &[f64], label: &[f64]) -> f64 {
    debug_assert_eq!(pred.len(), label.len());
    pred.iter()
        .zip(label)
        .map(|(p, l)| (p - l) * (p - l))
        .sum::<f64>()
        / pred.len() as f64
}

/// Analytic parameter gradients of [`loss`] at one sample.
fn backprop_sample(
    model: &PredictorModel,
    features: &[f64],
    label: &[f64],
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (pre, act) = model.forward_trace(features);
    let layers = model.weights.len();
    let g = model.output_dim() as f64;

    let mut d_w: Vec<Vec<f64>> = model.weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut d_b: Vec<Vec<f64>> = model.biases.iter().map(|b| vec![0.0; b.len()]).collect();

    // Output-layer error through the rectifier.
    let out = &act[layers];
    let mut delta: Vec<f64> = out
        .iter()
        .zip(label)
        .zip(&pre[layers - 1])
        .map(|((p, l), z)| {
            let relu_grad = if *z > 0.0 { 1.0 } else { 0.0 };
            2.0 * (p - l) / g * relu_grad
        })
        .collect();

    for l in (0..layers).rev() {
        let in_dim = model.layer_widths[l];
        let input = &act[l];
        for (o, d) in delta.iter().enumerate() {
            d_b[l][o] = *d;
            let row = &mut d_w[l][o * in_dim..(o + 1) * in_dim];
            for (slot, x) in row.iter_mut().zip(input) {
                *slot = d * x;
            }
        }
        if l > 0 {
            let mut prev = vec![0.0; in_dim];
            for (o, d) in delta.iter().enumerate() {
                let row = &model.weights[l][o * in_dim..(o + 1) * in_dim];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += d * w;
                }
            }
            for (p, z) in prev.iter_mut().zip(&pre[l - 1]) {
                if *z <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
    }
    (d_w, d_b)
}

/// Compare analytic gradients at one sample against central finite
/// differences (step 1e-5); returns the maximum relative error. Entries
/// where both gradients are below 1e-12 count as zero error. Call at samples
/// where [`PredictorModel::has_kink_near`] (tol 1e-3) is false.
pub fn gradient_check(model: &PredictorModel, features: &[f64], label: &[f64]) -> Result<f64> {
    if features.len() != model.input_dim() || label.len() != model.output_dim() {
        return Err(Error::Shape("gradient check sample dims mismatch".into()));
    }
    let (d_w, d_b) = backprop_sample(model, features, label);
    let step = 1e-5;
    let mut max_err = 0.0f64;

    let mut probe = |analytic: f64, perturb: &mut dyn FnMut(&mut PredictorModel, f64)| {
        let mut plus = model.clone();
        perturb(&mut plus, step);
        let mut minus = model.clone();
        perturb(&mut minus, -step);
        let lp = loss(&plus.forward(features).unwrap(), label);
        let lm = loss(&minus.forward(features).unwrap(), label);
        let numeric = (lp - lm) / (2.0 * step);
        let denom = analytic.abs().max(numeric.abs());
        let err = if denom < 1e-12 {
            0.0
        } else {
            (analytic - numeric).abs() / denom
        };
        if err > max_err {
            max_err = err;
        }
    };

    for l in 0..model.weights.len() {
        for i in 0..model.weights[l].len() {
            probe(d_w[l][i], &mut |m, h| m.weights[l][i] += h);
        }
        for i in 0..model.biases[l].len() {
            probe(d_b[l][i], &mut |m, h| m.biases[l][i] += h);
        }
    }
    Ok(max_err)
}

/// Train/validation/test tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Split {
    Train,
    Validation,
    Test,
}

/// One dataset row: assistance features, one true AGCS label per codebook,
/// and generation provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub features: Vec<f64>,
    pub labels: Vec<f64>,
    pub seed: u64,
    pub scenario_id: usize,
    pub delta: usize,
}

/// In-memory dataset with split tags.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub rows: Vec<DatasetRow>,
    pub splits: Vec<Split>,
    pub feature_names: Vec<String>,
    pub codebook_ids: Vec<u32>,
    /// Full assistance feature count (N1·N2 + F + Q) before any masking;
    /// drives the default hidden width.
    pub full_feature_count: usize,
}

impl Dataset {
    pub fn new(
        rows: Vec<DatasetRow>,
        feature_names: Vec<String>,
        codebook_ids: Vec<u32>,
        full_feature_count: usize,
    ) -> Result<Self> {
        let d = Self {
            splits: vec![Split::Train; rows.len()],
            rows,
            feature_names,
            codebook_ids,
            full_feature_count,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let flen = self.feature_names.len();
        let glen = self.codebook_ids.len();
        for (i, row) in self.rows.iter().enumerate() {
            if row.features.len() != flen {
                return Err(Error::Shape(format!(
                    "row {i}: {} features, expected {flen}",
                    row.features.len()
                )));
            }
            if row.labels.len() != glen {
                return Err(Error::Shape(format!(
                    "row {i}: {} labels, expected {glen}",
                    row.labels.len()
                )));
            }
            if row.labels.iter().any(|l| !(0.0..=1.0).contains(l)) {
                return Err(Error::Range(format!("row {i}: label outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn feature_len(&self) -> usize {
        self.feature_names.len()
    }

    pub fn label_len(&self) -> usize {
        self.codebook_ids.len()
    }

    /// Deterministically shuffle rows into train/validation/test splits.
    pub fn assign_splits(&mut self, fractions: [f64; 3], seed: u64) -> Result<()> {
        if fractions.iter().any(|f| *f < 0.0)
            || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::Config(format!(
                "split fractions must be nonnegative and sum to 1, got {fractions:?}"
            )));
        }
        let n = self.rows.len();
        let mut rng = SplitMix64::new(seed);
        let order = rng.permutation(n);
        let n_train = (fractions[0] * n as f64).round() as usize;
        let n_val = (fractions[1] * n as f64).round() as usize;
        let mut splits = vec![Split::Test; n];
        for (pos, &row) in order.iter().enumerate() {
            splits[row] = if pos < n_train {
                Split::Train
            } else if pos < (n_train + n_val).min(n) {
                Split::Validation
            } else {
                Split::Test
            };
        }
        self.splits = splits;
        Ok(())
    }

    pub fn indices_in(&self, split: Split) -> Vec<usize> {
        self.splits
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == split)
            .map(|(i, _)| i)
            .collect()
    }

    /// Keep only the masked-in feature columns (names follow; splits and
    /// `full_feature_count` are preserved).
    pub fn project_features(&self, mask: &[bool]) -> Result<Dataset> {
        if mask.len() != self.feature_len() {
            return Err(Error::Shape(format!(
                "mask length {} does not match feature count {}",
                mask.len(),
                self.feature_len()
            )));
        }
        if !mask.iter().any(|m| *m) {
            return Err(Error::Config("feature mask keeps no columns".into()));
        }
        let keep: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        let rows = self
            .rows
            .iter()
            .map(|r| DatasetRow {
                features: keep.iter().map(|&i| r.features[i]).collect(),
                ..r.clone()
            })
            .collect();
        Ok(Dataset {
            rows,
            splits: self.splits.clone(),
            feature_names: keep.iter().map(|&i| self.feature_names[i].clone()).collect(),
            codebook_ids: self.codebook_ids.clone(),
            full_feature_count: self.full_feature_count,
        })
    }

    /// Keep only rows generated at the given reporting delay.
    pub fn filter_delta(&self, delta: usize) -> Dataset {
        let mut rows = Vec::new();
        let mut splits = Vec::new();
        for (r, s) in self.rows.iter().zip(&self.splits) {
            if r.delta == delta {
                rows.push(r.clone());
                splits.push(*s);
            }
        }
        Dataset {
            rows,
            splits,
            feature_names: self.feature_names.clone(),
            codebook_ids: self.codebook_ids.clone(),
            full_feature_count: self.full_feature_count,
        }
    }

    /// Append the row's delay (in slots) as an extra feature column.
    pub fn with_delta_feature(&self) -> Dataset {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut features = r.features.clone();
                features.push(r.delta as f64);
                DatasetRow {
                    features,
                    ..r.clone()
                }
            })
            .collect();
        let mut names = self.feature_names.clone();
        names.push("delta".to_string());
        Dataset {
            rows,
            splits: self.splits.clone(),
            feature_names: names,
            codebook_ids: self.codebook_ids.clone(),
            full_feature_count: self.full_feature_count,
        }
    }
}

/// Optimizer and schedule settings (adaptive-moment SGD).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Hidden layer count U.
    pub hidden_layers: usize,
    /// Hidden width override; default is half the full feature count.
    pub hidden_width: Option<usize>,
    pub split_fractions: [f64; 3],
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            epochs: 300,
            batch_size: 32,
            hidden_layers: 2,
            hidden_width: None,
            split_fractions: [0.7, 0.15, 0.15],
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config("learning rate must be finite and >= 0".into()));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("epochs and batch size must be positive".into()));
        }
        if self.split_fractions.iter().any(|f| *f < 0.0)
            || (self.split_fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::Config("split fractions must sum to 1".into()));
        }
        Ok(())
    }
}

/// One point of the training curve.
#[derive(Debug, Clone, Serialize)]
pub struct LossPoint {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: Option<f64>,
}

struct AdamState {
    m_w: Vec<Vec<f64>>,
    v_w: Vec<Vec<f64>>,
    m_b: Vec<Vec<f64>>,
    v_b: Vec<Vec<f64>>,
    t: u64,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl AdamState {
    fn new(model: &PredictorModel) -> Self {
        Self {
            m_w: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            v_w: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            m_b: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
            v_b: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
            t: 0,
        }
    }

    fn step(&mut self, model: &mut PredictorModel, g_w: &[Vec<f64>], g_b: &[Vec<f64>], lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - ADAM_BETA1.powi(self.t as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.t as i32);
        for l in 0..model.weights.len() {
            for i in 0..model.weights[l].len() {
                let g = g_w[l][i];
                self.m_w[l][i] = ADAM_BETA1 * self.m_w[l][i] + (1.0 - ADAM_BETA1) * g;
                self.v_w[l][i] = ADAM_BETA2 * self.v_w[l][i] + (1.0 - ADAM_BETA2) * g * g;
                let mh = self.m_w[l][i] / bc1;
                let vh = self.v_w[l][i] / bc2;
                model.weights[l][i] -= lr * mh / (vh.sqrt() + ADAM_EPS);
            }
            for i in 0..model.biases[l].len() {
                let g = g_b[l][i];
                self.m_b[l][i] = ADAM_BETA1 * self.m_b[l][i] + (1.0 - ADAM_BETA1) * g;
                self.v_b[l][i] = ADAM_BETA2 * self.v_b[l][i] + (1.0 - ADAM_BETA2) * g * g;
                let mh = self.m_b[l][i] / bc1;
                let vh = self.v_b[l][i] / bc2;
                model.biases[l][i] -= lr * mh / (vh.sqrt() + ADAM_EPS);
            }
        }
    }
}

fn mean_mse_over(model: &PredictorModel, dataset: &Dataset, idx: &[usize]) -> f64 {
    let mut acc = 0.0;
    for &i in idx {
        let pred = model
            .forward(&dataset.rows[i].features)
            .expect("validated dims");
        acc += loss(&pred, &dataset.rows[i].labels);
    }
    acc / idx.len() as f64
}

/// Mini-batch Adam on the dataset's train split; returns the
/// best-validation checkpoint (final model if there is no validation split)
/// and the per-epoch loss curve. Deterministic given (dataset, config).
pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<(PredictorModel, Vec<LossPoint>)> {
    config.validate()?;
    dataset.validate()?;
    let train_idx = dataset.indices_in(Split::Train);
    if train_idx.is_empty() {
        return Err(Error::Config("training split is empty".into()));
    }
    let val_idx = dataset.indices_in(Split::Validation);

    let hidden = config
        .hidden_width
        .unwrap_or_else(|| default_hidden_width(dataset.full_feature_count));
    let mut model = init_model(
        dataset.feature_len(),
        hidden,
        config.hidden_layers,
        dataset.label_len(),
        derive_seed(config.seed, "init", 0),
    );
    let mut adam = AdamState::new(&model);

    let mut g_w: Vec<Vec<f64>> = model.weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut g_b: Vec<Vec<f64>> = model.biases.iter().map(|b| vec![0.0; b.len()]).collect();

    let mut curve = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, PredictorModel)> = None;

    for epoch in 0..config.epochs {
        let mut rng = SplitMix64::new(derive_seed(config.seed, "shuffle", epoch as u64));
        let perm = rng.permutation(train_idx.len());
        for batch in perm.chunks(config.batch_size) {
            for gw in g_w.iter_mut() {
                gw.iter_mut().for_each(|v| *v = 0.0);
            }
            for gb in g_b.iter_mut() {
                gb.iter_mut().for_each(|v| *v = 0.0);
            }
            for &pos in batch {
                let row = &dataset.rows[train_idx[pos]];
                let (dw, db) = backprop_sample(&model, &row.features, &row.labels);
                for l in 0..g_w.len() {
                    for (a, b) in g_w[l].iter_mut().zip(&dw[l]) {
                        *a += b;
                    }
                    for (a, b) in g_b[l].iter_mut().zip(&db[l]) {
                        *a += b;
                    }
                }
            }
            let inv = 1.0 / batch.len() as f64;
            for l in 0..g_w.len() {
                g_w[l].iter_mut().for_each(|v| *v *= inv);
                g_b[l].iter_mut().for_each(|v| *v *= inv);
            }
            adam.step(&mut model, &g_w, &g_b, config.learning_rate);
        }

        let train_mse = mean_mse_over(&model, dataset, &train_idx);
        let val_mse = if val_idx.is_empty() {
            None
        } else {
            Some(mean_mse_over(&model, dataset, &val_idx))
        };
        if let Some(v) = val_mse {
            let improved = best.as_ref().map_or(true, |(b, _)| v < *b);
            if improved {
                best = Some((v, model.clone()));
            }
        }
        curve.push(LossPoint {
            epoch,
            train_mse,
            val_mse,
        });
    }

    let final_model = best.map(|(_, m)| m).unwrap_or(model);
    Ok((final_model, curve))
}

/// Per-output MSE over one split (values are plain MSE; reports print them
/// in ×10⁻³ units).
pub fn evaluate_mse(model: &PredictorModel, dataset: &Dataset, split: Split) -> Result<Vec<f64>> {
    let idx = dataset.indices_in(split);
    if idx.is_empty() {
        return Err(Error::Config(format!("split {split:?} is empty")));
    }
    let g = dataset.label_len();
    let mut acc = vec![0.0; g];
    for &i in &idx {
        let pred = model.forward(&dataset.rows[i].features)?;
        for (o, slot) in acc.iter_mut().enumerate() {
            let d = pred[o] - dataset.rows[i].labels[o];
            *slot += d * d;
        }
    }
    Ok(acc.into_iter().map(|s| s / idx.len() as f64).collect())
}

/// Per-output population variance of the labels over one split — the MSE of
/// the label-mean predictor.
pub fn label_variance(dataset: &Dataset, split: Split) -> Result<Vec<f64>> {
    let idx = dataset.indices_in(split);
    if idx.is_empty() {
        return Err(Error::Config(format!("split {split:?} is empty")));
    }
    let g = dataset.label_len();
    let n = idx.len() as f64;
    let mut mean = vec![0.0; g];
    for &i in &idx {
        for (o, m) in mean.iter_mut().enumerate() {
            *m += dataset.rows[i].labels[o];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; g];
    for &i in &idx {
        for (o, v) in var.iter_mut().enumerate() {
            let d = dataset.rows[i].labels[o] - mean[o];
            *v += d * d;
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    Ok(var)
}

/// Permutation importance over one split: for each feature, shuffle that
/// column across rows (seeded), re-evaluate the mean MSE over all outputs,
/// and report the mean increase over the baseline across `repeats`. Never
/// retrains.
pub fn permutation_importance(
    model: &PredictorModel,
    dataset: &Dataset,
    split: Split,
    repeats: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if repeats == 0 {
        return Err(Error::Config("repeats must be >= 1".into()));
    }
    let idx = dataset.indices_in(split);
    if idx.is_empty() {
        return Err(Error::Config(format!("split {split:?} is empty")));
    }
    let features: Vec<Vec<f64>> = idx.iter().map(|&i| dataset.rows[i].features.clone()).collect();
    let labels: Vec<&[f64]> = idx.iter().map(|&i| dataset.rows[i].labels.as_slice()).collect();
    let n = features.len();

    let eval = |feats: &[Vec<f64>]| -> f64 {
        let mut acc = 0.0;
        for (x, y) in feats.iter().zip(&labels) {
            acc += loss(&model.forward(x).expect("dims validated"), y);
        }
        acc / n as f64
    };
    let baseline = eval(&features);

    let d = dataset.feature_len();
    let mut importance = vec![0.0; d];
    let mut scratch = features.clone();
    for (feat, imp) in importance.iter_mut().enumerate() {
        let mut acc = 0.0;
        for rep in 0..repeats {
            let mut rng = SplitMix64::new(derive_seed(
                seed,
                "permute",
                (feat as u64) * repeats as u64 + rep as u64,
            ));
            let perm = rng.permutation(n);
            for (r, &src) in perm.iter().enumerate() {
                scratch[r][feat] = features[src][feat];
            }
            acc += eval(&scratch) - baseline;
        }
        // Restore the column.
        for r in 0..n {
            scratch[r][feat] = features[r][feat];
        }
        *imp = acc / repeats as f64;
    }
    Ok(importance)
}

/// Outcome of one prune-and-retrain run.
#[derive(Debug, Clone)]
pub struct PruneOutcome {
    /// Mask over the dataset's current feature columns.
    pub mask: Vec<bool>,
    pub model: PredictorModel,
    /// Per-codebook MSE on the test split of the pruned dataset.
    pub per_codebook_mse: Vec<f64>,
    pub kept_features: usize,
    /// 1 − kept/total.
    pub overhead_reduction: f64,
}

/// Keep the top `keep_fraction` features by importance (lowest index wins
/// ties), rebuild the mask, retrain from scratch with the same config and
/// seed, and report per-codebook test MSE.
pub fn prune_and_retrain(
    dataset: &Dataset,
    importance: &[f64],
    keep_fraction: f64,
    config: &TrainConfig,
) -> Result<PruneOutcome> {
    let d = dataset.feature_len();
    if importance.len() != d {
        return Err(Error::Shape(format!(
            "importance has {} entries, expected {d}",
            importance.len()
        )));
    }
    if !(0.0..=1.0).contains(&keep_fraction) {
        return Err(Error::Config(format!(
            "keep_fraction {keep_fraction} outside [0, 1]"
        )));
    }
    let keep = ((keep_fraction * d as f64).round() as usize).clamp(1, d);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| importance[b].partial_cmp(&importance[a]).unwrap().then(a.cmp(&b)));
    let mut mask = vec![false; d];
    for &i in order.iter().take(keep) {
        mask[i] = true;
    }

    let pruned = dataset.project_features(&mask)?;
    let (model, _) = train(&pruned, config)?;
    let per_codebook_mse = evaluate_mse(&model, &pruned, Split::Test)?;
    Ok(PruneOutcome {
        mask,
        model,
        per_codebook_mse,
        kept_features: keep,
        overhead_reduction: 1.0 - keep as f64 / d as f64,
    })
}

/// Provenance stored alongside checkpoint parameters so evaluation can
/// rebuild the exact feature view and splits.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMeta {
    pub config_hash: u64,
    pub train_seed: u64,
    /// Row filter on the generation delay, if the model was trained
    /// per-delay.
    pub delta_filter: Option<usize>,
    /// Whether the delay was appended as an extra feature.
    pub delta_feature: bool,
    pub split_fractions: [f64; 3],
    /// Mask over the dataset's feature columns.
    pub feature_mask: Vec<bool>,
}

/// Write a versioned binary checkpoint (layout documented in the module
/// docs). Byte-identical for identical (model, meta).
pub fn save_model(model: &PredictorModel, meta: &ModelMeta, path: &Path) -> Result<()> {
    let mut buf: Vec<u8> = Vec::with_capacity(64 + model.num_params() * 8);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&meta.config_hash.to_le_bytes());
    buf.extend_from_slice(&meta.train_seed.to_le_bytes());
    let df: i64 = meta.delta_filter.map_or(-1, |d| d as i64);
    buf.extend_from_slice(&df.to_le_bytes());
    buf.push(meta.delta_feature as u8);
    for f in meta.split_fractions {
        buf.extend_from_slice(&f.to_le_bytes());
    }
    buf.extend_from_slice(&(meta.feature_mask.len() as u32).to_le_bytes());
    buf.extend(meta.feature_mask.iter().map(|&m| m as u8));
    buf.extend_from_slice(&model.seed.to_le_bytes());
    buf.extend_from_slice(&(model.layer_widths.len() as u32).to_le_bytes());
    for w in &model.layer_widths {
        buf.extend_from_slice(&(*w as u32).to_le_bytes());
    }
    for l in 0..model.weights.len() {
        for v in &model.weights[l] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for v in &model.biases[l] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

/// Read a checkpoint written by [`save_model`].
pub fn load_model(path: &Path) -> Result<(PredictorModel, ModelMeta)> {
    let fmt_err = |msg: &str| Error::Format {
        path: path.display().to_string(),
        line: 0,
        msg: msg.to_string(),
    };
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    let mut cur = 0usize;
    let mut take = |n: usize| -> Result<&[u8]> {
        if cur + n > buf.len() {
            return Err(fmt_err("truncated checkpoint"));
        }
        let s = &buf[cur..cur + n];
        cur += n;
        Ok(s)
    };

    if take(8)? != MAGIC {
        return Err(fmt_err("bad magic bytes"));
    }
    let version = u32::from_le_bytes(take(4)?.try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(fmt_err(&format!(
            "unsupported checkpoint version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let config_hash = u64::from_le_bytes(take(8)?.try_into().unwrap());
    let train_seed = u64::from_le_bytes(take(8)?.try_into().unwrap());
    let df = i64::from_le_bytes(take(8)?.try_into().unwrap());
    let delta_filter = (df >= 0).then_some(df as usize);
    let delta_feature = take(1)?[0] != 0;
    let mut split_fractions = [0.0; 3];
    for f in &mut split_fractions {
        *f = f64::from_le_bytes(take(8)?.try_into().unwrap());
    }
    let mask_len = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
    let feature_mask: Vec<bool> = take(mask_len)?.iter().map(|&b| b != 0).collect();
    let model_seed = u64::from_le_bytes(take(8)?.try_into().unwrap());
    let n_widths = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
    if n_widths < 2 {
        return Err(fmt_err("checkpoint needs at least input and output layers"));
    }
    let mut layer_widths = Vec::with_capacity(n_widths);
    for _ in 0..n_widths {
        layer_widths.push(u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize);
    }
    let mut weights = Vec::with_capacity(n_widths - 1);
    let mut biases = Vec::with_capacity(n_widths - 1);
    for l in 0..n_widths - 1 {
        let wn = layer_widths[l] * layer_widths[l + 1];
        let mut w = Vec::with_capacity(wn);
        for _ in 0..wn {
            w.push(f64::from_le_bytes(take(8)?.try_into().unwrap()));
        }
        let mut b = Vec::with_capacity(layer_widths[l + 1]);
        for _ in 0..layer_widths[l + 1] {
            b.push(f64::from_le_bytes(take(8)?.try_into().unwrap()));
        }
        weights.push(w);
        biases.push(b);
    }
    if cur != buf.len() {
        return Err(fmt_err("trailing bytes after parameters"));
    }
    Ok((
        PredictorModel {
            layer_widths,
            weights,
            biases,
            seed: model_seed,
        },
        ModelMeta {
            config_hash,
            train_seed,
            delta_filter,
            delta_feature,
            split_fractions,
            feature_mask,
        },
    ))
}
