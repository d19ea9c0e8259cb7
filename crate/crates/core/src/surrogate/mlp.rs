//! Fully connected tanh network with min-max input scaling.

use super::dataset::Dataset;
use crate::analytic::{ErrorBound, EstimateFlag, OutageEstimate, OutageMethod};
use crate::error::{Error, Result};
use crate::rng;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const LAYER_SIZES: [usize; 5] = [7, 20, 30, 20, 1];
pub const MODEL_VERSION: u32 = 1;
/// Inputs further than this fraction of the training range outside it are
/// flagged as extrapolation.
const EXTRAPOLATION_MARGIN: f64 = 0.1;
/// Smallest target represented in log mode.
const LOG_FLOOR: f64 = 1e-12;

/// How outage targets are presented to the network.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    #[default]
    Raw,
    /// Network fits `log10(max(P, 1e-12))`.
    Log10,
}

impl TargetMode {
    pub fn encode(&self, p: f64) -> f64 {
        match self {
            TargetMode::Raw => p,
            TargetMode::Log10 => p.max(LOG_FLOOR).log10(),
        }
    }

    pub fn decode(&self, v: f64) -> f64 {
        match self {
            TargetMode::Raw => v,
            TargetMode::Log10 => 10f64.powf(v),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelMetadata {
    pub seed: u64,
    pub best_epoch: usize,
    pub validation_mse: f64,
    pub train_records: usize,
    pub target_mode: TargetMode,
    pub init: String,
    pub training: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols`.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub version: u32,
    pub layer_sizes: Vec<usize>,
    pub activation: String,
    pub norm_min: [f64; 7],
    pub norm_max: [f64; 7],
    pub weights: Vec<Layer>,
    #[serde(default)]
    pub metadata: ModelMetadata,
}

impl MlpModel {
    /// Fresh network with fan-in scaled uniform weights and bounds taken
    /// from `data`.
    pub fn init(data: &Dataset, seed: u64) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidParams("cannot derive normalization from an empty dataset".into()));
        }
        let mut lo = [f64::INFINITY; 7];
        let mut hi = [f64::NEG_INFINITY; 7];
        for x in data.inputs() {
            for k in 0..7 {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
        }
        for k in 0..7 {
            if hi[k] <= lo[k] {
                // Constant feature: any ordered bracket maps it to -1.
                hi[k] = lo[k] + 1.0;
            }
        }
        let mut r = rng::aux_stream(seed, 3);
        let weights = LAYER_SIZES
            .windows(2)
            .map(|w| {
                let (cols, rows) = (w[0], w[1]);
                let bound = (1.0 / cols as f64).sqrt();
                Layer {
                    rows,
                    cols,
                    weights: (0..rows * cols).map(|_| r.random_range(-bound..bound)).collect(),
                    biases: (0..rows).map(|_| r.random_range(-bound..bound)).collect(),
                }
            })
            .collect();
        Ok(MlpModel {
            version: MODEL_VERSION,
            layer_sizes: LAYER_SIZES.to_vec(),
            activation: "tanh".into(),
            norm_min: lo,
            norm_max: hi,
            weights,
            metadata: ModelMetadata {
                seed,
                init: "uniform(+-1/sqrt(fan_in))".into(),
                ..ModelMetadata::default()
            },
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.version == 0 {
            return Err(Error::Format("model version must be at least 1".into()));
        }
        if self.activation != "tanh" {
            return Err(Error::Format(format!("unsupported activation '{}'", self.activation)));
        }
        if self.layer_sizes.first() != Some(&7) || self.layer_sizes.last() != Some(&1) {
            return Err(Error::Format(format!("layer sizes {:?} must map 7 inputs to 1 output", self.layer_sizes)));
        }
        if self.weights.len() + 1 != self.layer_sizes.len() {
            return Err(Error::Format("layer count does not match layer_sizes".into()));
        }
        for (l, w) in self.weights.iter().zip(self.layer_sizes.windows(2)) {
            if l.cols != w[0] || l.rows != w[1] || l.weights.len() != l.rows * l.cols || l.biases.len() != l.rows {
                return Err(Error::Format(format!("layer shape {}x{} inconsistent", l.rows, l.cols)));
            }
        }
        if (0..7).any(|k| !(self.norm_min[k] < self.norm_max[k])) {
            return Err(Error::Format("normalization bounds must be strictly ordered".into()));
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Parameters in layer order, weights (row-major) before biases.
    pub fn params(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n_params());
        for l in &self.weights {
            v.extend_from_slice(&l.weights);
            v.extend_from_slice(&l.biases);
        }
        v
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.n_params());
        let mut off = 0;
        for l in &mut self.weights {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&p[off..off + nw]);
            off += nw;
            let nb = l.biases.len();
            l.biases.copy_from_slice(&p[off..off + nb]);
            off += nb;
        }
    }

    pub fn normalize(&self, x: &[f64; 7]) -> [f64; 7] {
        std::array::from_fn(|k| 2.0 * (x[k] - self.norm_min[k]) / (self.norm_max[k] - self.norm_min[k]) - 1.0)
    }

    /// Per-layer activations for a normalized input; the last entry is the
    /// (unclamped, encoded) network output.
    fn activations(&self, xn: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.weights.len() + 1);
        acts.push(xn.to_vec());
        let last = self.weights.len() - 1;
        for (li, l) in self.weights.iter().enumerate() {
            let a = acts.last().unwrap();
            let z: Vec<f64> = (0..l.rows)
                .map(|i| {
                    let row = &l.weights[i * l.cols..(i + 1) * l.cols];
                    l.biases[i] + row.iter().zip(a).map(|(w, v)| w * v).sum::<f64>()
                })
                .collect();
            acts.push(if li == last { z } else { z.into_iter().map(f64::tanh).collect() });
        }
        acts
    }

    /// Raw network output in the encoded target space.
    pub fn forward(&self, x: &[f64; 7]) -> f64 {
        self.activations(&self.normalize(x)).pop().unwrap()[0]
    }

    /// Network output and its gradient with respect to [`Self::params`]
    /// (written into `grad`).
    pub fn forward_grad(&self, x: &[f64; 7], grad: &mut [f64]) -> f64 {
        let acts = self.activations(&self.normalize(x));
        let out = acts.last().unwrap()[0];
        // Offsets of each layer's block inside the parameter vector.
        let mut offs = Vec::with_capacity(self.weights.len());
        let mut off = 0;
        for l in &self.weights {
            offs.push(off);
            off += l.weights.len() + l.biases.len();
        }
        let mut delta = vec![1.0];
        for li in (0..self.weights.len()).rev() {
            let l = &self.weights[li];
            let a = &acts[li];
            let o = offs[li];
            for i in 0..l.rows {
                let g = &mut grad[o + i * l.cols..o + (i + 1) * l.cols];
                for (gj, aj) in g.iter_mut().zip(a) {
                    *gj = delta[i] * aj;
                }
                grad[o + l.weights.len() + i] = delta[i];
            }
            if li > 0 {
                delta = (0..l.cols)
                    .map(|j| {
                        let s: f64 = (0..l.rows).map(|i| l.weights[i * l.cols + j] * delta[i]).sum();
                        s * (1.0 - a[j] * a[j])
                    })
                    .collect();
            }
        }
        out
    }

    /// Decoded prediction clamped to `[0, 1]`.
    pub fn predict(&self, x: &[f64; 7]) -> f64 {
        self.metadata.target_mode.decode(self.forward(x)).clamp(0.0, 1.0)
    }

    /// True when some feature lies more than 10% of its range outside the
    /// training bounds.
    pub fn is_extrapolating(&self, x: &[f64; 7]) -> bool {
        (0..7).any(|k| {
            let span = self.norm_max[k] - self.norm_min[k];
            x[k] < self.norm_min[k] - EXTRAPOLATION_MARGIN * span || x[k] > self.norm_max[k] + EXTRAPOLATION_MARGIN * span
        })
    }
}

/// Surrogate outage estimate with the model's validation RMSE attached.
pub fn predict_op(model: &MlpModel, input: &[f64; 7]) -> OutageEstimate {
    let raw = model.metadata.target_mode.decode(model.forward(input));
    let mut est = OutageEstimate::new(
        raw.clamp(0.0, 1.0),
        OutageMethod::Surrogate,
        ErrorBound::Model {
            rmse: Some(model.metadata.validation_mse.max(0.0).sqrt()),
        },
    );
    if !(0.0..=1.0).contains(&raw) {
        est.flag(EstimateFlag::Clamped);
    }
    if model.is_extrapolating(input) {
        log::warn!("surrogate input {input:?} outside the training range");
        est.flag(EstimateFlag::Extrapolation);
    }
    est
}

pub fn save_model(model: &MlpModel, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(model).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<MlpModel> {
    let text = std::fs::read_to_string(path)?;
    let model: MlpModel = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    if model.version > MODEL_VERSION {
        log::warn!("model version {} is newer than {MODEL_VERSION}; unknown fields ignored", model.version);
    }
    model.validate()?;
    Ok(model)
}
