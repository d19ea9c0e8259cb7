//! Full-batch Levenberg–Marquardt training with validation early stopping.

use super::dataset::Dataset;
use super::mlp::{MlpModel, TargetMode};
use crate::error::{Error, Result};
use faer::linalg::matmul::matmul;
use faer::linalg::matmul::triangular::{self, BlockStructure};
use faer::prelude::*;
use faer::{Accum, Mat, MatRef, Par, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LmHyper {
    pub lambda0: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub max_epochs: usize,
    pub patience: usize,
    /// Rejected steps allowed per epoch before the epoch ends without a move.
    pub max_retries: usize,
    /// Damping beyond which no further progress is attempted.
    pub lambda_max: f64,
    pub target_mode: TargetMode,
}

impl Default for LmHyper {
    fn default() -> Self {
        LmHyper {
            lambda0: 1e-3,
            lambda_up: 10.0,
            lambda_down: 0.1,
            max_epochs: 1000,
            patience: 6,
            max_retries: 12,
            lambda_max: 1e12,
            target_mode: TargetMode::Raw,
        }
    }
}

impl LmHyper {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lambda0 > 0.0
            && self.lambda_up > 1.0
            && self.lambda_down > 0.0
            && self.lambda_down < 1.0
            && self.max_epochs > 0
            && self.patience > 0
            && self.max_retries > 0
            && self.lambda_max >= self.lambda0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid LM hyper-parameters {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EarlyStopping,
    MaxEpochs,
    /// Damping exceeded its ceiling: no step reduces the training error.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Entry 0 is the initial network; entry `e` follows epoch `e`.
    pub train_mse: Vec<f64>,
    pub validation_mse: Vec<f64>,
    pub lambda: Vec<f64>,
    pub accepted: Vec<bool>,
    pub best_epoch: usize,
    pub stop_epoch: usize,
    pub stop_reason: StopReason,
    pub patience: usize,
    pub test_mse: Option<f64>,
    pub regression_r: Option<f64>,
}

impl TrainReport {
    /// Fill the held-out metrics from `test`.
    pub fn with_test(mut self, model: &MlpModel, test: &Dataset) -> Result<Self> {
        let m = regression_metrics(model, test)?;
        self.test_mse = Some(m.mse);
        self.regression_r = Some(m.r);
        Ok(self)
    }
}

fn encoded_targets(ds: &Dataset, mode: TargetMode) -> Vec<f64> {
    ds.records.iter().map(|r| mode.encode(r.target)).collect()
}

fn mse(model: &MlpModel, ds: &Dataset, targets: &[f64]) -> f64 {
    let preds: Vec<f64> = ds.records.par_iter().map(|r| model.forward(&r.input)).collect();
    preds.iter().zip(targets).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / targets.len() as f64
}

/// Row-major Jacobian of the outputs and the residuals `t − f`.
fn jacobian(model: &MlpModel, ds: &Dataset, targets: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let np = model.n_params();
    let mut jac = vec![0.0; ds.len() * np];
    let outs: Vec<f64> = jac
        .par_chunks_mut(np)
        .zip(ds.records.par_iter())
        .map(|(row, r)| model.forward_grad(&r.input, row))
        .collect();
    if jac.iter().chain(&outs).any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite Jacobian entry; check input scaling".into()));
    }
    let resid = outs.iter().zip(targets).map(|(o, t)| t - o).collect();
    Ok((jac, resid))
}

/// Train the fixed-architecture network on `train`, early stopping on
/// `validation`, and return the best-validation weights.
pub fn train_lm(train: &Dataset, validation: &Dataset, hyper: &LmHyper, seed: u64) -> Result<(MlpModel, TrainReport)> {
    hyper.validate()?;
    if train.is_empty() || validation.is_empty() {
        return Err(Error::InvalidParams("training and validation splits must be nonempty".into()));
    }
    let mut model = MlpModel::init(train, seed)?;
    model.metadata.target_mode = hyper.target_mode;
    let t_train = encoded_targets(train, hyper.target_mode);
    let t_val = encoded_targets(validation, hyper.target_mode);
    let np = model.n_params();
    let n = train.len();

    let mut w = model.params();
    let mut cur = mse(&model, train, &t_train);
    let mut best_val = mse(&model, validation, &t_val);
    let mut best_w = w.clone();
    let mut report = TrainReport {
        train_mse: vec![cur],
        validation_mse: vec![best_val],
        lambda: vec![hyper.lambda0],
        accepted: vec![false],
        best_epoch: 0,
        stop_epoch: 0,
        stop_reason: StopReason::MaxEpochs,
        patience: hyper.patience,
        test_mse: None,
        regression_r: None,
    };
    let mut lambda = hyper.lambda0;
    let mut wait = 0;
    let dim = n.min(np);
    let mut gram = Mat::<f64>::zeros(dim, dim);

    for epoch in 1..=hyper.max_epochs {
        let (jac, resid) = jacobian(&model, train, &t_train)?;
        // Column i of Jᵀ is the gradient row of record i.
        let jt = MatRef::from_column_major_slice(&jac, np, n);
        let resid_mat = Mat::<f64>::from_fn(n, 1, |i, _| resid[i]);
        // With fewer records than parameters the step is solved in the
        // equivalent n × n form δ = Jᵀ(JJᵀ + λI)⁻¹ r.
        let dual = n < np;
        // Only the lower triangle is formed; the factorization reads no more.
        let (lhs, rhs_j) = if dual { (jt.transpose(), jt) } else { (jt, jt.transpose()) };
        triangular::matmul(
            gram.as_mut(),
            BlockStructure::TriangularLower,
            Accum::Replace,
            lhs,
            BlockStructure::Rectangular,
            rhs_j,
            BlockStructure::Rectangular,
            1.0,
            Par::Seq,
        );
        let mut grad = Mat::<f64>::zeros(np, 1);
        matmul(grad.as_mut(), Accum::Replace, jt, resid_mat.as_ref(), 1.0, Par::Seq);
        let rhs = if dual { &resid_mat } else { &grad };

        let mut accepted = false;
        let mut stalled = false;
        for _ in 0..hyper.max_retries {
            let mut a = gram.clone();
            for k in 0..a.nrows() {
                a[(k, k)] += lambda;
            }
            let llt = a.llt(Side::Lower).map_err(|e| {
                Error::Training(format!("normal equations singular at lambda = {lambda:e} (epoch {epoch}): {e:?}"))
            })?;
            let mut delta = llt.solve(rhs);
            if dual {
                delta = jt * &delta;
            }
            let trial: Vec<f64> = (0..np).map(|k| w[k] + delta[(k, 0)]).collect();
            model.set_params(&trial);
            let m = mse(&model, train, &t_train);
            if m < cur {
                w = trial;
                cur = m;
                lambda *= hyper.lambda_down;
                accepted = true;
                break;
            }
            lambda *= hyper.lambda_up;
            if lambda > hyper.lambda_max {
                stalled = true;
                break;
            }
        }
        model.set_params(&w);

        let val = mse(&model, validation, &t_val);
        report.train_mse.push(cur);
        report.validation_mse.push(val);
        report.lambda.push(lambda);
        report.accepted.push(accepted);
        log::debug!("epoch {epoch}: train {cur:.4e} validation {val:.4e} lambda {lambda:.1e}");
        report.stop_epoch = epoch;
        if val < best_val {
            best_val = val;
            best_w.clone_from(&w);
            report.best_epoch = epoch;
            wait = 0;
        } else {
            wait += 1;
            if wait == hyper.patience {
                report.stop_reason = StopReason::EarlyStopping;
                break;
            }
        }
        if stalled {
            report.stop_reason = StopReason::Stalled;
            break;
        }
    }

    model.set_params(&best_w);
    model.metadata.best_epoch = report.best_epoch;
    model.metadata.validation_mse = best_val;
    model.metadata.train_records = n;
    model.metadata.training = format!(
        "levenberg-marquardt lambda0={} up={} down={} patience={}",
        hyper.lambda0, hyper.lambda_up, hyper.lambda_down, hyper.patience
    );
    Ok((model, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub mse: f64,
    /// Pearson correlation between predictions and targets.
    pub r: f64,
    pub n: usize,
}

/// Mean squared error and Pearson `R` of clamped predictions on `ds`.
pub fn regression_metrics(model: &MlpModel, ds: &Dataset) -> Result<RegressionMetrics> {
    if ds.is_empty() {
        return Err(Error::InvalidParams("cannot evaluate on an empty split".into()));
    }
    let preds: Vec<f64> = ds.records.par_iter().map(|r| model.predict(&r.input)).collect();
    metrics_from(&preds, &ds.targets())
}

pub(crate) fn metrics_from(preds: &[f64], targets: &[f64]) -> Result<RegressionMetrics> {
    let n = targets.len() as f64;
    let mse = preds.iter().zip(targets).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / n;
    let mp = preds.iter().sum::<f64>() / n;
    let mt = targets.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (p, t) in preds.iter().zip(targets) {
        sxy += (p - mp) * (t - mt);
        sxx += (p - mp) * (p - mp);
        syy += (t - mt) * (t - mt);
    }
    if syy == 0.0 || sxx == 0.0 {
        return Err(Error::UndefinedCorrelation(format!(
            "zero variance in {}",
            if syy == 0.0 { "targets" } else { "predictions" }
        )));
    }
    Ok(RegressionMetrics {
        mse,
        r: sxy / (sxx * syy).sqrt(),
        n: targets.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogate::dataset::DatasetRecord;

    fn smooth(n: usize, offset: usize) -> Dataset {
        Dataset {
            records: (0..n)
                .map(|i| {
                    let u = ((i + offset) as f64 * 0.618_033_988_75).fract();
                    let v = ((i + offset) as f64 * 0.414_213_562_37).fract();
                    let x = [10.0 * u - 5.0, 20.0 * v, 1.0, 1.0, 1.0, 1.0, 4.0];
                    let t = 1.0 / (1.0 + (0.2 * x[1] - x[0] * 0.5).exp());
                    DatasetRecord::new(x, t).unwrap()
                })
                .collect(),
        }
    }

    #[test]
    fn metrics_edge_cases() {
        let m = metrics_from(&[0.1, 0.2, 0.3], &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(m.mse, 0.0);
        assert!((m.r - 1.0).abs() < 1e-15);
        assert!(matches!(metrics_from(&[0.1, 0.2], &[0.5, 0.5]), Err(Error::UndefinedCorrelation(_))));
    }

    #[test]
    fn lm_fits_smooth_target_and_stops_by_patience() {
        let (train, val) = (smooth(200, 0), smooth(60, 1000));
        let hyper = LmHyper {
            max_epochs: 300,
            ..LmHyper::default()
        };
        let (model, rep) = train_lm(&train, &val, &hyper, 5).unwrap();
        // Accepted steps never increase the training error.
        assert!(rep.train_mse.windows(2).all(|w| w[1] <= w[0]));
        let best = rep.validation_mse[rep.best_epoch];
        assert!(best < 1e-4, "validation {best}");
        assert_eq!(model.metadata.validation_mse, best);
        if rep.stop_reason == StopReason::EarlyStopping {
            assert_eq!(rep.stop_epoch - rep.best_epoch, hyper.patience);
        }
        let again = train_lm(&train, &val, &hyper, 5).unwrap().1;
        assert_eq!(again.train_mse, rep.train_mse);
    }
}
