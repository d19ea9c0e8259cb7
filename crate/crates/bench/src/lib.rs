//! Shared fixtures for the benchmarks.

use risop_core::surrogate::{Dataset, DatasetRecord, MlpModel};
use risop_core::SystemParams;

/// Unit-variance scenario at a 0 dB threshold and INR.
pub fn scenario(n: u32, snr_db: f64) -> SystemParams {
    SystemParams::unit(n, snr_db, 0.0, 0.0).expect("valid scenario")
}

/// Untrained network over the default input ranges; inference cost does not
/// depend on the weights.
pub fn model() -> MlpModel {
    let records = (0..8)
        .map(|i| {
            let v = i as f64 / 7.0;
            DatasetRecord::new(
                [20.0 * v - 10.0, 40.0 * v - 15.0, 0.5 + 1.5 * v, 2.0 - 1.5 * v, 1.0, 1.0, (2.0 + 62.0 * v).round()],
                0.5 * v,
            )
            .expect("valid record")
        })
        .collect();
    MlpModel::init(&Dataset { records }, 1).expect("model")
}

/// `n` inputs spread over the sampling box.
pub fn inputs(n: usize) -> Vec<[f64; 7]> {
    (0..n)
        .map(|i| {
            let u = (i as f64 * 0.618_033_988_75).fract();
            let v = (i as f64 * 0.414_213_562_37).fract();
            [20.0 * u - 10.0, 40.0 * v - 15.0, 1.0, 1.0, 1.0, 1.0, (2.0 + 62.0 * u).round()]
        })
        .collect()
}
