//! Learned outage predictor: dataset generation, a small tanh MLP trained by
//! full-batch Levenberg–Marquardt, inference and regression metrics.

pub mod dataset;
pub mod mlp;
pub mod train;

pub use dataset::{
    generate_dataset, generate_dataset_with, read_dataset, split_dataset, write_dataset,
    Dataset, DatasetRecord, DatasetWriter, GenerationReport, LabelMethod, SamplingRanges, CSV_HEADER,
};
pub use mlp::{load_model, predict_op, save_model, MlpModel, ModelMetadata, TargetMode, LAYER_SIZES};
pub use train::{regression_metrics, train_lm, LmHyper, RegressionMetrics, TrainReport};
