//! `dataset`, `train` and `predict`.

use crate::analysis::surrogate_input;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{self, CurveRow, CURVE_HEADER};
use risop_core::surrogate::{
    generate_dataset_with, load_model, predict_op, read_dataset, regression_metrics, save_model,
    split_dataset, train_lm, Dataset, DatasetRecord, DatasetWriter, GenerationReport, LabelMethod,
    LmHyper, MlpModel, TargetMode, TrainReport,
};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

pub const SPLIT: (f64, f64, f64) = (0.7, 0.1, 0.2);

pub fn label_method(cfg: &RunConfig) -> CliResult<LabelMethod> {
    Ok(LabelMethod::parse(
        cfg.label.as_deref().unwrap_or("exact_numeric"),
        cfg.mc_samples.unwrap_or(1_000_000),
    )?)
}

/// Label `cfg.records` records into `path`, streaming as they complete.
pub fn generate_to(cfg: &RunConfig, path: &Path) -> CliResult<GenerationReport> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = DatasetWriter::new(BufWriter::new(File::create(path)?))?;
    let report = generate_dataset_with(
        cfg.records.unwrap_or(10_000),
        &cfg.ranges(),
        label_method(cfg)?,
        cfg.seed(),
        |r| w.push(r),
    )?;
    w.finish()?;
    Ok(report)
}

pub fn run_dataset(cfg: &RunConfig, json: bool) -> CliResult<()> {
    let path = cfg.output.clone().unwrap_or_else(|| PathBuf::from("dataset.csv"));
    let started = std::time::Instant::now();
    let report = generate_to(cfg, &path)?;
    let seconds = started.elapsed().as_secs_f64();
    if json {
        return output::print_json(&serde_json::json!({
            "path": path, "written": report.written, "skipped": report.skipped, "seconds": seconds
        }));
    }
    println!(
        "wrote {} records to {} ({} skipped, {seconds:.1} s)",
        report.written,
        path.display(),
        report.skipped
    );
    Ok(())
}

pub fn read_dataset_file(path: &Path) -> CliResult<Dataset> {
    let f = File::open(path).map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
    Ok(read_dataset(f)?)
}

pub fn hyper(cfg: &RunConfig) -> LmHyper {
    let d = LmHyper::default();
    LmHyper {
        max_epochs: cfg.max_epochs.unwrap_or(d.max_epochs),
        patience: cfg.patience.unwrap_or(d.patience),
        target_mode: if cfg.log_targets == Some(true) { TargetMode::Log10 } else { TargetMode::Raw },
        ..d
    }
}

pub struct Trained {
    pub model: MlpModel,
    pub report: TrainReport,
    pub train: Dataset,
    pub test: Dataset,
    pub validation: Dataset,
    pub seconds: f64,
}

pub fn train_on(ds: &Dataset, cfg: &RunConfig) -> CliResult<Trained> {
    let (train, test, validation) = split_dataset(ds, SPLIT, cfg.seed())?;
    let started = std::time::Instant::now();
    let (model, report) = train_lm(&train, &validation, &hyper(cfg), cfg.seed())?;
    let seconds = started.elapsed().as_secs_f64();
    let report = report.with_test(&model, &test)?;
    Ok(Trained {
        model,
        report,
        train,
        test,
        validation,
        seconds,
    })
}

pub fn curve_rows(report: &TrainReport) -> Vec<CurveRow> {
    report
        .train_mse
        .iter()
        .zip(&report.validation_mse)
        .enumerate()
        .map(|(epoch, (&train_mse, &validation_mse))| CurveRow {
            epoch,
            train_mse,
            validation_mse,
        })
        .collect()
}

pub fn run_train(cfg: &RunConfig, json: bool, curve: Option<&Path>) -> CliResult<()> {
    let data = cfg.data.as_deref().ok_or_else(|| CliError::usage("train needs --data"))?;
    let ds = read_dataset_file(data)?;
    let t = train_on(&ds, cfg)?;
    let path = cfg.output.clone().unwrap_or_else(|| PathBuf::from("model.json"));
    save_model(&t.model, &path)?;
    if let Some(c) = curve {
        output::write_csv(Some(c), &curve_rows(&t.report), &CURVE_HEADER)?;
    }
    let val = regression_metrics(&t.model, &t.validation)?;
    if json {
        return output::print_json(&serde_json::json!({
            "model": path,
            "seconds": t.seconds,
            "validation_mse": val.mse,
            "validation_r": val.r,
            "report": t.report,
        }));
    }
    let r = &t.report;
    let rows = vec![
        vec!["records (train/test/validation)".into(), format!("{}/{}/{}", t.train.len(), t.test.len(), t.validation.len())],
        vec!["best_epoch".into(), r.best_epoch.to_string()],
        vec!["stop_epoch".into(), format!("{} ({:?})", r.stop_epoch, r.stop_reason)],
        vec!["validation_mse".into(), output::sci(val.mse)],
        vec!["validation_r".into(), format!("{:.6}", val.r)],
        vec!["test_mse".into(), output::sci(r.test_mse.unwrap_or(f64::NAN))],
        vec!["test_r".into(), format!("{:.6}", r.regression_r.unwrap_or(f64::NAN))],
        vec!["seconds".into(), format!("{:.1}", t.seconds)],
        vec!["model".into(), path.display().to_string()],
    ];
    print!("{}", output::table(&["quantity", "value"], &rows));
    Ok(())
}

pub fn run_predict(cfg: &RunConfig, json: bool) -> CliResult<()> {
    let path = cfg.model.as_deref().ok_or_else(|| CliError::usage("predict needs --model"))?;
    let model = load_model(path)?;
    if let Some(data) = &cfg.data {
        let ds = read_dataset_file(data)?;
        let mut extrapolated = 0usize;
        let records: Vec<DatasetRecord> = ds
            .records
            .iter()
            .map(|r| {
                let e = predict_op(&model, &r.input);
                extrapolated += usize::from(e.has_flag(risop_core::EstimateFlag::Extrapolation));
                DatasetRecord {
                    input: r.input,
                    target: e.value,
                }
            })
            .collect();
        if extrapolated > 0 {
            log::warn!("{extrapolated} inputs lie outside the training range");
        }
        let w = output::sink(cfg.output.as_deref())?;
        return Ok(risop_core::surrogate::write_dataset(w, records)?);
    }
    let params = cfg.params()?;
    let e = predict_op(&model, &surrogate_input(&params));
    if json {
        return output::print_json(&e);
    }
    let flag = if e.has_flag(risop_core::EstimateFlag::Extrapolation) { "extrapolation" } else { "" };
    print!(
        "{}",
        output::table(
            &["method", "p_out", "err", "flags"],
            &[vec!["surrogate".into(), output::sci(e.value), output::sci(e.err.magnitude()), flag.into()]]
        )
    );
    Ok(())
}
