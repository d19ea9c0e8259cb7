//! `reproduce <target>`: canned figure and table data under `--out-dir`.

use crate::analysis::{axis_values, pdf_grids, pdf_rows, sweep_rows, Axis, Evaluator, PdfKind};
use crate::config::{RunConfig, CANONICAL};
use crate::error::{CliError, CliResult};
use crate::output::{
    self, RegressionRow, SweepRow, TimingRow, CURVE_HEADER, PDF_HEADER, REGRESSION_HEADER, SWEEP_HEADER,
    TIMING_HEADER,
};
use crate::surrogate_cmd::{curve_rows, generate_to, read_dataset_file, train_on, Trained};
use risop_core::surrogate::{load_model, regression_metrics, save_model, split_dataset, Dataset, MlpModel};
use risop_core::{op_exact, OutageMethod, PdfGrid, PdfMethod};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub fn print_config(target: &str) -> CliResult<()> {
    let (_, text) = CANONICAL
        .iter()
        .find(|(t, _)| *t == target)
        .ok_or_else(|| CliError::usage(format!("unknown reproduce target '{target}'")))?;
    print!("{text}");
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct Produced {
    target: String,
    files: Vec<PathBuf>,
    summary: Vec<(String, f64)>,
}

pub fn run_reproduce(target: &str, cfg: &RunConfig, out_dir: &Path, json: bool) -> CliResult<()> {
    std::fs::create_dir_all(out_dir)?;
    let p = match target {
        "fig3" => densities(PdfKind::X, target, cfg, out_dir)?,
        "fig4" => densities(PdfKind::Y, target, cfg, out_dir)?,
        "fig5" => snr_curves(cfg, out_dir)?,
        "fig6" => inr_curves(cfg, out_dir)?,
        "fig7" | "fig8" | "table1" => surrogate_pipeline(target, cfg, out_dir)?,
        other => return Err(CliError::usage(format!("unknown reproduce target '{other}'"))),
    };
    if json {
        return output::print_json(&p);
    }
    for f in &p.files {
        println!("wrote {}", f.display());
    }
    let cells: Vec<Vec<String>> = p.summary.iter().map(|(k, v)| vec![k.clone(), format!("{v:.6e}")]).collect();
    print!("{}", output::table(&["quantity", "value"], &cells));
    Ok(())
}

/// L1 distance between a density and the exact one, on the exact support.
fn l1_to(exact: &PdfGrid, other: &PdfGrid) -> f64 {
    let s = &exact.support;
    let diff: Vec<f64> = s.iter().zip(&exact.density).map(|(&x, &f)| (f - other.density_at(x)).abs()).collect();
    s.windows(2).zip(diff.windows(2)).map(|(x, d)| 0.5 * (x[1] - x[0]) * (d[0] + d[1])).sum()
}

fn n_values(cfg: &RunConfig) -> Vec<u32> {
    cfg.n_values.clone().unwrap_or_else(|| vec![cfg.n.unwrap_or(8)])
}

fn densities(kind: PdfKind, target: &str, cfg: &RunConfig, out_dir: &Path) -> CliResult<Produced> {
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for n in n_values(cfg) {
        let params = cfg.params_with(n, cfg.inr_db.unwrap_or(0.0))?;
        let grids = pdf_grids(kind, &params, cfg)?;
        let path = out_dir.join(format!("{target}_n{n}.csv"));
        output::write_csv(Some(&path), &pdf_rows(&grids), &PDF_HEADER)?;
        files.push(path);
        let approx = |m: PdfMethod| matches!(m, PdfMethod::GammaFit | PdfMethod::Histogram);
        if let Some(exact) = grids.iter().find(|g| !approx(g.method)) {
            for g in grids.iter().filter(|g| approx(g.method)) {
                summary.push((format!("N={n} L1({})", g.method.tag()), l1_to(exact, g)));
            }
        }
    }
    Ok(Produced {
        target: target.into(),
        files,
        summary,
    })
}

/// First axis value where `method` falls to `level`, interpolated in log10.
pub fn crossing(rows: &[SweepRow], method: &str, level: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.method == method && r.p_out > 0.0 && r.p_out.is_finite())
        .map(|r| (r.axis_value, r.p_out.log10()))
        .collect();
    let l = level.log10();
    pts.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        ((y0 - l) * (y1 - l) <= 0.0 && y0 != y1).then(|| x0 + (l - y0) * (x1 - x0) / (y1 - y0))
    })
}

fn curves(cfg: &RunConfig, out_dir: &Path, target: &str, axis: Axis) -> CliResult<Produced> {
    let values = axis_values(cfg, axis)?;
    let ev = Evaluator::new(cfg, &["exact", "gamma-numeric", "asymptotic"], 100_000)?;
    let exact = OutageMethod::ExactNumeric.tag();
    let mut files = Vec::new();
    let mut summary = Vec::new();
    let inrs = match axis {
        Axis::InrDb => vec![None],
        _ => cfg
            .inr_values
            .clone()
            .unwrap_or_else(|| vec![cfg.inr_db.unwrap_or(0.0)])
            .into_iter()
            .map(Some)
            .collect(),
    };
    for n in n_values(cfg) {
        for inr in &inrs {
            let base = cfg.params_with(n, inr.unwrap_or(cfg.inr_db.unwrap_or(0.0)))?;
            let rows = sweep_rows(&base, axis, &values, &ev)?;
            let name = match inr {
                Some(i) => format!("{target}_n{n}_inr{i}.csv"),
                None => format!("{target}_n{n}.csv"),
            };
            let path = out_dir.join(name);
            output::write_csv(Some(&path), &rows, &SWEEP_HEADER)?;
            files.push(path);
            if axis == Axis::SnrDb {
                if let Some(x) = crossing(&rows, exact, 1e-5) {
                    summary.push((format!("N={n} INR={} dB: SNR at P_out=1e-5", inr.unwrap_or(0.0)), x));
                }
            }
        }
    }
    Ok(Produced {
        target: target.into(),
        files,
        summary,
    })
}

fn snr_curves(cfg: &RunConfig, out_dir: &Path) -> CliResult<Produced> {
    curves(cfg, out_dir, "fig5", Axis::SnrDb)
}

fn inr_curves(cfg: &RunConfig, out_dir: &Path) -> CliResult<Produced> {
    curves(cfg, out_dir, "fig6", Axis::InrDb)
}

fn regression_rows(model: &MlpModel, splits: [(&str, &Dataset); 3]) -> Vec<RegressionRow> {
    splits
        .iter()
        .flat_map(|(name, ds)| {
            ds.records.iter().map(move |r| RegressionRow {
                split: name.to_string(),
                target: r.target,
                prediction: model.predict(&r.input),
            })
        })
        .collect()
}

/// Exact evaluation against batch surrogate inference on the same inputs.
fn timing_rows(model: &MlpModel, ds: &Dataset, points: usize) -> CliResult<Vec<TimingRow>> {
    let recs: Vec<_> = ds.records.iter().take(points).cloned().collect();
    if recs.len() < 2 {
        return Err(CliError::usage("timing needs at least two records"));
    }
    let targets: Vec<f64> = recs.iter().map(|r| r.target).collect();
    let started = Instant::now();
    let exact: Vec<f64> = recs
        .iter()
        .map(|r| Ok(op_exact(&r.params()?)?.value))
        .collect::<CliResult<_>>()?;
    let t_exact = started.elapsed().as_secs_f64();
    let started = Instant::now();
    let pred: Vec<f64> = recs.iter().map(|r| model.predict(&r.input)).collect();
    let t_sur = started.elapsed().as_secs_f64();
    let score = |v: &[f64]| -> (f64, f64) {
        let mse = v.iter().zip(&targets).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / v.len() as f64;
        (mse, output::pearson(v, &targets))
    };
    let (mse_e, r_e) = score(&exact);
    let (mse_s, r_s) = score(&pred);
    Ok(vec![
        TimingRow {
            method: OutageMethod::ExactNumeric.tag().into(),
            seconds: t_exact,
            points: recs.len(),
            mse: mse_e,
            r: r_e,
        },
        TimingRow {
            method: OutageMethod::Surrogate.tag().into(),
            seconds: t_sur,
            points: recs.len(),
            mse: mse_s,
            r: r_s,
        },
    ])
}

fn surrogate_pipeline(target: &str, cfg: &RunConfig, out_dir: &Path) -> CliResult<Produced> {
    let mut files = Vec::new();
    let data_path = match &cfg.data {
        Some(p) => p.clone(),
        None => {
            let p = out_dir.join("dataset.csv");
            let rep = generate_to(cfg, &p)?;
            log::info!("labelled {} records ({} skipped)", rep.written, rep.skipped);
            files.push(p.clone());
            p
        }
    };
    let ds = read_dataset_file(&data_path)?;
    let (model, train, test, validation, curve, seconds) = match &cfg.model {
        Some(m) => {
            let (train, test, validation) = split_dataset(&ds, crate::surrogate_cmd::SPLIT, cfg.seed())?;
            (load_model(m)?, train, test, validation, None, f64::NAN)
        }
        None => {
            let Trained {
                model,
                report,
                train,
                test,
                validation,
                seconds,
            } = train_on(&ds, cfg)?;
            let path = out_dir.join("model.json");
            save_model(&model, &path)?;
            files.push(path);
            (model, train, test, validation, Some(report), seconds)
        }
    };
    let mut summary = Vec::new();
    if let Some(report) = &curve {
        let path = out_dir.join(format!("{target}_curve.csv"));
        output::write_csv(Some(&path), &curve_rows(report), &CURVE_HEADER)?;
        files.push(path);
        summary.push(("best_epoch".into(), report.best_epoch as f64));
        summary.push(("stop_epoch".into(), report.stop_epoch as f64));
        summary.push(("training_seconds".into(), seconds));
    }
    let path = out_dir.join(format!("{target}_regression.csv"));
    output::write_csv(
        Some(&path),
        &regression_rows(&model, [("train", &train), ("validation", &validation), ("test", &test)]),
        &REGRESSION_HEADER,
    )?;
    files.push(path);
    for (name, split) in [("validation", &validation), ("test", &test)] {
        let m = regression_metrics(&model, split)?;
        summary.push((format!("{name}_mse"), m.mse));
        summary.push((format!("{name}_r"), m.r));
    }
    let timing = timing_rows(&model, &test, cfg.timing_points.unwrap_or(1000))?;
    let path = out_dir.join(format!("{target}_timing.csv"));
    output::write_csv(Some(&path), &timing, &TIMING_HEADER)?;
    files.push(path);
    summary.push(("speedup".into(), timing[0].seconds / timing[1].seconds.max(1e-12)));
    Ok(Produced {
        target: target.into(),
        files,
        summary,
    })
}
