//! `evaluate`: recognizes every CSV schema this tool writes and summarizes it.

use crate::error::{CliError, CliResult};
use crate::output::{
    self, CurveRow, OutageRow, PdfRow, RegressionRow, SweepRow, TimingRow, CURVE_HEADER, OUTAGE_HEADER,
    PDF_HEADER, REGRESSION_HEADER, SWEEP_HEADER, TIMING_HEADER,
};
use risop_core::surrogate::{load_model, read_dataset, regression_metrics, CSV_HEADER};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Schema {
    Dataset,
    Pdf,
    Sweep,
    Outage,
    Curve,
    Regression,
    Timing,
}

pub fn detect(header: &[String]) -> CliResult<Schema> {
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let known: [(&[&str], Schema); 7] = [
        (&CSV_HEADER, Schema::Dataset),
        (&PDF_HEADER, Schema::Pdf),
        (&SWEEP_HEADER, Schema::Sweep),
        (&OUTAGE_HEADER, Schema::Outage),
        (&CURVE_HEADER, Schema::Curve),
        (&REGRESSION_HEADER, Schema::Regression),
        (&TIMING_HEADER, Schema::Timing),
    ];
    known
        .into_iter()
        .find(|(k, _)| *k == h.as_slice())
        .map(|(_, s)| s)
        .ok_or_else(|| CliError::Io(format!("unrecognized CSV header {}", h.join(","))))
}

fn rows<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let mut rd = csv::Reader::from_path(path)?;
    rd.deserialize().map(|r| r.map_err(CliError::from)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema: Schema,
    pub rows: usize,
    /// Per-group figures (group = method, split, ...).
    pub groups: BTreeMap<String, BTreeMap<String, f64>>,
}

fn entry<'a>(g: &'a mut BTreeMap<String, BTreeMap<String, f64>>, key: &str) -> &'a mut BTreeMap<String, f64> {
    g.entry(key.to_string()).or_default()
}

pub fn summarize(path: &Path, model: Option<&Path>) -> CliResult<Summary> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let schema = detect(&header)?;
    let mut groups = BTreeMap::new();
    let n_rows;
    match schema {
        Schema::Dataset => {
            let ds = read_dataset(std::fs::File::open(path)?)?;
            n_rows = ds.len();
            let t = ds.targets();
            let g = entry(&mut groups, "targets");
            g.insert("mean".into(), t.iter().sum::<f64>() / t.len().max(1) as f64);
            g.insert("min".into(), t.iter().cloned().fold(f64::INFINITY, f64::min));
            g.insert("max".into(), t.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            if let Some(m) = model {
                let m = regression_metrics(&load_model(m)?, &ds)?;
                let g = entry(&mut groups, "surrogate");
                g.insert("mse".into(), m.mse);
                g.insert("r".into(), m.r);
            }
        }
        Schema::Pdf => {
            let r: Vec<PdfRow> = rows(path)?;
            n_rows = r.len();
            let mut by: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
            for row in r {
                by.entry(row.method).or_default().push((row.value, row.density));
            }
            for (m, pts) in by {
                // Uniform supports: histogram bins and the exact grids alike.
                let mass: f64 = if m == "mc" {
                    let w = if pts.len() > 1 { pts[1].0 - pts[0].0 } else { 0.0 };
                    pts.iter().map(|p| p.1 * w).sum()
                } else {
                    pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
                };
                let mode = pts.iter().max_by(|a, b| a.1.total_cmp(&b.1)).map(|p| p.0).unwrap_or(f64::NAN);
                let g = entry(&mut groups, &m);
                g.insert("points".into(), pts.len() as f64);
                g.insert("integral".into(), mass);
                g.insert("mode".into(), mode);
            }
        }
        Schema::Sweep => {
            let r: Vec<SweepRow> = rows(path)?;
            n_rows = r.len();
            for row in r {
                let g = entry(&mut groups, &row.method);
                *g.entry("points".into()).or_insert(0.0) += 1.0;
                let lo = g.entry("min_p_out".into()).or_insert(f64::INFINITY);
                *lo = lo.min(row.p_out);
                let hi = g.entry("max_p_out".into()).or_insert(f64::NEG_INFINITY);
                *hi = hi.max(row.p_out);
            }
        }
        Schema::Outage => {
            let r: Vec<OutageRow> = rows(path)?;
            n_rows = r.len();
            for row in r {
                let g = entry(&mut groups, &row.method);
                g.insert("p_out".into(), row.p_out);
                g.insert("err".into(), row.err);
            }
        }
        Schema::Curve => {
            let r: Vec<CurveRow> = rows(path)?;
            n_rows = r.len();
            let best = r.iter().min_by(|a, b| a.validation_mse.total_cmp(&b.validation_mse));
            let g = entry(&mut groups, "training");
            if let Some(b) = best {
                g.insert("best_epoch".into(), b.epoch as f64);
                g.insert("best_validation_mse".into(), b.validation_mse);
            }
            g.insert("stop_epoch".into(), r.last().map(|x| x.epoch as f64).unwrap_or(0.0));
        }
        Schema::Regression => {
            let r: Vec<RegressionRow> = rows(path)?;
            n_rows = r.len();
            let mut by: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
            for row in r {
                let e = by.entry(row.split).or_default();
                e.0.push(row.target);
                e.1.push(row.prediction);
            }
            for (s, (t, p)) in by {
                let mse = t.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / t.len() as f64;
                let g = entry(&mut groups, &s);
                g.insert("mse".into(), mse);
                g.insert("r".into(), output::pearson(&p, &t));
            }
        }
        Schema::Timing => {
            let r: Vec<TimingRow> = rows(path)?;
            n_rows = r.len();
            for row in r {
                let g = entry(&mut groups, &row.method);
                g.insert("seconds".into(), row.seconds);
                g.insert("mse".into(), row.mse);
                g.insert("r".into(), row.r);
            }
        }
    }
    Ok(Summary {
        schema,
        rows: n_rows,
        groups,
    })
}

pub fn run_evaluate(path: &Path, model: Option<&Path>, json: bool) -> CliResult<()> {
    let s = summarize(path, model)?;
    if json {
        return output::print_json(&s);
    }
    println!("schema {:?}, {} rows", s.schema, s.rows);
    let cells: Vec<Vec<String>> = s
        .groups
        .iter()
        .flat_map(|(g, kv)| kv.iter().map(move |(k, v)| vec![g.clone(), k.clone(), format!("{v:.6e}")]))
        .collect();
    print!("{}", output::table(&["group", "quantity", "value"], &cells));
    Ok(())
}
