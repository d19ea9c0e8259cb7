//! `pdf-x`, `pdf-y`, `outage`, `sweep` and `diversity`.

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{self, OutageRow, PdfRow, SweepRow, OUTAGE_HEADER, PDF_HEADER, SWEEP_HEADER};
use risop_core::analytic::{
    gamma_fits, op_by_method, pdf_x_gamma, pdf_y_gamma, sir_pair, EstimateFlag,
};
use risop_core::montecarlo::{empirical_pdf, estimate_op_mc, McVariable};
use risop_core::surrogate::{load_model, predict_op, MlpModel};
use risop_core::{
    diversity_and_coding, op_approx_numeric, pdf_x_exact, pdf_y_exact, GridSpec, OutageEstimate,
    OutageMethod, PdfGrid, SystemParams,
};
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdfKind {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PdfSource {
    Exact,
    GammaFit,
    Mc,
}

fn pdf_source(s: &str) -> CliResult<PdfSource> {
    match s {
        "exact" => Ok(PdfSource::Exact),
        "gamma_fit" | "gamma-fit" | "gamma" => Ok(PdfSource::GammaFit),
        "mc" | "monte_carlo" => Ok(PdfSource::Mc),
        other => Err(CliError::usage(format!("unknown density method '{other}' (exact, gamma_fit, mc)"))),
    }
}

/// Grids for every requested method, in request order.
pub fn pdf_grids(kind: PdfKind, params: &SystemParams, cfg: &RunConfig) -> CliResult<Vec<PdfGrid>> {
    let sources = cfg
        .methods_or(&["exact", "gamma_fit", "mc"])
        .iter()
        .map(|m| pdf_source(m))
        .collect::<CliResult<Vec<_>>>()?;
    let spec = GridSpec {
        points: Some(cfg.points.unwrap_or(match kind {
            PdfKind::X => 1024,
            PdfKind::Y => 513,
        })),
        upper: cfg.upper,
    };
    let mut exact: Option<PdfGrid> = None;
    let mut exact_grid = || -> CliResult<PdfGrid> {
        if exact.is_none() {
            exact = Some(match kind {
                PdfKind::X => pdf_x_exact(params, spec)?,
                PdfKind::Y => pdf_y_exact(params, spec)?,
            });
        }
        Ok(exact.clone().unwrap())
    };
    let mut out = Vec::new();
    for s in sources {
        out.push(match s {
            PdfSource::Exact => exact_grid()?,
            PdfSource::GammaFit => {
                let support = exact_grid()?.support;
                match kind {
                    PdfKind::X => pdf_x_gamma(params, &support),
                    PdfKind::Y => pdf_y_gamma(params, &support)?,
                }
            }
            PdfSource::Mc => {
                let var = match kind {
                    PdfKind::X => McVariable::X,
                    PdfKind::Y => McVariable::Y,
                };
                empirical_pdf(var, params, &cfg.mc(DEFAULT_MC_SAMPLES)?, cfg.bins.unwrap_or(100))?
            }
        });
    }
    Ok(out)
}

pub fn pdf_rows(grids: &[PdfGrid]) -> Vec<PdfRow> {
    grids
        .iter()
        .flat_map(|g| {
            g.support.iter().zip(&g.density).map(move |(&value, &density)| PdfRow {
                value,
                density,
                method: g.method.tag().to_string(),
            })
        })
        .collect()
}

pub fn run_pdf(kind: PdfKind, cfg: &RunConfig, json: bool) -> CliResult<()> {
    let params = cfg.params()?;
    let grids = pdf_grids(kind, &params, cfg)?;
    let rows = pdf_rows(&grids);
    if json && cfg.output.is_none() {
        return output::print_json(&rows);
    }
    output::write_csv(cfg.output.as_deref(), &rows, &PDF_HEADER)
}

pub fn op_method(s: &str) -> CliResult<OutageMethod> {
    Ok(match s {
        "exact" | "exact_numeric" => OutageMethod::ExactNumeric,
        "gamma-closed" | "gamma_closed" => OutageMethod::GammaClosed,
        "gamma-numeric" | "gamma_numeric" => OutageMethod::GammaNumeric,
        "asymptotic" => OutageMethod::Asymptotic,
        "mc" | "monte_carlo" => OutageMethod::MonteCarlo,
        "surrogate" => OutageMethod::Surrogate,
        other => {
            return Err(CliError::usage(format!(
                "unknown outage method '{other}' (exact, gamma-closed, gamma-numeric, asymptotic, mc, surrogate)"
            )))
        }
    })
}

/// Everything one outage evaluation may need.
pub struct Evaluator {
    pub methods: Vec<OutageMethod>,
    pub mc: risop_core::McConfig,
    pub model: Option<MlpModel>,
}

impl Evaluator {
    pub fn new(cfg: &RunConfig, default_methods: &[&str], default_mc: u64) -> CliResult<Self> {
        let methods = cfg
            .methods_or(default_methods)
            .iter()
            .map(|m| op_method(m))
            .collect::<CliResult<Vec<_>>>()?;
        let model = if methods.contains(&OutageMethod::Surrogate) {
            let path = cfg
                .model
                .as_deref()
                .ok_or_else(|| CliError::usage("the surrogate method needs --model"))?;
            Some(load_model(path)?)
        } else {
            None
        };
        Ok(Evaluator {
            methods,
            mc: cfg.mc(default_mc)?,
            model,
        })
    }

    pub fn estimate(&self, params: &SystemParams, method: OutageMethod) -> CliResult<OutageEstimate> {
        Ok(match method {
            OutageMethod::MonteCarlo => estimate_op_mc(params, &self.mc)?,
            OutageMethod::Surrogate => predict_op(self.model.as_ref().expect("model loaded"), &surrogate_input(params)),
            m => op_by_method(params, m)?,
        })
    }
}

pub fn surrogate_input(p: &SystemParams) -> [f64; 7] {
    [
        p.gamma_th_db(),
        p.gamma_bar_db(),
        p.sigma_sr(),
        p.sigma_rd(),
        p.sigma_ir(),
        p.sigma_id(),
        p.n_elements() as f64,
    ]
}

fn flag_list(e: &OutageEstimate) -> String {
    let names: Vec<&str> = [
        (EstimateFlag::DegradedAccuracy, "degraded_accuracy"),
        (EstimateFlag::Clamped, "clamped"),
        (EstimateFlag::WideInterval, "wide_interval"),
        (EstimateFlag::Extrapolation, "extrapolation"),
    ]
    .into_iter()
    .filter(|(f, _)| e.has_flag(*f))
    .map(|(_, n)| n)
    .collect();
    names.join("|")
}

pub fn run_outage(cfg: &RunConfig, json: bool) -> CliResult<()> {
    let params = cfg.params()?;
    let ev = Evaluator::new(cfg, &["exact", "gamma-numeric", "gamma-closed", "asymptotic"], DEFAULT_MC_SAMPLES)?;
    let mut rows = Vec::new();
    let mut estimates = Vec::new();
    for &m in &ev.methods {
        let e = ev.estimate(&params, m)?;
        rows.push(OutageRow {
            method: m.tag().to_string(),
            p_out: e.value,
            err: e.err.magnitude(),
            flags: flag_list(&e),
        });
        estimates.push(e);
    }
    if let Some(path) = &cfg.output {
        output::write_csv(Some(path), &rows, &OUTAGE_HEADER)?;
    }
    if json {
        return output::print_json(&estimates);
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.method.clone(), output::sci(r.p_out), output::sci(r.err), r.flags.clone()])
        .collect();
    print!("{}", output::table(&OUTAGE_HEADER, &cells));
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    SnrDb,
    InrDb,
    NElements,
    GammaThDb,
}

impl Axis {
    pub fn parse(s: &str) -> CliResult<Axis> {
        Ok(match s {
            "snr_db" => Axis::SnrDb,
            "inr_db" => Axis::InrDb,
            "n_elements" => Axis::NElements,
            "gamma_th_db" => Axis::GammaThDb,
            other => {
                return Err(CliError::usage(format!(
                    "unknown sweep axis '{other}' (snr_db, inr_db, n_elements, gamma_th_db)"
                )))
            }
        })
    }

    fn apply(&self, p: &SystemParams, v: f64) -> CliResult<SystemParams> {
        Ok(match self {
            Axis::SnrDb => p.with_snr_db(v)?,
            Axis::InrDb => p.with_inr_db(v)?,
            Axis::GammaThDb => p.with_gamma_th_db(v)?,
            Axis::NElements => p.with_n_elements(v.round() as u32)?,
        })
    }
}

pub fn axis_values(cfg: &RunConfig, axis: Axis) -> CliResult<Vec<f64>> {
    let steps = cfg.steps.unwrap_or(11);
    if steps < 2 {
        return Err(CliError::usage(format!("a sweep needs at least 2 steps, got {steps}")));
    }
    let (a, b) = match (cfg.start, cfg.stop) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(CliError::usage("a sweep needs --start and --stop")),
    };
    let mut v: Vec<f64> = (0..steps).map(|i| a + (b - a) * i as f64 / (steps - 1) as f64).collect();
    if axis == Axis::NElements {
        v.iter_mut().for_each(|x| *x = x.round());
        v.dedup();
    }
    Ok(v)
}

/// Rows in axis order, methods in request order. Points are evaluated in
/// parallel; a failing point is reported as NaN with a warning.
pub fn sweep_rows(base: &SystemParams, axis: Axis, values: &[f64], ev: &Evaluator) -> CliResult<Vec<SweepRow>> {
    let points: Vec<SystemParams> = values.iter().map(|&v| axis.apply(base, v)).collect::<CliResult<_>>()?;
    let rows: Vec<Vec<SweepRow>> = points
        .par_iter()
        .zip(values)
        .map(|(p, &v)| {
            ev.methods
                .iter()
                .map(|&m| {
                    let (p_out, err) = match ev.estimate(p, m) {
                        Ok(e) => (e.value, e.err.magnitude()),
                        Err(e) => {
                            log::warn!("{m} at {v}: {e}");
                            (f64::NAN, f64::NAN)
                        }
                    };
                    SweepRow {
                        axis_value: v,
                        method: m.tag().to_string(),
                        p_out,
                        err,
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.concat())
}

pub fn run_sweep(cfg: &RunConfig, json: bool) -> CliResult<()> {
    let axis = Axis::parse(cfg.axis.as_deref().unwrap_or("snr_db"))?;
    let values = axis_values(cfg, axis)?;
    let base = cfg.params()?;
    let ev = Evaluator::new(cfg, &["exact", "gamma-numeric", "asymptotic"], 100_000)?;
    let rows = sweep_rows(&base, axis, &values, &ev)?;
    if json && cfg.output.is_none() {
        return output::print_json(&rows);
    }
    output::write_csv(cfg.output.as_deref(), &rows, &SWEEP_HEADER)
}

#[derive(Debug, Clone, Serialize)]
pub struct DiversitySummary {
    pub n_elements: u32,
    pub diversity_order: f64,
    pub coding_gain: f64,
    pub slope_from_db: f64,
    pub slope_to_db: f64,
    /// Fitted `d log10 P / d log10 γ̄` of the gamma-numeric outage.
    pub fitted_slope: f64,
}

pub fn diversity_summary(params: &SystemParams, from_db: f64, to_db: f64) -> CliResult<DiversitySummary> {
    if !(to_db > from_db) {
        return Err(CliError::usage("slope_to_db must exceed slope_from_db"));
    }
    let (fx, fy) = gamma_fits(params)?;
    let rep = diversity_and_coding(&fx, &fy)?;
    let (th, _) = sir_pair(params);
    let at = |db: f64| -> CliResult<f64> {
        Ok(op_approx_numeric(&fx, &fy, th, 10f64.powf(db / 10.0))?.value)
    };
    let (p1, p2) = (at(from_db)?, at(to_db)?);
    Ok(DiversitySummary {
        n_elements: params.n_elements(),
        diversity_order: rep.diversity_order,
        coding_gain: rep.coding_gain,
        slope_from_db: from_db,
        slope_to_db: to_db,
        fitted_slope: (p2.log10() - p1.log10()) / ((to_db - from_db) / 10.0),
    })
}

pub fn run_diversity(cfg: &RunConfig, json: bool) -> CliResult<()> {
    let params = cfg.params()?;
    let s = diversity_summary(&params, cfg.slope_from_db.unwrap_or(50.0), cfg.slope_to_db.unwrap_or(60.0))?;
    if json {
        return output::print_json(&s);
    }
    let rows = vec![
        vec!["diversity_order".into(), format!("{:.6}", s.diversity_order)],
        vec!["coding_gain".into(), output::sci(s.coding_gain)],
        vec![
            format!("fitted_slope[{}..{} dB]", s.slope_from_db, s.slope_to_db),
            format!("{:.6}", s.fitted_slope),
        ],
    ];
    print!("{}", output::table(&["quantity", "value"], &rows));
    Ok(())
}
