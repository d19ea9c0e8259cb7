//! Command-line grammar. Every flag has a same-named config key (dashes
//! become underscores).

use crate::config::RunConfig;
use clap::{ArgAction, Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "risop", version, about = "Outage analysis of RIS-assisted D2D links under co-channel interference")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for sweeps and Monte Carlo (results do not depend on it).
    #[arg(long, global = true, env = "RISOP_WORKERS")]
    pub workers: Option<usize>,
    /// Seed for every stochastic step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density of the desired amplitude X as CSV `value,density,method`.
    PdfX(PdfArgs),
    /// Density of the interference envelope Y as CSV `value,density,method`.
    PdfY(PdfArgs),
    /// Outage probability at one operating point.
    Outage(OutageArgs),
    /// Outage probability along one axis: CSV `axis_value,method,p_out,err`.
    Sweep(SweepArgs),
    /// Diversity order, coding gain and the fitted high-SIR slope.
    Diversity(DiversityArgs),
    /// Generate a labelled surrogate dataset.
    Dataset(DatasetArgs),
    /// Train the surrogate on a dataset (70/10/20 split).
    Train(TrainArgs),
    /// Predict outage with a trained surrogate.
    Predict(PredictArgs),
    /// Summarize or score any CSV produced by this tool.
    Evaluate(EvaluateArgs),
    /// Regenerate the data behind a figure or table.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args, Default)]
pub struct ScenarioFlags {
    /// Number of reflecting elements.
    #[arg(long = "n")]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub inr_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_th_db: Option<f64>,
    #[arg(long)]
    pub sigma_sr: Option<f64>,
    #[arg(long)]
    pub sigma_rd: Option<f64>,
    #[arg(long)]
    pub sigma_ir: Option<f64>,
    #[arg(long)]
    pub sigma_id: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct McFlags {
    /// Monte Carlo sample count.
    #[arg(long)]
    pub mc_samples: Option<u64>,
    /// Confidence level of Monte Carlo intervals.
    #[arg(long)]
    pub confidence: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct MethodFlags {
    /// Comma-separated method list.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct PdfArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[command(flatten)]
    pub methods: MethodFlags,
    #[command(flatten)]
    pub mc: McFlags,
    /// Grid points of the exact density.
    #[arg(long)]
    pub points: Option<usize>,
    /// Upper end of the exact grid.
    #[arg(long)]
    pub upper: Option<f64>,
    /// Histogram bins of the Monte Carlo density.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutageArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[command(flatten)]
    pub methods: MethodFlags,
    #[command(flatten)]
    pub mc: McFlags,
    /// Trained surrogate for the `surrogate` method.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[command(flatten)]
    pub methods: MethodFlags,
    #[command(flatten)]
    pub mc: McFlags,
    /// One of snr_db, inr_db, n_elements, gamma_th_db.
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: Option<f64>,
    /// Number of points, at least 2.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiversityArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    /// Lower average-SIR end (dB) of the slope fit.
    #[arg(long, allow_hyphen_values = true)]
    pub slope_from_db: Option<f64>,
    /// Upper average-SIR end (dB) of the slope fit.
    #[arg(long, allow_hyphen_values = true)]
    pub slope_to_db: Option<f64>,
}

fn parse_range_f64(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected LOW:HIGH")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{a}: {e}"))?,
        b.trim().parse().map_err(|e| format!("{b}: {e}"))?,
    ))
}

fn parse_range_u32(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(':').ok_or("expected LOW:HIGH")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{a}: {e}"))?,
        b.trim().parse().map_err(|e| format!("{b}: {e}"))?,
    ))
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Records to label.
    #[arg(long)]
    pub records: Option<usize>,
    /// exact_numeric, gamma_numeric or monte_carlo.
    #[arg(long)]
    pub label: Option<String>,
    #[command(flatten)]
    pub mc: McFlags,
    #[arg(long, value_parser = parse_range_f64, allow_hyphen_values = true)]
    pub range_gamma_th_db: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_range_f64, allow_hyphen_values = true)]
    pub range_snr_db: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_range_f64, allow_hyphen_values = true)]
    pub range_inr_db: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_range_f64)]
    pub range_sigma: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_range_u32)]
    pub range_n: Option<(u32, u32)>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    /// Fit log10 targets instead of raw probabilities.
    #[arg(long)]
    pub log_targets: bool,
    /// Model file to write.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Training curve CSV `epoch,train_mse,validation_mse`.
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Dataset-format CSV of inputs; without it the scenario flags are used.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// CSV file written by any subcommand.
    pub file: PathBuf,
    /// Score a dataset file with this surrogate.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// fig3, fig4, fig5, fig6, fig7, fig8 or table1.
    pub target: String,
    /// Directory receiving the CSV files.
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub mc: McFlags,
    #[arg(long)]
    pub records: Option<usize>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// Reuse a trained surrogate (with --data) instead of training.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Print the canonical configuration and exit.
    #[arg(long)]
    pub print_config: bool,
}

impl ScenarioFlags {
    pub fn apply(&self, c: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $( if self.$f.is_some() { c.$f = self.$f; } )* };
        }
        set!(n, snr_db, inr_db, gamma_th_db, sigma_sr, sigma_rd, sigma_ir, sigma_id);
    }
}

impl McFlags {
    pub fn apply(&self, c: &mut RunConfig) {
        if self.mc_samples.is_some() {
            c.mc_samples = self.mc_samples;
        }
        if self.confidence.is_some() {
            c.confidence = self.confidence;
        }
    }
}

impl MethodFlags {
    pub fn apply(&self, c: &mut RunConfig) {
        if self.methods.is_some() {
            c.methods.clone_from(&self.methods);
        }
    }
}

impl Command {
    /// Flag values as a configuration layer.
    pub fn flag_layer(&self) -> RunConfig {
        let mut c = RunConfig::default();
        match self {
            Command::PdfX(a) | Command::PdfY(a) => {
                a.scenario.apply(&mut c);
                a.methods.apply(&mut c);
                a.mc.apply(&mut c);
                c.points = a.points;
                c.upper = a.upper;
                c.bins = a.bins;
                c.output.clone_from(&a.output);
            }
            Command::Outage(a) => {
                a.scenario.apply(&mut c);
                a.methods.apply(&mut c);
                a.mc.apply(&mut c);
                c.model.clone_from(&a.model);
                c.output.clone_from(&a.output);
            }
            Command::Sweep(a) => {
                a.scenario.apply(&mut c);
                a.methods.apply(&mut c);
                a.mc.apply(&mut c);
                c.axis.clone_from(&a.axis);
                c.start = a.start;
                c.stop = a.stop;
                c.steps = a.steps;
                c.model.clone_from(&a.model);
                c.output.clone_from(&a.output);
            }
            Command::Diversity(a) => {
                a.scenario.apply(&mut c);
                c.slope_from_db = a.slope_from_db;
                c.slope_to_db = a.slope_to_db;
            }
            Command::Dataset(a) => {
                a.mc.apply(&mut c);
                c.records = a.records;
                c.label.clone_from(&a.label);
                c.range_gamma_th_db = a.range_gamma_th_db;
                c.range_snr_db = a.range_snr_db;
                c.range_inr_db = a.range_inr_db;
                c.range_sigma = a.range_sigma;
                c.range_n = a.range_n;
                c.output.clone_from(&a.output);
            }
            Command::Train(a) => {
                c.data.clone_from(&a.data);
                c.max_epochs = a.max_epochs;
                c.patience = a.patience;
                if a.log_targets {
                    c.log_targets = Some(true);
                }
                c.output.clone_from(&a.output);
            }
            Command::Predict(a) => {
                a.scenario.apply(&mut c);
                c.model.clone_from(&a.model);
                c.data.clone_from(&a.data);
                c.output.clone_from(&a.output);
            }
            Command::Evaluate(a) => {
                c.model.clone_from(&a.model);
            }
            Command::Reproduce(a) => {
                a.mc.apply(&mut c);
                c.records = a.records;
                c.max_epochs = a.max_epochs;
                c.model.clone_from(&a.model);
                c.data.clone_from(&a.data);
            }
        }
        c
    }
}
