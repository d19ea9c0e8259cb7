mod analysis;
mod cli;
mod config;
mod error;
mod evaluate;
mod output;
mod reproduce;
mod surrogate_cmd;

use clap::Parser;
use cli::{Cli, Command};
use config::RunConfig;
use error::{CliError, CliResult};
use std::process::ExitCode;

fn layered(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.command {
        Command::Reproduce(a) => config::canonical(&a.target)?,
        _ => RunConfig::default(),
    };
    if let Some(path) = &cli.config {
        cfg = cfg.overlay(RunConfig::load(path)?);
    }
    cfg = cfg.overlay(cli.command.flag_layer());
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::usage(format!("worker pool: {e}")))?;
    }
    if let Command::Reproduce(a) = &cli.command {
        if a.print_config {
            return reproduce::print_config(&a.target);
        }
    }
    let cfg = layered(&cli)?;
    let json = cli.json;
    match &cli.command {
        Command::PdfX(_) => analysis::run_pdf(analysis::PdfKind::X, &cfg, json),
        Command::PdfY(_) => analysis::run_pdf(analysis::PdfKind::Y, &cfg, json),
        Command::Outage(_) => analysis::run_outage(&cfg, json),
        Command::Sweep(_) => analysis::run_sweep(&cfg, json),
        Command::Diversity(_) => analysis::run_diversity(&cfg, json),
        Command::Dataset(_) => surrogate_cmd::run_dataset(&cfg, json),
        Command::Train(a) => surrogate_cmd::run_train(&cfg, json, a.curve.as_deref()),
        Command::Predict(_) => surrogate_cmd::run_predict(&cfg, json),
        Command::Evaluate(a) => evaluate::run_evaluate(&a.file, cfg.model.as_deref(), json),
        Command::Reproduce(a) => reproduce::run_reproduce(&a.target, &cfg, &a.out_dir, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("{}", CliError::usage(first.trim_start_matches("error: ")).diagnostic());
            return ExitCode::from(2);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.code() as u8)
        }
    }
}
