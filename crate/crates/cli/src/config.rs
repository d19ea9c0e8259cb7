//! Flat key-value run configuration. Files mirror the command-line flags
//! (`snr_db = 20.0` for `--snr-db 20`); flags win over file values.

use crate::error::{CliError, CliResult};
use risop_core::model::Sigmas;
use risop_core::surrogate::SamplingRanges;
use risop_core::{McConfig, SystemParams};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub target: Option<String>,
    pub n: Option<u32>,
    pub n_values: Option<Vec<u32>>,
    pub snr_db: Option<f64>,
    pub inr_db: Option<f64>,
    pub inr_values: Option<Vec<f64>>,
    pub gamma_th_db: Option<f64>,
    pub sigma_sr: Option<f64>,
    pub sigma_rd: Option<f64>,
    pub sigma_ir: Option<f64>,
    pub sigma_id: Option<f64>,
    pub methods: Option<Vec<String>>,
    pub mc_samples: Option<u64>,
    pub confidence: Option<f64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub axis: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub steps: Option<usize>,
    pub points: Option<usize>,
    pub upper: Option<f64>,
    pub bins: Option<usize>,
    pub model: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub records: Option<usize>,
    pub label: Option<String>,
    pub range_gamma_th_db: Option<(f64, f64)>,
    pub range_snr_db: Option<(f64, f64)>,
    pub range_inr_db: Option<(f64, f64)>,
    pub range_sigma: Option<(f64, f64)>,
    pub range_n: Option<(u32, u32)>,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
    pub log_targets: Option<bool>,
    pub slope_from_db: Option<f64>,
    pub slope_to_db: Option<f64>,
    pub timing_points: Option<usize>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($f:ident),* $(,)?) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("config {origin}: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Values set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RunConfig) -> RunConfig {
        overlay_fields!(self, top;
            target, n, n_values, snr_db, inr_db, inr_values, gamma_th_db, sigma_sr, sigma_rd,
            sigma_ir, sigma_id, methods, mc_samples, confidence, seed, output, axis, start, stop,
            steps, points, upper, bins, model, data, records, label, range_gamma_th_db,
            range_snr_db, range_inr_db, range_sigma, range_n, max_epochs, patience, log_targets,
            slope_from_db, slope_to_db, timing_points,
        );
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    /// Scenario with unit variances, 0 dB INR and threshold, 10 dB SNR and
    /// N = 8 unless configured otherwise.
    pub fn params(&self) -> CliResult<SystemParams> {
        self.params_with(self.n.unwrap_or(8), self.inr_db.unwrap_or(0.0))
    }

    pub fn params_with(&self, n: u32, inr_db: f64) -> CliResult<SystemParams> {
        let sigmas = Sigmas {
            sr: self.sigma_sr.unwrap_or(1.0),
            rd: self.sigma_rd.unwrap_or(1.0),
            ir: self.sigma_ir.unwrap_or(1.0),
            id: self.sigma_id.unwrap_or(1.0),
        };
        let p = SystemParams::new(n, sigmas, self.snr_db.unwrap_or(10.0), inr_db, self.gamma_th_db.unwrap_or(0.0))?;
        log::info!(
            "scenario N={n}: SNR {} dB, INR {} dB -> gamma_bar = {:.6e}; gamma_th {} dB -> {:.6e}",
            p.snr_db(),
            p.inr_db(),
            p.gamma_bar(),
            p.gamma_th_db(),
            p.gamma_th()
        );
        Ok(p)
    }

    pub fn mc(&self, default_samples: u64) -> CliResult<McConfig> {
        let cfg = McConfig::new(self.mc_samples.unwrap_or(default_samples), self.seed())?;
        Ok(match self.confidence {
            Some(c) => cfg.with_confidence(c)?,
            None => cfg,
        })
    }

    pub fn ranges(&self) -> SamplingRanges {
        let d = SamplingRanges::default();
        SamplingRanges {
            gamma_th_db: self.range_gamma_th_db.unwrap_or(d.gamma_th_db),
            snr_db: self.range_snr_db.unwrap_or(d.snr_db),
            inr_db: self.range_inr_db.unwrap_or(d.inr_db),
            sigma: self.range_sigma.unwrap_or(d.sigma),
            n_elements: self.range_n.unwrap_or(d.n_elements),
        }
    }

    pub fn methods_or(&self, default: &[&str]) -> Vec<String> {
        match &self.methods {
            Some(m) if !m.is_empty() => m.clone(),
            _ => default.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Canonical configurations behind `reproduce <target>`.
pub const CANONICAL: [(&str, &str); 7] = [
    ("fig3", include_str!("../configs/fig3.toml")),
    ("fig4", include_str!("../configs/fig4.toml")),
    ("fig5", include_str!("../configs/fig5.toml")),
    ("fig6", include_str!("../configs/fig6.toml")),
    ("fig7", include_str!("../configs/fig7.toml")),
    ("fig8", include_str!("../configs/fig8.toml")),
    ("table1", include_str!("../configs/table1.toml")),
];

pub fn canonical(target: &str) -> CliResult<RunConfig> {
    let (_, text) = CANONICAL
        .iter()
        .find(|(t, _)| *t == target)
        .ok_or_else(|| {
            let names: Vec<&str> = CANONICAL.iter().map(|(t, _)| *t).collect();
            CliError::usage(format!("unknown reproduce target '{target}' (expected one of {})", names.join(", ")))
        })?;
    RunConfig::parse(text, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_configs_parse() {
        for (t, _) in CANONICAL {
            let c = canonical(t).unwrap();
            assert_eq!(c.target.as_deref(), Some(t));
        }
        assert!(canonical("fig9").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig::parse("snr_db = 5.0\nn = 4\n", "t").unwrap();
        let flags = RunConfig {
            snr_db: Some(20.0),
            ..RunConfig::default()
        };
        let c = file.overlay(flags);
        assert_eq!((c.snr_db, c.n), (Some(20.0), Some(4)));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("snr = 5.0\n", "t").is_err());
    }
}
