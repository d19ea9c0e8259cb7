//! Outage estimates and their error descriptors.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageMethod {
    ExactNumeric,
    GammaClosed,
    GammaNumeric,
    Asymptotic,
    MonteCarlo,
    Surrogate,
}

impl OutageMethod {
    pub const ALL: [OutageMethod; 6] = [
        OutageMethod::ExactNumeric,
        OutageMethod::GammaClosed,
        OutageMethod::GammaNumeric,
        OutageMethod::Asymptotic,
        OutageMethod::MonteCarlo,
        OutageMethod::Surrogate,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            OutageMethod::ExactNumeric => "exact_numeric",
            OutageMethod::GammaClosed => "gamma_closed",
            OutageMethod::GammaNumeric => "gamma_numeric",
            OutageMethod::Asymptotic => "asymptotic",
            OutageMethod::MonteCarlo => "monte_carlo",
            OutageMethod::Surrogate => "surrogate",
        }
    }

    pub fn from_tag(tag: &str) -> Option<OutageMethod> {
        OutageMethod::ALL.into_iter().find(|m| m.tag() == tag)
    }
}

impl std::fmt::Display for OutageMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorBound {
    /// Estimated absolute numerical error.
    Absolute { bound: f64 },
    /// Confidence interval of a sampling estimate.
    Confidence {
        half_width: f64,
        lower: f64,
        upper: f64,
        level: f64,
    },
    /// The closed form was evaluated at a rounded shape.
    RoundedShape { shape: f64, rounded: u32, numerical: f64 },
    /// Accuracy is a property of the model (asymptote, surrogate), not of the
    /// arithmetic; `rmse` is set when a validation figure exists.
    Model { rmse: Option<f64> },
}

impl ErrorBound {
    /// Non-negative magnitude of the descriptor.
    pub fn magnitude(&self) -> f64 {
        match *self {
            ErrorBound::Absolute { bound } => bound,
            ErrorBound::Confidence { half_width, .. } => half_width,
            ErrorBound::RoundedShape { numerical, .. } => numerical,
            ErrorBound::Model { rmse } => rmse.unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateFlag {
    /// Below the range where the accuracy target is guaranteed.
    DegradedAccuracy,
    /// Rounding pushed the raw value slightly outside `[0, 1]`.
    Clamped,
    /// Too few samples for the observed event count.
    WideInterval,
    /// Input outside the surrogate's training range.
    Extrapolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub value: f64,
    pub method: OutageMethod,
    pub err: ErrorBound,
    pub flags: Vec<EstimateFlag>,
}

impl OutageEstimate {
    pub fn new(value: f64, method: OutageMethod, err: ErrorBound) -> Self {
        OutageEstimate {
            value,
            method,
            err,
            flags: Vec::new(),
        }
    }

    pub fn has_flag(&self, flag: EstimateFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub(crate) fn flag(&mut self, flag: EstimateFlag) {
        if !self.has_flag(flag) {
            self.flags.push(flag);
        }
    }
}
