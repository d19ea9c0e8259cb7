use thiserror::Error;

use crate::specfun::SpecFunError;

/// Errors raised by the analytic, simulation and surrogate layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    SpecFun(#[from] SpecFunError),

    /// The requested density grid leaves too much probability mass outside its support.
    #[error("grid too small: tail mass bound {tail_mass:.3e} beyond {upper}; extend upper bound to at least {suggested_upper}")]
    Grid {
        upper: f64,
        tail_mass: f64,
        suggested_upper: f64,
    },

    #[error("precision failure in {context}: {detail}")]
    Precision { context: &'static str, detail: String },

    /// The two regularized evaluations of the explicit series disagree.
    #[error("series instability: evaluations at N+eps and N-eps differ by {relative_gap:.3e} (relative)")]
    SeriesInstability { relative_gap: f64 },

    #[error("training failure: {0}")]
    Training(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precision(context: &'static str, detail: impl Into<String>) -> Self {
        Error::Precision {
            context,
            detail: detail.into(),
        }
    }

    /// True for failures that come from floating-point accuracy limits
    /// rather than bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SpecFun(_)
                | Error::Precision { .. }
                | Error::SeriesInstability { .. }
                | Error::Training(_)
                | Error::Grid { .. }
        )
    }
}
