//! Special-function kernels used by the closed forms.
//!
//! All routines are pure and real-valued. Series are summed in
//! double-double arithmetic so that alternating sums keep full double
//! precision after moderate cancellation; a routine that cannot reach the
//! configured tolerance reports [`SpecFunError::Precision`] instead of
//! returning a degraded value.

mod bessel;
mod dd;
mod gamma;
mod hypergeometric;
mod pcf;

pub use bessel::{bessel_i0, bessel_j0, bessel_j0_zero, bessel_j1, bessel_k0};
pub use gamma::{
    erf, erfc, gamma, ln_gamma, normal_quantile, reg_lower_gamma, reg_upper_gamma, LnGamma,
};
pub use hypergeometric::{hyp_1f2, hyp_1f2_with, kummer_1f1, kummer_1f1_with};
pub use pcf::{ln_pcf_d, ln_pcf_d_with, pcf_d, pcf_d_series, pcf_d_with};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("{function}: pole at {at}")]
    Pole { function: &'static str, at: f64 },
    #[error("{function}: argument outside domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error("{function}: cannot meet tolerance ({detail})")]
    Precision {
        function: &'static str,
        detail: String,
    },
}

pub type SfResult<T> = std::result::Result<T, SpecFunError>;

fn domain(function: &'static str, detail: impl Into<String>) -> SpecFunError {
    SpecFunError::Domain {
        function,
        detail: detail.into(),
    }
}

fn precision(function: &'static str, detail: impl Into<String>) -> SpecFunError {
    SpecFunError::Precision {
        function,
        detail: detail.into(),
    }
}

/// Regime boundaries between series, recurrence and asymptotic evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSwitch {
    /// `|x|` above which J₀/J₁ use the Hankel asymptotic expansion
    /// (below it, Miller backward recurrence).
    pub j_asymptotic: f64,
    /// `x` above which I₀ uses its asymptotic expansion.
    pub i0_asymptotic: f64,
    /// Largest `z²/2` for which the two-term ₁F₁ form of `D_ν(z)` is tried.
    pub pcf_series_max_arg: f64,
    /// Largest tolerated ratio `(|t₁|+|t₂|)/|t₁−t₂|` in the two-term form.
    pub pcf_series_max_cancellation: f64,
    /// Validated order range of `D_ν`.
    pub pcf_nu_min: f64,
    pub pcf_nu_max: f64,
}

impl Default for SeriesSwitch {
    fn default() -> Self {
        SeriesSwitch {
            j_asymptotic: 40.0,
            i0_asymptotic: 30.0,
            pcf_series_max_arg: 50.0,
            pcf_series_max_cancellation: 1e2,
            pcf_nu_min: -500.0,
            pcf_nu_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionPolicy {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub series_switch: SeriesSwitch,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            rel_tol: 1e-10,
            max_terms: 500,
            series_switch: SeriesSwitch::default(),
        }
    }
}

impl PrecisionPolicy {
    pub fn validate(&self) -> SfResult<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return Err(domain("PrecisionPolicy", format!("rel_tol {} not in (0, 1e-4]", self.rel_tol)));
        }
        if self.max_terms < 50 {
            return Err(domain("PrecisionPolicy", format!("max_terms {} < 50", self.max_terms)));
        }
        Ok(())
    }
}

/// True when `x` is an integer `≤ 0`.
pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_bounds() {
        assert!(PrecisionPolicy::default().validate().is_ok());
        let p = PrecisionPolicy {
            rel_tol: 1e-3,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = PrecisionPolicy {
            max_terms: 10,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
