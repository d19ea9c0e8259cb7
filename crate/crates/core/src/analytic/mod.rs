//! Analytical chain: exact densities and outage, gamma fits, closed-form and
//! asymptotic outage, diversity order and coding gain.

pub mod cf;
mod estimate;
mod fit;
mod grid;
mod outage;
mod pdf_x;
mod pdf_y;
mod series;

pub use estimate::{ErrorBound, EstimateFlag, OutageEstimate, OutageMethod};
pub use fit::{
    gamma_fit_x, gamma_fit_y2, pdf_x_gamma, pdf_y_gamma, y2_mean, y2_second_moment,
    y2_second_moment_printed, GammaFit,
};
pub use grid::{binned_l1, GridSpec, PdfGrid, PdfMethod};
pub use outage::{
    diversity_and_coding, op_approx_closed, op_approx_numeric, op_asymptotic, op_exact,
    DiversityReport, EXACT_ACCURACY_FLOOR,
};
pub use pdf_x::{pdf_x_exact, x_cdf, GRID_TAIL_TOLERANCE};
pub use pdf_y::{pdf_y_at, pdf_y_exact};
pub use series::{pdf_y_point, pdf_y_series, SERIES_EPSILON, SERIES_GAP_TOLERANCE};

use crate::error::Result;
use crate::model::SystemParams;

/// Gamma fits of `X` and `Y'` together.
pub fn gamma_fits(params: &SystemParams) -> Result<(GammaFit, GammaFit)> {
    Ok((gamma_fit_x(params), gamma_fit_y2(params)?))
}

/// `(γ_th, γ̄)` in linear units.
pub fn sir_pair(params: &SystemParams) -> (f64, f64) {
    (params.gamma_th(), params.gamma_bar())
}

/// Evaluates one of the analytic outage methods for a scenario.
pub fn op_by_method(params: &SystemParams, method: OutageMethod) -> Result<OutageEstimate> {
    let (th, gb) = sir_pair(params);
    match method {
        OutageMethod::ExactNumeric => op_exact(params),
        OutageMethod::GammaClosed => {
            let (fx, fy) = gamma_fits(params)?;
            op_approx_closed(&fx, &fy, th, gb)
        }
        OutageMethod::GammaNumeric => {
            let (fx, fy) = gamma_fits(params)?;
            op_approx_numeric(&fx, &fy, th, gb)
        }
        OutageMethod::Asymptotic => {
            let (fx, fy) = gamma_fits(params)?;
            op_asymptotic(&fx, &fy, th, gb)
        }
        OutageMethod::MonteCarlo | OutageMethod::Surrogate => Err(crate::error::Error::InvalidParams(
            format!("{method} is not an analytic method"),
        )),
    }
}
