//! Outage analysis of an RIS-assisted device-to-device link that is
//! interfered with both at the surface and at the destination.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: special-function kernels (gamma family, Bessel, confluent
//!   and generalized hypergeometric, parabolic cylinder).
//! * [`quad`]: quadrature rules shared by the analytic routines.
//! * [`model`]: scenario parameters, channel sampling and the instantaneous SIR.
//! * [`analytic`]: exact densities, exact outage, gamma moment-matching fits,
//!   closed-form and asymptotic outage, diversity order and coding gain.
//! * [`montecarlo`]: the seeded, worker-count independent simulation oracle.
//! * [`surrogate`]: dataset generation and a Levenberg–Marquardt trained MLP
//!   predictor.

pub mod analytic;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod surrogate;

pub use analytic::{
    diversity_and_coding, gamma_fit_x, gamma_fit_y2, op_approx_closed, op_approx_numeric,
    op_asymptotic, op_exact, pdf_x_exact, pdf_y_exact, pdf_y_series, DiversityReport, ErrorBound,
    EstimateFlag, GammaFit, GridSpec, OutageEstimate, OutageMethod, PdfGrid, PdfMethod,
};
pub use error::{Error, Result};
pub use model::{db_to_linear, linear_to_db, ChannelDraw, SirSample, SystemParams};
pub use montecarlo::{estimate_op_mc, empirical_pdf, moment_oracle, McConfig, McVariable, MomentEstimate, MomentExpr};
pub use specfun::SpecFunError;
