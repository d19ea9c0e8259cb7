//! Gamma moment matching for X and Y' = Y².

use super::grid::{PdfGrid, PdfMethod};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::specfun::{ln_gamma, reg_lower_gamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Gamma distribution with shape `k` and scale `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub shape: f64,
    pub scale: f64,
}

impl GammaFit {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gamma fit needs positive finite shape and scale, got ({shape}, {scale})"
            )));
        }
        Ok(GammaFit { shape, scale })
    }

    /// Moment matching from mean and variance.
    pub fn from_moments(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::Contract(format!(
                "non-positive variance {variance} in moment matching"
            )));
        }
        GammaFit::new(mean * mean / variance, variance / mean)
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.shape {
                k if k < 1.0 => f64::INFINITY,
                k if k == 1.0 => 1.0 / self.scale,
                _ => 0.0,
            };
        }
        let k = self.shape;
        let u = x / self.scale;
        let lg = ln_gamma(k).map(|g| g.value).unwrap_or(f64::NAN);
        ((k - 1.0) * u.ln() - u - lg).exp() / self.scale
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        reg_lower_gamma(self.shape, x / self.scale).unwrap_or(f64::NAN)
    }
}

/// Mean of one double-Rayleigh term `|g||h|`.
fn x_moments(params: &SystemParams) -> (f64, f64) {
    let n = params.n_elements() as f64;
    let c = params.desired_scale();
    (n * PI / 4.0 * c, n * (1.0 - PI * PI / 16.0) * c * c)
}

/// Fit of `X = Σ|g(n)||h(n)|`.
pub fn gamma_fit_x(params: &SystemParams) -> GammaFit {
    let (m, v) = x_moments(params);
    GammaFit {
        shape: m * m / v,
        scale: v / m,
    }
}

/// `E[Y']` of `Y' = Y²`.
pub fn y2_mean(params: &SystemParams) -> f64 {
    let n = params.n_elements() as f64;
    let ci = params.interference_scale();
    params.sigma_id().powi(2) + n * ci * ci
}

/// `E[Y'²]` with every term carrying the fourth power of the amplitudes.
pub fn y2_second_moment(params: &SystemParams) -> f64 {
    let n = params.n_elements() as f64;
    let c2 = params.interference_scale().powi(2);
    let s2 = params.sigma_id().powi(2);
    4.0 * n * c2 * c2 + 2.0 * n * (n - 1.0) * c2 * c2 + 2.0 * s2 * s2 + 4.0 * n * c2 * s2
}

/// The mixed-power second moment as typeset in the source derivation. It
/// coincides with [`y2_second_moment`] only at unit variances; kept as a
/// negative control for the moment tests.
pub fn y2_second_moment_printed(params: &SystemParams) -> f64 {
    let n = params.n_elements() as f64;
    let c2 = params.interference_scale().powi(2);
    let s2 = params.sigma_id().powi(2);
    4.0 * n * c2 * c2 + 2.0 * n * (n - 1.0) * c2 + 2.0 * s2 + 4.0 * n * c2 * s2
}

/// Fit of `Y' = Y²`.
pub fn gamma_fit_y2(params: &SystemParams) -> Result<GammaFit> {
    let m = y2_mean(params);
    let var = y2_second_moment(params) - m * m;
    if !(var > 0.0) {
        return Err(Error::Contract(format!(
            "Var[Y'] = {var} is not positive"
        )));
    }
    GammaFit::from_moments(m, var)
}

/// Gamma-fit density of `X` on `support`.
pub fn pdf_x_gamma(params: &SystemParams, support: &[f64]) -> PdfGrid {
    let fit = gamma_fit_x(params);
    let density = support.iter().map(|&x| fit.pdf(x)).collect();
    PdfGrid::new(support.to_vec(), density, PdfMethod::GammaFit)
}

/// Density of `Y` implied by the gamma fit of `Y²`: `2y·f_{Y'}(y²)`.
pub fn pdf_y_gamma(params: &SystemParams, support: &[f64]) -> Result<PdfGrid> {
    let fit = gamma_fit_y2(params)?;
    let density = support
        .iter()
        .map(|&y| if y > 0.0 { 2.0 * y * fit.pdf(y * y) } else { 0.0 })
        .collect();
    Ok(PdfGrid::new(support.to_vec(), density, PdfMethod::GammaFit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sigmas;

    fn unit(n: u32) -> SystemParams {
        SystemParams::unit(n, 10.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn x_fit_n16() {
        let f = gamma_fit_x(&unit(16));
        assert!((f.mean() - 4.0 * PI).abs() < 1e-12);
        assert!((f.variance() - (16.0 - PI * PI)).abs() < 1e-12);
        assert!((f.shape - 25.759_132_158_696_36).abs() < 1e-10);
        assert!((f.scale - 0.487_841_381_337_714_4).abs() < 1e-12);
    }

    #[test]
    fn x_fit_scale_free_shape() {
        let p = unit(5);
        let q = p
            .with_sigmas(Sigmas {
                sr: 2.0,
                ..p.sigmas()
            })
            .unwrap();
        let (a, b) = (gamma_fit_x(&p), gamma_fit_x(&q));
        assert!((a.shape - b.shape).abs() < 1e-12);
        assert!((b.scale / a.scale - 2.0).abs() < 1e-12);
    }

    #[test]
    fn y_fit_n16() {
        let p = unit(16);
        assert_eq!(y2_mean(&p), 17.0);
        assert_eq!(y2_second_moment(&p), 610.0);
        let f = gamma_fit_y2(&p).unwrap();
        assert!((f.shape - 289.0 / 321.0).abs() < 1e-12);
        assert!((f.scale - 321.0 / 17.0).abs() < 1e-12);
    }

    #[test]
    fn y_fit_direct_path_limit() {
        let p = SystemParams::new(
            8,
            Sigmas {
                ir: 1e-6,
                id: 1.3,
                ..Sigmas::default()
            },
            10.0,
            0.0,
            0.0,
        )
        .unwrap();
        let f = gamma_fit_y2(&p).unwrap();
        assert!((f.shape - 1.0).abs() < 1e-9);
    }

    #[test]
    fn printed_moment_coincides_only_at_unit_variance() {
        let p = unit(7);
        assert_eq!(y2_second_moment(&p), y2_second_moment_printed(&p));
        let q = p
            .with_sigmas(Sigmas {
                ir: 2.0,
                id: 0.5,
                ..p.sigmas()
            })
            .unwrap();
        assert!((y2_second_moment(&q) / y2_second_moment_printed(&q) - 1.0).abs() > 0.1);
    }

    #[test]
    fn gamma_pdf_integrates_to_cdf() {
        let g = GammaFit::new(3.0, 1.7).unwrap();
        let gl = crate::quad::GaussLegendre::new(40);
        let v = gl.integrate(0.0, 3.0, |x| g.pdf(x));
        assert!((v - g.cdf(3.0)).abs() < 1e-12);
    }
}
