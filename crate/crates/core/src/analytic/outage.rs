//! Outage probability: exact, gamma-approximate (closed form and numeric),
//! asymptotic, and the diversity/coding-gain summary.

use super::estimate::{ErrorBound, EstimateFlag, OutageEstimate, OutageMethod};
use super::fit::GammaFit;
use super::pdf_x::XLaw;
use super::pdf_y::{pdf_y_values, HankelKernel};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::quad;
use crate::specfun::{ln_gamma, ln_pcf_d, reg_lower_gamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// Below this value the exact route no longer meets its accuracy target.
pub const EXACT_ACCURACY_FLOOR: f64 = 1e-6;
/// Largest clamping correction accepted silently (with a flag).
const CLAMP_SLACK: f64 = 1e-9;

/// Exact outage `P(γ < γ_th) = ∫ f_Y(y) F_X(y√(γ_th/γ̄)) dy`.
pub fn op_exact(params: &SystemParams) -> Result<OutageEstimate> {
    let kappa = (params.gamma_th() / params.gamma_bar()).sqrt();
    let cx = params.desired_scale();
    let law = XLaw::unit(params.n_elements());
    let kernel = HankelKernel::new(params);
    let y_max = kernel.y_upper(1e-14);
    let x_hi = law.length() * cx;
    let y_cut = y_max.min(x_hi / kappa);
    let n = params.n_elements() as f64;
    let sd_x = (n * (1.0 - PI * PI / 16.0)).sqrt() * cx;
    let sd_y = 0.5 * (params.sigma_id().powi(2) + n * params.interference_scale().powi(2)).sqrt();
    let width = sd_y.min(sd_x / kappa);
    let panels = ((y_cut / width).ceil() as usize).clamp(16, 20_000);

    let (ys, wk, wg) = quad::gk15_composite(0.0, y_cut, panels);
    let fy = pdf_y_values(&kernel, &ys, y_cut);
    let (mut fine, mut coarse, mut mass) = (0.0, 0.0, 0.0);
    for i in 0..ys.len() {
        let v = fy[i] * law.cdf(kappa * ys[i] / cx);
        fine += wk[i] * v;
        coarse += wg[i] * v;
        mass += wk[i] * fy[i];
    }
    let survival = if y_cut < y_max { (1.0 - mass).max(0.0) } else { 0.0 };
    let raw = fine + survival;
    let bound = (fine - coarse).abs() + 1e-13;
    if !raw.is_finite() {
        return Err(Error::precision("op_exact", "non-finite quadrature result"));
    }
    let mut est = OutageEstimate::new(
        raw.clamp(0.0, 1.0),
        OutageMethod::ExactNumeric,
        ErrorBound::Absolute { bound },
    );
    if raw < -CLAMP_SLACK || raw > 1.0 + CLAMP_SLACK {
        return Err(Error::precision(
            "op_exact",
            format!("result {raw} outside [0, 1]"),
        ));
    }
    if raw != est.value {
        est.flag(EstimateFlag::Clamped);
    }
    if est.value < EXACT_ACCURACY_FLOOR {
        est.flag(EstimateFlag::DegradedAccuracy);
    }
    Ok(est)
}

fn check_inputs(fit_x: &GammaFit, fit_y: &GammaFit, gamma_th: f64, gamma_bar: f64) -> Result<f64> {
    for f in [fit_x, fit_y] {
        GammaFit::new(f.shape, f.scale)?;
    }
    if !(gamma_th > 0.0 && gamma_th.is_finite() && gamma_bar > 0.0 && gamma_bar.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "thresholds must be positive and finite, got gamma_th = {gamma_th}, gamma_bar = {gamma_bar}"
        )));
    }
    // Every approximate form depends on the SIR scale only through this ratio.
    Ok(gamma_th * fit_y.scale / (gamma_bar * fit_x.scale * fit_x.scale))
}

/// `∫ Gamma(y; k_Y, θ_Y) · P(k_X, √(yγ_th/γ̄)/θ_X) dy` by adaptive quadrature.
pub fn op_approx_numeric(
    fit_x: &GammaFit,
    fit_y: &GammaFit,
    gamma_th: f64,
    gamma_bar: f64,
) -> Result<OutageEstimate> {
    let w = check_inputs(fit_x, fit_y, gamma_th, gamma_bar)?;
    let (kx, ky) = (fit_x.shape, fit_y.shape);
    let peak = ky + 0.5 * kx;
    let u_max = peak + 40.0 * peak.sqrt() + 50.0;
    let inner = |u: f64| reg_lower_gamma(kx, (u * w).sqrt()).unwrap_or(f64::NAN);
    let mut breaks: Vec<f64> = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0]
        .iter()
        .map(|f| f * peak)
        .chain([peak + 5.0 * peak.sqrt() + 5.0, u_max])
        .collect();
    breaks.dedup();
    let result = if ky >= 1.0 {
        let lg = ln_gamma(ky)?.value;
        let mut f = |u: f64| {
            if u <= 0.0 {
                return if ky == 1.0 { inner(0.0) } else { 0.0 };
            }
            ((ky - 1.0) * u.ln() - u - lg).exp() * inner(u)
        };
        quad::adaptive_from(&breaks, 0.0, 1e-11, 4000, &mut f)
    } else {
        // u = v^{1/k_Y} removes the integrable singularity at the origin.
        let lg = ln_gamma(ky + 1.0)?.value;
        let vb: Vec<f64> = breaks.iter().map(|u| u.powf(ky)).collect();
        let mut f = |v: f64| {
            let u = v.powf(1.0 / ky);
            (-u - lg).exp() * inner(u)
        };
        quad::adaptive_from(&vb, 0.0, 1e-11, 4000, &mut f)
    };
    let r = result.map_err(|r| {
        Error::precision(
            "op_approx_numeric",
            format!("quadrature did not converge (estimate {:e}, error {:e})", r.value, r.error),
        )
    })?;
    if !r.value.is_finite() {
        return Err(Error::precision("op_approx_numeric", "non-finite integrand"));
    }
    let mut est = OutageEstimate::new(
        r.value.clamp(0.0, 1.0),
        OutageMethod::GammaNumeric,
        ErrorBound::Absolute { bound: r.error },
    );
    if est.value != r.value {
        est.flag(EstimateFlag::Clamped);
    }
    Ok(est)
}

/// Finite parabolic-cylinder series for integer `k_X` (the shape is rounded
/// to the nearest positive integer and the rounding recorded).
pub fn op_approx_closed(
    fit_x: &GammaFit,
    fit_y: &GammaFit,
    gamma_th: f64,
    gamma_bar: f64,
) -> Result<OutageEstimate> {
    let w = check_inputs(fit_x, fit_y, gamma_th, gamma_bar)?;
    let ky = fit_y.shape;
    let m = fit_x.shape.round().max(1.0) as u32;
    let deepest = -(2.0 * ky + (m - 1) as f64);
    if deepest < -500.0 {
        return Err(Error::precision(
            "op_approx_closed",
            format!("parabolic-cylinder order {deepest} below -500; use op_approx_numeric"),
        ));
    }
    let z = (0.5 * w).sqrt();
    let lg_ky = ln_gamma(ky)?.value;
    let mut sum = 0.0;
    let mut abs = 0.0;
    for i in 0..m {
        let i_f = i as f64;
        let nu = 2.0 * ky + i_f;
        let ln_w = if i == 0 { 0.0 } else { 0.5 * i_f * w.ln() };
        let l = -ln_gamma(i_f + 1.0)?.value + ln_gamma(nu)?.value
            - (ky + 0.5 * i_f - 1.0) * LN_2
            - lg_ky
            + ln_w
            + w / 8.0
            + ln_pcf_d(-nu, z)?;
        let t = l.exp();
        sum += t;
        abs += t.abs();
    }
    let raw = 1.0 - sum;
    let numerical = 1e-14 * abs.max(1.0) * m as f64;
    if raw < -CLAMP_SLACK || raw > 1.0 + CLAMP_SLACK || !raw.is_finite() {
        return Err(Error::precision(
            "op_approx_closed",
            format!("series result {raw} outside [0, 1]"),
        ));
    }
    let err = if (fit_x.shape - m as f64).abs() > 1e-12 {
        ErrorBound::RoundedShape {
            shape: fit_x.shape,
            rounded: m,
            numerical,
        }
    } else {
        ErrorBound::Absolute { bound: numerical }
    };
    let mut est = OutageEstimate::new(raw.clamp(0.0, 1.0), OutageMethod::GammaClosed, err);
    if est.value != raw {
        est.flag(EstimateFlag::Clamped);
    }
    Ok(est)
}

/// `ln` of the high-SIR power law.
fn ln_asymptotic(fit_x: &GammaFit, fit_y: &GammaFit, w: f64) -> Result<f64> {
    let (kx, ky) = (fit_x.shape, fit_y.shape);
    Ok(ln_gamma(ky + 0.5 * kx)?.value - ln_gamma(kx + 1.0)?.value - ln_gamma(ky)?.value
        + 0.5 * kx * w.ln())
}

/// High-SIR power law. Values above one (low SIR) are clamped and flagged.
pub fn op_asymptotic(
    fit_x: &GammaFit,
    fit_y: &GammaFit,
    gamma_th: f64,
    gamma_bar: f64,
) -> Result<OutageEstimate> {
    let w = check_inputs(fit_x, fit_y, gamma_th, gamma_bar)?;
    let raw = ln_asymptotic(fit_x, fit_y, w)?.exp();
    let mut est = OutageEstimate::new(
        raw.min(1.0),
        OutageMethod::Asymptotic,
        ErrorBound::Model { rmse: None },
    );
    if raw > 1.0 {
        est.flag(EstimateFlag::Clamped);
    }
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub diversity_order: f64,
    pub coding_gain: f64,
}

/// Diversity order `k_X/2` and coding gain, so that the asymptote reads
/// `(G_c γ̄/γ_th)^{−G_d}`.
pub fn diversity_and_coding(fit_x: &GammaFit, fit_y: &GammaFit) -> Result<DiversityReport> {
    let w = check_inputs(fit_x, fit_y, 1.0, 1.0)?;
    let kx = fit_x.shape;
    // ln P at γ̄ = γ_th = 1 is ln[Γ-ratio] + (k_X/2)·ln(θ_Y/θ_X²).
    let ln_ratio = ln_asymptotic(fit_x, fit_y, w)? - 0.5 * kx * w.ln();
    Ok(DiversityReport {
        diversity_order: 0.5 * kx,
        coding_gain: (-2.0 / kx * ln_ratio).exp() / w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::fit::{gamma_fit_x, gamma_fit_y2};

    fn fits(n: u32) -> (GammaFit, GammaFit) {
        let p = SystemParams::unit(n, 20.0, 0.0, 0.0).unwrap();
        (gamma_fit_x(&p), gamma_fit_y2(&p).unwrap())
    }

    #[test]
    fn two_exponential_case() {
        // k_X = k_Y = 1: P = ∫ e^{-u}(1 − e^{-√(uw)}) du.
        let fx = GammaFit::new(1.0, 1.0).unwrap();
        let fy = GammaFit::new(1.0, 1.0).unwrap();
        let w: f64 = 0.3;
        let p = op_approx_numeric(&fx, &fy, w, 1.0).unwrap().value;
        // ∫ e^{-u-√(wu)} du = 1 − √(πw)/2 · e^{w/4} erfc(√w/2)
        let inner = 1.0 - (PI * w).sqrt() / 2.0 * (w / 4.0).exp() * crate::specfun::erfc(w.sqrt() / 2.0);
        assert!((p - (1.0 - inner)).abs() < 1e-12);
    }

    #[test]
    fn closed_matches_numeric_at_integer_shape() {
        let fx = GammaFit::new(6.0, 0.4).unwrap();
        let fy = GammaFit::new(0.9, 4.5).unwrap();
        for th in [0.01, 0.3, 2.0] {
            let a = op_approx_closed(&fx, &fy, th, 1.0).unwrap().value;
            let b = op_approx_numeric(&fx, &fy, th, 1.0).unwrap().value;
            assert!((a - b).abs() < 1e-9, "th = {th}: {a} vs {b}");
        }
    }

    #[test]
    fn closed_records_rounding() {
        let (fx, fy) = fits(4);
        let e = op_approx_closed(&fx, &fy, 1.0, 100.0).unwrap();
        assert!(matches!(e.err, ErrorBound::RoundedShape { rounded: 6, .. }));
    }

    #[test]
    fn asymptote_power_law() {
        let (fx, fy) = fits(4);
        let a = op_asymptotic(&fx, &fy, 1.0, 1e6).unwrap().value;
        let b = op_asymptotic(&fx, &fy, 1.0, 2e6).unwrap().value;
        assert!((b / a / 2f64.powf(-fx.shape / 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coding_gain_identity() {
        let (fx, fy) = fits(8);
        let d = diversity_and_coding(&fx, &fy).unwrap();
        for gb in [1e3, 1e5, 1e7] {
            let p = op_asymptotic(&fx, &fy, 1.0, gb).unwrap().value;
            let q = (d.coding_gain * gb).powf(-d.diversity_order);
            assert!((p / q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_vanishes_for_tiny_threshold() {
        let p = SystemParams::unit(4, 20.0, 0.0, -100.0).unwrap();
        assert!(op_exact(&p).unwrap().value < 1e-10);
    }

    #[test]
    fn exact_is_certain_for_huge_threshold() {
        // Only Y < X/κ (κ = 1000) survives; that mass is about E[X²]/(κ²E[Y²]).
        let p = SystemParams::unit(4, -20.0, 0.0, 40.0).unwrap();
        let v = op_exact(&p).unwrap().value;
        assert!(v < 1.0 && 1.0 - v < 1e-5, "{v}");
    }
}
