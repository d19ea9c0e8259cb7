//! Explicit series for `f_Y`, used to cross-check the Hankel route.
//!
//! With `a = 2/c`, `ν = N − 1`, `z = y²/σ²` and `C = a^{N+1}/(2^{N−1}Γ(N))`:
//!
//! `f_Y(y) = (2y/σ²)·C·π/(2 sin νπ)·Σₖ [T₁ₖ − T₂ₖ]`,
//! `T₁ₖ = (a/2)^{2k−ν} σ^{2k+2} M(−k; 1; −z) / (2Γ(k−ν+1))`,
//! `T₂ₖ = (a/2)^{2k+ν} σ^{2k+2N} M(1−k−N; 1; −z) / (2·k!)`.
//!
//! The expression has removable poles at integer `N`; it is evaluated at
//! `N ± ε` and the two values averaged.

use crate::error::{Error, Result};
use crate::model::SystemParams;
use super::grid::PdfMethod;
use super::pdf_y::pdf_y_at;
use crate::specfun::{kummer_1f1, ln_gamma};
use std::f64::consts::{LN_2, PI};

/// Regularization offset applied to `N`.
pub const SERIES_EPSILON: f64 = 1e-4;
/// Largest tolerated relative disagreement between the two offsets.
pub const SERIES_GAP_TOLERANCE: f64 = 1e-2;

struct Evaluation {
    value: f64,
    rel_error: f64,
}

fn evaluate(n: f64, c: f64, sigma: f64, y: f64, m_max: usize) -> Result<Evaluation> {
    let a = 2.0 / c;
    let nu = n - 1.0;
    let z = y * y / (sigma * sigma);
    let ln_half_a = (0.5 * a).ln();
    let ln_s = sigma.ln();
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(2 * m_max);
    let mut lmax = f64::NEG_INFINITY;
    let mut converged = false;
    for k in 0..m_max {
        let kf = k as f64;
        let m1 = kummer_1f1(-kf, 1.0, -z)?;
        let g1 = ln_gamma(kf - nu + 1.0)?;
        let l1 = (2.0 * kf - nu) * ln_half_a + (2.0 * kf + 2.0) * ln_s - LN_2 + m1.ln() - g1.value;
        let m2 = kummer_1f1(1.0 - kf - n, 1.0, -z)?;
        let l2 = (2.0 * kf + nu) * ln_half_a + (2.0 * kf + 2.0 * n) * ln_s - LN_2 + m2.ln()
            - ln_gamma(kf + 1.0)?.value;
        terms.push((l1, g1.sign));
        terms.push((l2, -1.0));
        let lk = l1.max(l2);
        let decreasing = terms.len() >= 4 && lk < terms[terms.len() - 4].0.max(terms[terms.len() - 3].0);
        lmax = lmax.max(lk);
        if decreasing && lk < lmax - 45.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::precision(
            "pdf_y_series",
            format!("series not converged within {m_max} terms"),
        ));
    }
    let mut sum = 0.0;
    let mut abs = 0.0;
    for &(l, s) in &terms {
        let v = (l - lmax).exp();
        sum += s * v;
        abs += v;
    }
    let ln_c = (n + 1.0) * a.ln() - (n - 1.0) * LN_2 - ln_gamma(n)?.value;
    let sin = (nu * PI).sin();
    let ln_pre = (2.0 * y / (sigma * sigma)).ln() + ln_c + (0.5 * PI).ln() - sin.abs().ln();
    let value = sin.signum() * (ln_pre + lmax).exp() * sum;
    let rel_error = 4.0 * f64::EPSILON * abs * terms.len() as f64 / sum.abs();
    Ok(Evaluation { value, rel_error })
}

/// `f_Y(y)` from the explicit series, regularized at integer `N`.
pub fn pdf_y_series(params: &SystemParams, y: f64, m_max: usize) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidParams(format!("pdf_y_series needs y > 0, got {y}")));
    }
    if m_max == 0 {
        return Err(Error::InvalidParams("m_max must be positive".into()));
    }
    let n = params.n_elements() as f64;
    let c = params.interference_scale();
    let s = params.sigma_id();
    let hi = evaluate(n + SERIES_EPSILON, c, s, y, m_max)?;
    let lo = evaluate(n - SERIES_EPSILON, c, s, y, m_max)?;
    let mean = 0.5 * (hi.value + lo.value);
    let gap = (hi.value - lo.value).abs() / mean.abs();
    let noise = hi.rel_error.max(lo.rel_error);
    if !(gap <= SERIES_GAP_TOLERANCE && noise <= SERIES_GAP_TOLERANCE) || !mean.is_finite() {
        return Err(Error::SeriesInstability {
            relative_gap: if gap.is_finite() { gap.max(noise) } else { f64::INFINITY },
        });
    }
    Ok(mean)
}

/// `f_Y(y)` from the series when it is stable, otherwise from the Hankel
/// quadrature; the route taken is returned alongside the value.
pub fn pdf_y_point(params: &SystemParams, y: f64) -> Result<(f64, PdfMethod)> {
    match pdf_y_series(params, y, 400) {
        Ok(v) => Ok((v, PdfMethod::Series)),
        Err(e) if e.is_numerical() => {
            log::debug!("series fallback at y = {y}: {e}");
            Ok((pdf_y_at(params, y)?, PdfMethod::Hankel))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sigmas;

    #[test]
    fn matches_hankel_route() {
        let cases = [(4u32, 2.0, 1.0, 1.0), (1, 0.5, 1.0, 1.0), (16, 3.0, 1.0, 1.0), (4, 1.0, 0.7, 1.5)];
        for (n, y, s, c) in cases {
            let p = SystemParams::new(
                n,
                Sigmas {
                    ir: c,
                    id: s,
                    ..Sigmas::default()
                },
                0.0,
                0.0,
                0.0,
            )
            .unwrap();
            let a = pdf_y_series(&p, y, 400).unwrap();
            let b = pdf_y_at(&p, y).unwrap();
            assert!((a / b - 1.0).abs() < 1e-6, "N = {n}, y = {y}: {a} vs {b}");
        }
    }

    #[test]
    fn large_arguments_report_instability() {
        let p = SystemParams::unit(64, 0.0, 0.0, 0.0).unwrap();
        let e = pdf_y_series(&p, 20.0, 400).unwrap_err();
        assert!(e.is_numerical(), "{e:?}");
        let (v, method) = pdf_y_point(&p, 20.0).unwrap();
        assert_eq!(method, PdfMethod::Hankel);
        assert!((v / pdf_y_at(&p, 20.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
