//! Exact density of `Y = |Σ|β(n)||α(n)|e^{jθ′(n)} + h_I|` from the Hankel
//! transform of the product of per-phasor characteristic functions:
//! `f_Y(y) = y ∫₀^∞ ρ J₀(yρ) Λ(ρ) dρ` with
//! `Λ(ρ) = (4/(4 + c²ρ²))^N e^{−σ²ρ²/4}`, `c = σ_I,R σ_R,D`, `σ = σ_I,D`.

use super::cf::{bound_quantile, y_tail_bound};
use super::grid::{GridSpec, PdfGrid, PdfMethod};
use super::pdf_x::GRID_TAIL_TOLERANCE;
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::quad::{self, GaussLegendre};
use crate::specfun::{bessel_j0, bessel_j0_zero};
use std::sync::OnceLock;

const DEFAULT_Y_POINTS: usize = 2049;
const NODES_PER_PANEL: usize = 8;

pub(crate) fn gl8() -> &'static GaussLegendre {
    static GL: OnceLock<GaussLegendre> = OnceLock::new();
    GL.get_or_init(|| GaussLegendre::new(NODES_PER_PANEL))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct HankelKernel {
    n: f64,
    c: f64,
    sigma: f64,
}

impl HankelKernel {
    pub(crate) fn new(params: &SystemParams) -> Self {
        HankelKernel {
            n: params.n_elements() as f64,
            c: params.interference_scale(),
            sigma: params.sigma_id(),
        }
    }

    pub(crate) fn ln_lambda(&self, rho: f64) -> f64 {
        let r2 = rho * rho;
        -self.n * (0.25 * self.c * self.c * r2).ln_1p() - 0.25 * self.sigma * self.sigma * r2
    }

    pub(crate) fn lambda(&self, rho: f64) -> f64 {
        self.ln_lambda(rho).exp()
    }

    fn second_moment(&self) -> f64 {
        self.sigma * self.sigma + self.n * self.c * self.c
    }

    /// Point beyond which `ρΛ(ρ)` is below `1e-18·(2/E[Y²])`.
    pub(crate) fn rho_cut(&self) -> f64 {
        let level = (1e-18 * 2.0 / self.second_moment()).ln();
        let g = |r: f64| r.ln() + self.ln_lambda(r);
        let mut hi = 1.0 / self.second_moment().sqrt();
        while g(hi) > level {
            hi *= 2.0;
        }
        let mut lo = 0.5 * hi;
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if g(m) > level {
                lo = m;
            } else {
                hi = m;
            }
        }
        hi
    }

    /// Distance over which `Λ` changes appreciably.
    fn variation_scale(&self) -> f64 {
        let rational = 2.0 / (self.c * self.n.sqrt());
        let gaussian = std::f64::consts::SQRT_2 / self.sigma;
        rational.min(gaussian)
    }

    /// Upper end of `Y`'s support with tail mass at most `tail`.
    pub(crate) fn y_upper(&self, tail: f64) -> f64 {
        let n = self.n as u32;
        bound_quantile(tail, self.second_moment().sqrt(), |y| {
            y_tail_bound(n, self.c, self.sigma, y)
        })
    }

    /// Fixed ρ-rule `(ρᵢ, wᵢρᵢΛ(ρᵢ))` resolving `J₀(yρ)` for all `y ≤ y_max`.
    pub(crate) fn rho_rule(&self, y_max: f64) -> Vec<(f64, f64)> {
        let cut = self.rho_cut();
        let width = (std::f64::consts::PI / y_max).min(0.5 * self.variation_scale());
        let panels = (cut / width).ceil().max(1.0) as usize;
        let h = cut / panels as f64;
        let gl = gl8();
        let mut rule = Vec::with_capacity(panels * NODES_PER_PANEL);
        for p in 0..panels {
            let c = (p as f64 + 0.5) * h;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let r = c + 0.5 * h * x;
                rule.push((r, 0.5 * h * w * r * self.lambda(r)));
            }
        }
        rule
    }
}

/// `f_Y` at each `y` using one shared ρ-rule (all `y` must be `≤ y_max`).
pub(crate) fn pdf_y_values(kernel: &HankelKernel, ys: &[f64], y_max: f64) -> Vec<f64> {
    let rule = kernel.rho_rule(y_max);
    ys.iter()
        .map(|&y| {
            if y <= 0.0 {
                return 0.0;
            }
            let s: f64 = rule.iter().map(|&(r, w)| w * bessel_j0(y * r)).sum();
            (y * s).max(0.0)
        })
        .collect()
}

/// Pointwise `f_Y(y)` by adaptive quadrature between consecutive zeros of
/// `J₀(yρ)`, with epsilon acceleration when many half-waves are needed.
pub fn pdf_y_at(params: &SystemParams, y: f64) -> Result<f64> {
    if !(y >= 0.0 && y.is_finite()) {
        return Err(Error::InvalidParams(format!("y = {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let k = HankelKernel::new(params);
    let cut = k.rho_cut();
    let scale = 2.0 / k.second_moment();
    let integrand = |r: f64| r * bessel_j0(y * r) * k.lambda(r);
    let mut partial = Vec::new();
    let mut total = 0.0;
    let mut left = 0.0;
    const MAX_DIRECT: usize = 400;
    for idx in 1.. {
        let right = bessel_j0_zero(idx)? / y;
        let seg = quad::adaptive(left, right, 1e-17 * scale, 1e-14, 200, integrand)
            .map_err(|r| {
                Error::precision(
                    "pdf_y_at",
                    format!("segment [{left}, {right}] error {:e}", r.error),
                )
            })?;
        total += seg.value;
        partial.push(total);
        if left >= cut {
            return Ok((y * total).max(0.0));
        }
        if idx >= MAX_DIRECT {
            break;
        }
        left = right;
    }
    let (a, ea) = quad::wynn_epsilon(&partial);
    let (b, _) = quad::wynn_epsilon(&partial[..partial.len() - 10]);
    if (a - b).abs() > 1e-10 * scale || !ea.is_finite() {
        return Err(Error::precision(
            "pdf_y_at",
            format!("tail acceleration unstable at y = {y}: {a:e} vs {b:e}"),
        ));
    }
    Ok((y * a).max(0.0))
}

/// Density of `Y` on a uniform grid over `[0, upper]`.
pub fn pdf_y_exact(params: &SystemParams, spec: GridSpec) -> Result<PdfGrid> {
    let k = HankelKernel::new(params);
    let upper = match spec.upper {
        None => k.y_upper(1e-12),
        Some(u) => {
            if !(u > 0.0 && u.is_finite()) {
                return Err(Error::InvalidParams(format!("grid upper bound {u}")));
            }
            let tail = y_tail_bound(params.n_elements(), k.c, k.sigma, u);
            if tail > GRID_TAIL_TOLERANCE {
                return Err(Error::Grid {
                    upper: u,
                    tail_mass: tail,
                    suggested_upper: k.y_upper(1e-12),
                });
            }
            u
        }
    };
    let points = spec.points.unwrap_or(DEFAULT_Y_POINTS);
    if points < 16 {
        return Err(Error::InvalidParams(format!(
            "pdf_y grid needs at least 16 points, got {points}"
        )));
    }
    let support: Vec<f64> = (0..points)
        .map(|i| upper * i as f64 / (points - 1) as f64)
        .collect();
    let density = pdf_y_values(&k, &support, upper);
    Ok(PdfGrid::new(support, density, PdfMethod::Hankel))
}
