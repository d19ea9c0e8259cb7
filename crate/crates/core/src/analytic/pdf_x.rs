//! Exact law of `X = Σ|g(n)||h(n)|` by Fourier-series inversion of the
//! characteristic-function power.

use super::cf::{bound_quantile, double_rayleigh_cf, x_tail_bound};
use super::grid::{GridSpec, PdfGrid, PdfMethod};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Tail mass allowed beyond a user-supplied support.
pub const GRID_TAIL_TOLERANCE: f64 = 1e-6;
/// Tail mass targeted by the default support (it wraps around under
/// periodization, so it bounds the absolute CDF error near zero).
const DEFAULT_TAIL: f64 = 1e-14;

pub(crate) fn default_points(n: u32) -> usize {
    if n == 1 {
        1 << 18
    } else {
        1 << 16
    }
}

/// Default support length at unit scale `c = 1`.
pub(crate) fn default_length(n: u32) -> f64 {
    let nf = n as f64;
    let mean = nf * PI / 4.0;
    let sd = (nf * (1.0 - PI * PI / 16.0)).sqrt();
    let chernoff = bound_quantile(DEFAULT_TAIL, mean + sd, |x| x_tail_bound(n, 1.0, x));
    (mean + 12.0 * sd).max(chernoff)
}

/// Density and CDF of `X` at unit scale on `x_j = j·L/M`.
#[derive(Debug)]
pub(crate) struct XLaw {
    dx: f64,
    pdf: Vec<f64>,
    cdf: Vec<f64>,
}

impl XLaw {
    pub(crate) fn build(n: u32, points: usize, length: f64) -> XLaw {
        let m = points;
        let mut coef = vec![Complex64::new(0.0, 0.0); m];
        let mut integ = vec![Complex64::new(0.0, 0.0); m];
        let half = m / 2;
        for k in 0..half {
            let t = 2.0 * PI * k as f64 / length;
            let c = double_rayleigh_cf(1.0, t).powu(n);
            coef[k] = c;
            if k > 0 {
                let d = c / Complex64::new(0.0, t);
                integ[k] = d;
                coef[m - k] = c.conj();
                integ[m - k] = d.conj();
            }
        }
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut coef);
        fft.process(&mut integ);
        let dx = length / m as f64;
        let d0 = integ[0].re;
        let pdf = coef.iter().map(|v| (v.re / length).max(0.0)).collect();
        let cdf = integ
            .iter()
            .enumerate()
            .map(|(j, v)| ((j as f64 * dx + d0 - v.re) / length).clamp(0.0, 1.0))
            .collect();
        XLaw { dx, pdf, cdf }
    }

    /// Cached law with the default grid.
    pub(crate) fn unit(n: u32) -> Arc<XLaw> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<XLaw>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(v) = cache.lock().expect("x-law cache poisoned").get(&n) {
            return v.clone();
        }
        let law = Arc::new(XLaw::build(n, default_points(n), default_length(n)));
        cache
            .lock()
            .expect("x-law cache poisoned")
            .entry(n)
            .or_insert(law)
            .clone()
    }

    pub(crate) fn length(&self) -> f64 {
        self.dx * self.pdf.len() as f64
    }

    /// CDF at unit scale by cubic Hermite interpolation (density as slope).
    pub(crate) fn cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let pos = u / self.dx;
        let i = pos.floor() as usize;
        if i + 1 >= self.cdf.len() {
            return 1.0;
        }
        let t = pos - i as f64;
        let (p0, p1) = (self.cdf[i], self.cdf[i + 1]);
        let (m0, m1) = (self.pdf[i] * self.dx, self.pdf[i + 1] * self.dx);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1;
        v.clamp(0.0, 1.0)
    }
}

/// `F_X(x)` from the cached unit-scale law.
pub fn x_cdf(params: &SystemParams, x: f64) -> f64 {
    XLaw::unit(params.n_elements()).cdf(x / params.desired_scale())
}

/// Density of `X` on a uniform grid over `[0, upper)`.
pub fn pdf_x_exact(params: &SystemParams, spec: GridSpec) -> Result<PdfGrid> {
    let n = params.n_elements();
    let c = params.desired_scale();
    let default_upper = default_length(n) * c;
    let upper = match spec.upper {
        None => default_upper,
        Some(u) => {
            if !(u > 0.0 && u.is_finite()) {
                return Err(Error::InvalidParams(format!("grid upper bound {u}")));
            }
            let tail = x_tail_bound(n, c, u);
            if tail > GRID_TAIL_TOLERANCE {
                return Err(Error::Grid {
                    upper: u,
                    tail_mass: tail,
                    suggested_upper: default_upper,
                });
            }
            u
        }
    };
    let points = spec.points.unwrap_or_else(|| default_points(n));
    if points < 64 {
        return Err(Error::InvalidParams(format!(
            "pdf_x grid needs at least 64 points, got {points}"
        )));
    }
    let law = XLaw::build(n, points, upper / c);
    let support = (0..points).map(|j| j as f64 * law.dx * c).collect();
    let density = law.pdf.iter().map(|d| d / c).collect();
    Ok(PdfGrid::new(support, density, PdfMethod::CfFft))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sigmas;
    use crate::specfun::bessel_k0;

    #[test]
    fn single_term_density() {
        let p = SystemParams::unit(1, 0.0, 0.0, 0.0).unwrap();
        let g = pdf_x_exact(&p, GridSpec::default()).unwrap();
        let mut worst = 0.0f64;
        for (x, d) in g.support.iter().zip(&g.density).step_by(97).skip(1) {
            let exact = 4.0 * x * bessel_k0(2.0 * x).unwrap();
            worst = worst.max((d - exact).abs());
        }
        assert!(worst < 1e-4, "max abs error {worst}");
        assert!((g.integral() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cdf_consistent_with_density() {
        let law = XLaw::unit(4);
        let gl = crate::quad::GaussLegendre::new(30);
        let grid = pdf_x_exact(
            &SystemParams::unit(4, 0.0, 0.0, 0.0).unwrap(),
            GridSpec::default(),
        )
        .unwrap();
        for &x in &[0.5, 2.0, 3.3, 7.0] {
            let direct = (0..20)
                .map(|i| {
                    let a = x * i as f64 / 20.0;
                    gl.integrate(a, a + x / 20.0, |u| grid.density_at(u))
                })
                .sum::<f64>();
            assert!((law.cdf(x) - direct).abs() < 1e-7, "x = {x}");
        }
        assert!((law.cdf(law.length() * 0.999) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scale_enters_through_product() {
        let p = SystemParams::new(
            3,
            Sigmas {
                sr: 2.0,
                rd: 0.7,
                ..Sigmas::default()
            },
            0.0,
            0.0,
            0.0,
        )
        .unwrap();
        let q = SystemParams::new(
            3,
            Sigmas {
                sr: 1.4,
                rd: 1.0,
                ..Sigmas::default()
            },
            0.0,
            0.0,
            0.0,
        )
        .unwrap();
        assert!((x_cdf(&p, 2.0) - x_cdf(&q, 2.0)).abs() < 1e-14);
    }

    #[test]
    fn short_support_is_rejected() {
        let p = SystemParams::unit(16, 0.0, 0.0, 0.0).unwrap();
        match pdf_x_exact(&p, GridSpec::new(4096, 15.0)) {
            Err(Error::Grid {
                suggested_upper, ..
            }) => assert!(suggested_upper > 15.0),
            other => panic!("expected grid error, got {other:?}"),
        }
    }
}
