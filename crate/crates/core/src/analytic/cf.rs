//! Transforms of the double-Rayleigh law and Chernoff tail bounds.

use crate::specfun::erf;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Characteristic function of `Z = R₁R₂` with `E[R₁²]E[R₂²] = c²`.
///
/// With `a = 2/c`, `φ(t) = a²(1 + i t G(t))/(a² + t²)` and
/// `G(t) = (π/2 + i asinh(t/a))/√(a² + t²)`.
pub fn double_rayleigh_cf(c: f64, t: f64) -> Complex64 {
    let a = 2.0 / c;
    let r2 = a * a + t * t;
    let g = Complex64::new(PI / 2.0, (t / a).asinh()) / r2.sqrt();
    let num = Complex64::new(1.0, 0.0) + Complex64::new(0.0, t) * g;
    num * (a * a / r2)
}

/// Moment generating function of `Z` for real `s < 2/c`.
pub fn double_rayleigh_mgf(c: f64, s: f64) -> f64 {
    let a = 2.0 / c;
    if s >= a {
        return f64::INFINITY;
    }
    if s.abs() < 1e-9 * a {
        return 1.0 + s * PI / (2.0 * a);
    }
    let d = a * a - s * s;
    a * a * (1.0 + s * (-s / a).acos() / d.sqrt()) / d
}

/// MGF of a Rayleigh magnitude with `E[R²] = σ²`.
pub fn rayleigh_mgf(sigma: f64, s: f64) -> f64 {
    let u = s * sigma;
    1.0 + 0.5 * PI.sqrt() * u * (0.25 * u * u).exp() * (1.0 + erf(0.5 * u))
}

/// Minimizes a convex function on `(lo, hi)` by golden-section search.
fn golden_min(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        if (b - a) < 1e-12 * hi {
            break;
        }
    }
    f1.min(f2)
}

/// Chernoff bound on `P(X > x)` for a sum of `n` i.i.d. double-Rayleigh terms.
pub fn x_tail_bound(n: u32, c: f64, x: f64) -> f64 {
    let a = 2.0 / c;
    let nf = n as f64;
    if x <= nf * PI / 4.0 * c {
        return 1.0;
    }
    let ln = golden_min(0.0, a * (1.0 - 1e-12), |s| {
        nf * double_rayleigh_mgf(c, s).ln() - s * x
    });
    ln.exp().min(1.0)
}

/// Bound on `P(Y > y)` for `Y = |Σ Zₙe^{jθₙ} + h_I e^{jφ}|`.
///
/// `|S| > y` forces the projection on one of eight equally spaced directions
/// above `y·cos(π/8)`; each projection has MGF `(1 − s²c²/4)^{−N} e^{s²σ²/4}`.
pub fn y_tail_bound(n: u32, c: f64, sigma_d: f64, y: f64) -> f64 {
    let t = y * (PI / 8.0).cos();
    let nf = n as f64;
    let hi = 2.0 / c;
    let ln = golden_min(0.0, hi * (1.0 - 1e-12), |s| {
        -nf * (1.0 - 0.25 * s * s * c * c).ln() + 0.25 * s * s * sigma_d * sigma_d - s * t
    });
    (8.0 * ln.exp()).min(1.0)
}

/// Smallest grid point (bisection on the monotone bound) with tail below `target`.
pub fn bound_quantile(target: f64, start: f64, bound: impl Fn(f64) -> f64) -> f64 {
    let mut hi = start.max(1e-12);
    while bound(hi) > target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let m = 0.5 * (lo + hi);
        if bound(m) > target {
            lo = m;
        } else {
            hi = m;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use crate::specfun::bessel_k0;

    /// Quadrature of the density `4h/c²·K₀(2h/c)` against `e^{ith}`.
    fn cf_by_quadrature(c: f64, t: f64) -> Complex64 {
        let f = |h: f64| {
            if h <= 0.0 {
                0.0
            } else {
                4.0 * h / (c * c) * bessel_k0(2.0 * h / c).unwrap()
            }
        };
        let re = quad::adaptive(0.0, 60.0 * c, 1e-14, 1e-13, 4000, |h| f(h) * (t * h).cos()).unwrap();
        let im = quad::adaptive(0.0, 60.0 * c, 1e-14, 1e-13, 4000, |h| f(h) * (t * h).sin()).unwrap();
        Complex64::new(re.value, im.value)
    }

    #[test]
    fn cf_matches_density_quadrature() {
        for &c in &[0.5, 1.0, 2.3] {
            for &t in &[0.0, 0.3, 1.0, 4.0, 11.0] {
                let a = double_rayleigh_cf(c, t);
                let b = cf_by_quadrature(c, t);
                assert!((a - b).norm() < 1e-10, "c = {c}, t = {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn mgf_matches_cf_mean() {
        let c = 1.7;
        let h = 1e-5;
        let d = (double_rayleigh_mgf(c, h) - double_rayleigh_mgf(c, -h)) / (2.0 * h);
        assert!((d - PI / 4.0 * c).abs() < 1e-8);
    }

    #[test]
    fn rayleigh_mgf_second_moment() {
        let s = 1.3;
        let h = 1e-4;
        let m2 = (rayleigh_mgf(s, h) - 2.0 + rayleigh_mgf(s, -h)) / (h * h);
        assert!((m2 - s * s).abs() < 1e-6);
    }

    #[test]
    fn tail_bounds_are_monotone() {
        let a = x_tail_bound(4, 1.0, 10.0);
        let b = x_tail_bound(4, 1.0, 14.0);
        assert!(b < a && a < 1.0);
        let a = y_tail_bound(4, 1.0, 1.0, 6.0);
        let b = y_tail_bound(4, 1.0, 1.0, 9.0);
        assert!(b < a && a < 1.0);
    }
}
