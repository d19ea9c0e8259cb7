//! Log-gamma, regularized incomplete gamma, error functions.

use super::{domain, is_nonpositive_integer, SfResult, SpecFunError};
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnGamma {
    pub value: f64,
    pub sign: f64,
}

/// `sin(πx)` with exact argument reduction.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]
    let (r, s) = if r > 0.5 {
        (1.0 - r, 1.0)
    } else if r < -0.5 {
        (-1.0 - r, 1.0)
    } else {
        (r, 1.0)
    };
    s * (PI * r).sin()
}

fn stirling(x: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let r = 1.0 / (x * x);
    let mut s = 0.0;
    for c in C.iter().rev() {
        s = s * r + c;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + s / x
}

/// `ln|Γ(x)|` and sign. Poles at non-positive integers are reported.
pub fn ln_gamma(x: f64) -> SfResult<LnGamma> {
    if !x.is_finite() {
        return Err(domain("ln_gamma", format!("x = {x}")));
    }
    if is_nonpositive_integer(x) {
        return Err(SpecFunError::Pole {
            function: "ln_gamma",
            at: x,
        });
    }
    if x < 0.5 {
        let s = sin_pi(x);
        let rest = ln_gamma(1.0 - x)?;
        return Ok(LnGamma {
            value: PI.ln() - s.abs().ln() - rest.value,
            sign: s.signum(),
        });
    }
    if x >= 10.0 {
        return Ok(LnGamma {
            value: stirling(x),
            sign: 1.0,
        });
    }
    let n = (10.0 - x).ceil() as usize;
    let mut prod = 1.0;
    for k in 0..n {
        prod *= x + k as f64;
    }
    Ok(LnGamma {
        value: stirling(x + n as f64) - prod.ln(),
        sign: 1.0,
    })
}

/// `Γ(x)`; overflows to infinity for `x > 171.6`.
pub fn gamma(x: f64) -> SfResult<f64> {
    if x > 0.0 && x <= 20.0 && x == x.round() {
        let mut f = 1.0;
        for k in 2..(x as u64) {
            f *= k as f64;
        }
        return Ok(f);
    }
    let g = ln_gamma(x)?;
    Ok(g.sign * g.value.exp())
}

fn check_incomplete(name: &'static str, a: f64, x: f64) -> SfResult<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain(name, format!("a = {a} must be positive")));
    }
    if !(x >= 0.0) {
        return Err(domain(name, format!("x = {x} must be non-negative")));
    }
    Ok(())
}

fn iteration_budget(a: f64) -> usize {
    500usize.max((20.0 * a.sqrt()) as usize + 100)
}

/// Series for `P(a, x)`, valid for `x < a + 1`.
fn lower_series(a: f64, x: f64, prefactor: f64) -> SfResult<f64> {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..iteration_budget(a).max((2.0 * x) as usize + 100) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            return Ok(sum * prefactor);
        }
    }
    Err(super::precision(
        "reg_lower_gamma",
        format!("series did not converge (a = {a}, x = {x})"),
    ))
}

/// Lentz continued fraction for `Q(a, x)`, valid for `x ≥ a + 1`.
fn upper_cf(a: f64, x: f64, prefactor: f64) -> SfResult<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..iteration_budget(a) {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(prefactor * h);
        }
    }
    Err(super::precision(
        "reg_upper_gamma",
        format!("continued fraction did not converge (a = {a}, x = {x})"),
    ))
}

fn prefactor(a: f64, x: f64) -> SfResult<f64> {
    Ok((-x + a * x.ln() - ln_gamma(a)?.value).exp())
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn reg_lower_gamma(a: f64, x: f64) -> SfResult<f64> {
    check_incomplete("reg_lower_gamma", a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let pre = prefactor(a, x)?;
    if x < a + 1.0 {
        lower_series(a, x, pre)
    } else {
        Ok(1.0 - upper_cf(a, x, pre)?)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 − P(a, x)`.
pub fn reg_upper_gamma(a: f64, x: f64) -> SfResult<f64> {
    check_incomplete("reg_upper_gamma", a, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let pre = prefactor(a, x)?;
    if x < a + 1.0 {
        Ok(1.0 - lower_series(a, x, pre)?)
    } else {
        upper_cf(a, x, pre)
    }
}

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x < 1.0 {
        reg_lower_gamma(0.5, x * x).unwrap_or(f64::NAN)
    } else {
        1.0 - erfc(x)
    }
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 1.0 {
        return 1.0 - erf(x);
    }
    if x > 27.3 {
        return 0.0;
    }
    reg_upper_gamma(0.5, x * x).unwrap_or(f64::NAN)
}

/// Standard normal quantile `Φ⁻¹(p)` for `p ∈ (0, 1)`.
pub fn normal_quantile(p: f64) -> SfResult<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("normal_quantile", format!("p = {p} not in (0, 1)")));
    }
    // Rational starting point, then Newton on Φ(x) = erfc(-x/√2)/2.
    let q = p.min(1.0 - p);
    let t = (-2.0 * q.ln()).sqrt();
    let mut x = t - (2.515517 + 0.802853 * t + 0.010328 * t * t)
        / (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
    x = -x;
    for _ in 0..6 {
        let cdf = 0.5 * erfc(-x / std::f64::consts::SQRT_2);
        let pdf = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let step = (cdf - q) / pdf;
        x -= step;
        if step.abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(if p < 0.5 { x } else { -x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_factorials() {
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert!((ln_gamma(10.0).unwrap().value - 362_880f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn half_integer() {
        let v = gamma(0.5).unwrap();
        assert!((v / PI.sqrt() - 1.0).abs() < 1e-14);
        let v = gamma(-0.5).unwrap();
        assert!((v + 2.0 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn poles() {
        assert!(matches!(ln_gamma(0.0), Err(SpecFunError::Pole { .. })));
        assert!(matches!(ln_gamma(-3.0), Err(SpecFunError::Pole { .. })));
    }

    #[test]
    fn incomplete_reference() {
        let p = reg_lower_gamma(2.5, 3.0).unwrap();
        assert!((p - 0.693_781_081_586_722).abs() < 1e-12);
        let q = reg_upper_gamma(2.5, 3.0).unwrap();
        assert!((p + q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn erf_values() {
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-15);
        assert!((erfc(3.0) - 2.209_049_699_858_544e-5).abs() < 1e-18);
        assert!((erf(-1.2) + erf(1.2)).abs() < 1e-16);
    }

    #[test]
    fn quantile_inverts() {
        for &p in &[1e-10, 0.001, 0.025, 0.3, 0.5, 0.9, 0.975] {
            let x = normal_quantile(p).unwrap();
            let back = 0.5 * erfc(-x / std::f64::consts::SQRT_2);
            assert!((back / p - 1.0).abs() < 1e-12, "p = {p}");
        }
        assert!((normal_quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
    }
}
