//! Parabolic-cylinder function `D_ν(z)` for `z ≥ 0` and `ν ≤ 1`.
//!
//! Three routes are combined:
//! * the two-term ₁F₁ representation, used while its cancellation stays small;
//! * for `ν ≤ −1`, the integral `e^{−z²/4}/Γ(−ν) ∫ t^{−ν−1} e^{−t²/2−zt} dt`
//!   evaluated in log space by the trapezoid rule after `t = eᵘ`;
//! * for `−1 < ν ≤ 1`, forward recurrence `D_{μ+1} = z D_μ − μ D_{μ−1}` from two
//!   integral-route orders.

use super::gamma::ln_gamma;
use super::hypergeometric::kummer_1f1_with;
use super::{domain, is_nonpositive_integer, precision, PrecisionPolicy, SfResult};
use std::f64::consts::{LN_2, PI};

fn rgamma(x: f64) -> SfResult<f64> {
    if is_nonpositive_integer(x) {
        return Ok(0.0);
    }
    let g = ln_gamma(x)?;
    Ok(g.sign * (-g.value).exp())
}

fn check(nu: f64, z: f64, policy: &PrecisionPolicy) -> SfResult<()> {
    if !(nu.is_finite() && z.is_finite()) {
        return Err(domain("pcf_d", "non-finite argument"));
    }
    if z < 0.0 {
        return Err(domain("pcf_d", format!("z = {z} must be non-negative")));
    }
    let sw = &policy.series_switch;
    if nu < sw.pcf_nu_min || nu > sw.pcf_nu_max {
        return Err(precision(
            "pcf_d",
            format!(
                "order {nu} outside validated range [{}, {}]",
                sw.pcf_nu_min, sw.pcf_nu_max
            ),
        ));
    }
    Ok(())
}

/// Two-term ₁F₁ form. Returns the value and the cancellation ratio.
fn series(nu: f64, z: f64, policy: &PrecisionPolicy) -> SfResult<(f64, f64)> {
    let y = 0.5 * z * z;
    let r1 = rgamma(0.5 * (1.0 - nu))?;
    let r2 = rgamma(-0.5 * nu)?;
    let t1 = if r1 == 0.0 {
        0.0
    } else {
        PI.sqrt() * r1 * kummer_1f1_with(-0.5 * nu, 0.5, y, policy)?
    };
    let t2 = if r2 == 0.0 {
        0.0
    } else {
        (2.0 * PI).sqrt() * z * r2 * kummer_1f1_with(0.5 * (1.0 - nu), 1.5, y, policy)?
    };
    let diff = t1 - t2;
    let cancellation = (t1.abs() + t2.abs()) / diff.abs();
    let scale = (0.5 * nu * LN_2 - 0.25 * z * z).exp();
    Ok((scale * diff, cancellation))
}

/// `D_ν(z)` from the two-term series alone; reports excessive cancellation.
pub fn pcf_d_series(nu: f64, z: f64) -> SfResult<f64> {
    let policy = PrecisionPolicy::default();
    check(nu, z, &policy)?;
    let (v, c) = series(nu, z, &policy)?;
    if !(c <= 1e-3 * policy.rel_tol / f64::EPSILON) {
        return Err(precision(
            "pcf_d_series",
            format!("cancellation ratio {c:e} at nu = {nu}, z = {z}"),
        ));
    }
    Ok(v)
}

/// `ln D_ν(z)` for `ν ≤ −1` via the log-space trapezoid rule.
fn ln_integral(nu: f64, z: f64) -> SfResult<f64> {
    let m1 = -nu;
    let g = |u: f64| {
        let e = u.exp();
        m1 * u - 0.5 * e * e - z * e
    };
    let ep = 2.0 * m1 / (z + (z * z + 4.0 * m1).sqrt());
    let up = ep.ln();
    let gp = g(up);
    let curv = 2.0 * ep * ep + z * ep;
    let h = (0.2 / curv.sqrt()).min(0.1);
    let mut sum = 1.0;
    for dir in [-1.0, 1.0] {
        let mut k = 1.0;
        loop {
            let d = g(up + dir * k * h) - gp;
            let t = d.exp();
            sum += t;
            if d < -50.0 {
                break;
            }
            k += 1.0;
            if k > 1e6 {
                return Err(precision("pcf_d", "quadrature range did not close"));
            }
        }
    }
    Ok(-0.25 * z * z - ln_gamma(m1)?.value + gp + (h * sum).ln())
}

fn ln_at_zero(nu: f64) -> SfResult<f64> {
    let a = 0.5 * (1.0 - nu);
    if is_nonpositive_integer(a) {
        return Ok(f64::NEG_INFINITY);
    }
    let g = ln_gamma(a)?;
    if g.sign < 0.0 {
        return Err(domain("pcf_d", "negative value at z = 0"));
    }
    Ok(0.5 * nu * LN_2 + 0.5 * PI.ln() - g.value)
}

/// `ln D_ν(z)`. `D_ν(z)` is positive on the supported domain except for the
/// zero of `D₁` at the origin, where `−∞` is returned.
pub fn ln_pcf_d(nu: f64, z: f64) -> SfResult<f64> {
    ln_pcf_d_with(nu, z, &PrecisionPolicy::default())
}

pub fn ln_pcf_d_with(nu: f64, z: f64, policy: &PrecisionPolicy) -> SfResult<f64> {
    policy.validate()?;
    check(nu, z, policy)?;
    if z == 0.0 {
        return ln_at_zero(nu);
    }
    let sw = &policy.series_switch;
    if 0.5 * z * z <= sw.pcf_series_max_arg {
        if let Ok((v, c)) = series(nu, z, policy) {
            if c <= sw.pcf_series_max_cancellation && v > 0.0 {
                return Ok(v.ln());
            }
        }
    }
    if nu <= -1.0 {
        return ln_integral(nu, z);
    }
    let n = (nu + 2.0).ceil();
    let base = nu - n;
    let l0 = ln_integral(base, z)?;
    let l1 = ln_integral(base + 1.0, z)?;
    let mut a = (l0 - l1).exp();
    let mut b = 1.0;
    let mut mu = base + 1.0;
    while mu < nu - 0.5 {
        let c = z * b - mu * a;
        a = b;
        b = c;
        mu += 1.0;
    }
    if !(b > 0.0) {
        return Err(precision("pcf_d", format!("recurrence lost sign at nu = {nu}, z = {z}")));
    }
    Ok(l1 + b.ln())
}

pub fn pcf_d(nu: f64, z: f64) -> SfResult<f64> {
    pcf_d_with(nu, z, &PrecisionPolicy::default())
}

pub fn pcf_d_with(nu: f64, z: f64, policy: &PrecisionPolicy) -> SfResult<f64> {
    Ok(ln_pcf_d_with(nu, z, policy)?.exp())
}
