//! Confluent ₁F₁ and ₁F₂ by term recurrence in double-double arithmetic.

use super::dd::Dd;
use super::{domain, is_nonpositive_integer, precision, PrecisionPolicy, SfResult};

/// Sums `Σ tₖ` where `tₖ₊₁ = tₖ · ratio(k)`, tracking the largest term to
/// estimate the cancellation error.
fn sum_series(
    function: &'static str,
    policy: &PrecisionPolicy,
    terminates_at: Option<usize>,
    ratio: impl Fn(f64) -> Dd,
) -> SfResult<f64> {
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut max_term = 1.0f64;
    for k in 0..policy.max_terms {
        if terminates_at == Some(k) {
            return finish(function, policy, sum, max_term, k);
        }
        term = term * ratio(k as f64);
        sum = sum + term;
        let t = term.hi.abs();
        max_term = max_term.max(t);
        if !sum.hi.is_finite() {
            return Err(precision(function, "overflow"));
        }
        if t <= 1e-18 * sum.hi.abs() && k > 2 {
            // Tail is geometric once terms decrease; check the ratio too.
            let next = ratio(k as f64 + 1.0).hi.abs();
            if next < 0.5 {
                return finish(function, policy, sum, max_term, k);
            }
        }
        if t == 0.0 {
            return finish(function, policy, sum, max_term, k);
        }
    }
    Err(precision(
        function,
        format!("no convergence within {} terms", policy.max_terms),
    ))
}

fn finish(
    function: &'static str,
    policy: &PrecisionPolicy,
    sum: Dd,
    max_term: f64,
    k: usize,
) -> SfResult<f64> {
    let value = sum.to_f64();
    let err = 1e-30 * (k as f64 + 1.0) * max_term + f64::EPSILON * value.abs();
    if value == 0.0 || err > policy.rel_tol * 1e-3 * value.abs() {
        if value == 0.0 && max_term == 0.0 {
            return Ok(0.0);
        }
        return Err(precision(
            function,
            format!("cancellation: largest term {max_term:e}, sum {value:e}"),
        ));
    }
    Ok(value)
}

fn nonpositive_int_index(a: f64) -> Option<usize> {
    if is_nonpositive_integer(a) {
        Some((-a) as usize)
    } else {
        None
    }
}

/// Kummer's function `M(a; b; x) = ₁F₁(a; b; x)`.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> SfResult<f64> {
    kummer_1f1_with(a, b, x, &PrecisionPolicy::default())
}

pub fn kummer_1f1_with(a: f64, b: f64, x: f64, policy: &PrecisionPolicy) -> SfResult<f64> {
    if !(a.is_finite() && b.is_finite() && x.is_finite()) {
        return Err(domain("kummer_1f1", "non-finite argument"));
    }
    if is_nonpositive_integer(b) {
        return Err(domain("kummer_1f1", format!("b = {b} is a non-positive integer")));
    }
    let a_term = nonpositive_int_index(a);
    if x < 0.0 && a_term.is_none() {
        // Kummer transformation turns the alternating series into a positive one.
        let (ap, xp) = (b - a, -x);
        let ap_term = nonpositive_int_index(ap);
        let m = sum_series("kummer_1f1", policy, ap_term, |k| {
            Dd::sum(ap, k) * Dd::new(xp) / (Dd::sum(b, k) * Dd::new(k + 1.0))
        })?;
        return Ok(x.exp() * m);
    }
    sum_series("kummer_1f1", policy, a_term, |k| {
        Dd::sum(a, k) * Dd::new(x) / (Dd::sum(b, k) * Dd::new(k + 1.0))
    })
}

/// `₁F₂(a; b₁, b₂; x)`.
pub fn hyp_1f2(a: f64, b1: f64, b2: f64, x: f64) -> SfResult<f64> {
    hyp_1f2_with(a, b1, b2, x, &PrecisionPolicy::default())
}

pub fn hyp_1f2_with(a: f64, b1: f64, b2: f64, x: f64, policy: &PrecisionPolicy) -> SfResult<f64> {
    if !(a.is_finite() && b1.is_finite() && b2.is_finite() && x.is_finite()) {
        return Err(domain("hyp_1f2", "non-finite argument"));
    }
    if is_nonpositive_integer(b1) || is_nonpositive_integer(b2) {
        return Err(domain("hyp_1f2", "lower parameter is a non-positive integer"));
    }
    sum_series("hyp_1f2", policy, nonpositive_int_index(a), |k| {
        Dd::sum(a, k) * Dd::new(x) / (Dd::sum(b1, k) * Dd::sum(b2, k) * Dd::new(k + 1.0))
    })
}
