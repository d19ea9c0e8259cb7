//! Bessel functions J₀, J₁, I₀, K₀ and the zeros of J₀.

use super::{domain, SeriesSwitch, SfResult};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

const CHEB_DEGREE: usize = 14;

/// Piecewise Chebyshev interpolant of J₀ on unit intervals of `[0, 20)`,
/// tabulated once from the Miller recurrence.
fn j0_table() -> &'static Vec<[f64; CHEB_DEGREE + 1]> {
    static TABLE: OnceLock<Vec<[f64; CHEB_DEGREE + 1]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let pieces = SeriesSwitch::default().j_asymptotic as usize;
        let m = CHEB_DEGREE + 1;
        (0..pieces)
            .map(|p| {
                let nodes: Vec<f64> = (0..m)
                    .map(|k| (PI * (k as f64 + 0.5) / m as f64).cos())
                    .collect();
                let vals: Vec<f64> = nodes
                    .iter()
                    .map(|t| {
                        let x = p as f64 + 0.5 + 0.5 * t;
                        if x < 1e-8 {
                            1.0
                        } else {
                            miller(x).0
                        }
                    })
                    .collect();
                let mut c = [0.0; CHEB_DEGREE + 1];
                for (j, cj) in c.iter_mut().enumerate() {
                    let s: f64 = (0..m)
                        .map(|k| vals[k] * (PI * j as f64 * (k as f64 + 0.5) / m as f64).cos())
                        .sum();
                    *cj = 2.0 * s / m as f64;
                }
                c[0] *= 0.5;
                c
            })
            .collect()
    })
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &a in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + a;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

/// Miller backward recurrence, normalized by `J₀ + 2ΣJ₂ₖ = 1`.
fn miller(x: f64) -> (f64, f64) {
    let m = 2 * ((x + 40.0 + 10.0 * x.cbrt()) as usize / 2);
    let mut jp1 = 0.0;
    let mut j = 1e-30;
    let mut norm = 0.0;
    let mut j1 = 0.0;
    for k in (1..=m).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        let order = k - 1;
        if order == 1 {
            j1 = j;
        }
        if order > 0 && order % 2 == 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += j;
    (j / norm, j1 / norm)
}

/// Hankel asymptotic amplitudes `(P, Q)` for order `ν ∈ {0, 1}`.
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    let z8 = 8.0 * x;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * z8);
        if term.abs() > prev || term.abs() < 1e-17 {
            break;
        }
        prev = term.abs();
        // a_k sign pattern: P collects even k with (-1)^{k/2}, Q odd k.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    (p, q)
}

/// Fixed Hankel coefficients of `(P, Q)` for ν = 0 in powers of `1/x²`,
/// enough for full precision once `x ≥ 40`.
fn j0_hankel_coeffs() -> &'static ([f64; 7], [f64; 7]) {
    static C: OnceLock<([f64; 7], [f64; 7])> = OnceLock::new();
    C.get_or_init(|| {
        let mut p = [0.0; 7];
        let mut q = [0.0; 7];
        let mut a = 1.0;
        p[0] = 1.0;
        for k in 1..14 {
            let odd = (2 * k - 1) as f64;
            a *= -odd * odd / (k as f64 * 8.0);
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                p[k / 2] = sign * a;
            } else {
                q[k / 2] = sign * a;
            }
        }
        (p, q)
    })
}

fn asymptotic_j0(x: f64) -> f64 {
    let (p, q) = if x >= 40.0 {
        let (pc, qc) = j0_hankel_coeffs();
        let r = 1.0 / (x * x);
        let horner = |c: &[f64; 7]| c.iter().rev().fold(0.0, |acc, v| acc * r + v);
        (horner(pc), horner(qc) / x)
    } else {
        hankel_pq(0.0, x)
    };
    let (s, c) = x.sin_cos();
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

fn asymptotic_j1(x: f64) -> f64 {
    let (p, q) = hankel_pq(1.0, x);
    let (s, c) = x.sin_cos();
    let cos_chi = (s - c) * FRAC_1_SQRT_2;
    let sin_chi = -(s + c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    let table = j0_table();
    if x < table.len() as f64 {
        let i = x as usize;
        clenshaw(&table[i], 2.0 * (x - i as f64) - 1.0)
    } else {
        asymptotic_j0(x)
    }
}

pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 1e-8 {
        0.5 * ax
    } else if ax < SeriesSwitch::default().j_asymptotic {
        miller(ax).1
    } else {
        asymptotic_j1(ax)
    };
    if x < 0.0 { -v } else { v }
}

/// Both J₀ and J₁ at once (one recurrence pass below the asymptotic switch).
pub(crate) fn bessel_j01(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax < 1e-8 {
        return (1.0 - 0.25 * ax * ax, 0.5 * x);
    }
    if ax < SeriesSwitch::default().j_asymptotic {
        let (a, b) = miller(ax);
        (a, if x < 0.0 { -b } else { b })
    } else {
        (asymptotic_j0(ax), if x < 0.0 { -asymptotic_j1(ax) } else { asymptotic_j1(ax) })
    }
}

/// `k`-th positive zero of J₀ (`k ≥ 1`).
pub fn bessel_j0_zero(k: usize) -> SfResult<f64> {
    if k == 0 {
        return Err(domain("bessel_j0_zero", "zero index starts at 1"));
    }
    let beta = (k as f64 - 0.25) * PI;
    let b8 = 8.0 * beta;
    let mut j = beta + 1.0 / b8 - 124.0 / (3.0 * b8.powi(3));
    for _ in 0..8 {
        let (j0, j1) = bessel_j01(j);
        let step = j0 / j1;
        j += step;
        if step.abs() < 1e-15 * j {
            break;
        }
    }
    Ok(j)
}

pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SeriesSwitch::default().i0_asymptotic {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term < 1e-17 * sum {
                return sum;
            }
            k += 1.0;
        }
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (k as f64 * 8.0 * x);
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    // Split the exponential to delay overflow.
    let e = (0.5 * x).exp();
    e * (sum / (2.0 * PI * x).sqrt()) * e
}

/// Scaled `eˣK₀(x)` by the trapezoid rule on `∫₀^∞ exp(−2x·sinh²(t/2)) dt`.
fn k0_scaled(x: f64) -> f64 {
    let h = (0.5 / x.sqrt()).min(0.25);
    let mut sum = 0.5;
    let mut k = 1.0;
    loop {
        let s = (0.5 * k * h).sinh();
        let term = (-2.0 * x * s * s).exp();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        k += 1.0;
    }
    sum * h
}

pub fn bessel_k0(x: f64) -> SfResult<f64> {
    if !(x > 0.0) {
        return Err(domain("bessel_k0", format!("x = {x} must be positive")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(k0_scaled(x) * (-x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_reference() {
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 5e-15);
        assert!((bessel_j0(25.0) - 0.096_266_783_275_958_19).abs() < 1e-14);
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j1(-25.0) - 0.125_350_249_580_29).abs() < 1e-14);
    }

    #[test]
    fn regimes_agree_at_switch() {
        let x = SeriesSwitch::default().j_asymptotic;
        assert!((miller(x).0 - asymptotic_j0(x)).abs() < 1e-14);
        assert!((miller(x).1 - asymptotic_j1(x)).abs() < 1e-14);
    }

    #[test]
    fn fixed_hankel_matches_adaptive() {
        for &x in &[40.0, 55.5, 123.4, 1e4] {
            let (p, q) = hankel_pq(0.0, x);
            let (s, c) = f64::sin_cos(x);
            let slow = (2.0 / (PI * x)).sqrt() * (p * (c + s) - q * (s - c)) * FRAC_1_SQRT_2;
            assert!((asymptotic_j0(x) - slow).abs() < 1e-16, "x = {x}");
        }
    }

    #[test]
    fn table_matches_recurrence() {
        let mut worst = 0.0f64;
        for i in 1..4000 {
            let x = i as f64 * 0.01;
            worst = worst.max((bessel_j0(x) - miller(x).0).abs());
        }
        assert!(worst < 5e-15, "{worst}");
    }

    #[test]
    fn first_zeros() {
        assert!((bessel_j0_zero(1).unwrap() - 2.404_825_557_695_773).abs() < 1e-14);
        let z = bessel_j0_zero(10).unwrap();
        assert!((z - 30.634_606_468_431_975).abs() < 1e-12, "{z}");
        assert!(bessel_j0_zero(0).is_err());
    }

    #[test]
    fn k0_and_i0() {
        assert!((bessel_k0(1.0).unwrap() / 0.421_024_438_240_708_3 - 1.0).abs() < 1e-14);
        assert!((bessel_i0(1.0) / 1.266_065_877_752_008_4 - 1.0).abs() < 1e-15);
        assert!(bessel_k0(0.0).is_err());
    }
}
