//! Quadrature rules: fixed Gauss–Legendre, adaptive Gauss–Kronrod (7/15) and
//! Wynn's epsilon accelerator for oscillatory tails.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: `(estimate, |K15 − G7|)`.
pub fn gk15(a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Composite Kronrod rule on `panels` equal panels of `[a, b]`:
/// `(nodes, kronrod_weights, gauss_weights)`, Gauss weights zero off the G7 nodes.
pub fn gk15_composite(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let h = 0.5 * (b - a) / panels as f64;
    let cap = 15 * panels;
    let (mut x, mut wk, mut wg) = (Vec::with_capacity(cap), Vec::with_capacity(cap), Vec::with_capacity(cap));
    for p in 0..panels {
        let c = a + (2 * p + 1) as f64 * h;
        for j in 0..15 {
            let (i, s) = if j < 8 { (j, -1.0) } else { (14 - j, 1.0) };
            x.push(c + s * h * XGK[i]);
            wk.push(h * WGK[i]);
            wg.push(if i % 2 == 1 { h * WG[i / 2] } else { 0.0 });
        }
    }
    (x, wk, wg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive GK15 on `[a, b]`. Stops when the error estimate is
/// below `max(abs_tol, rel_tol·|I|)`; `Err` carries the best estimate when the
/// panel budget is exhausted.
pub fn adaptive(
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
    mut f: impl FnMut(f64) -> f64,
) -> Result<QuadResult, QuadResult> {
    adaptive_from(&[a, b], abs_tol, rel_tol, max_panels, &mut f)
}

/// As [`adaptive`], starting from the given breakpoints.
pub fn adaptive_from(
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
    f: &mut impl FnMut(f64) -> f64,
) -> Result<QuadResult, QuadResult> {
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = gk15(w[0], w[1], f);
        value += v;
        error += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    loop {
        let tol = abs_tol.max(rel_tol * value.abs());
        let res = QuadResult {
            value,
            error,
            intervals: heap.len(),
        };
        if error <= tol || !error.is_finite() {
            return if error.is_finite() { Ok(res) } else { Err(res) };
        }
        if heap.len() >= max_panels {
            return Err(res);
        }
        let p = heap.pop().expect("non-empty heap");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            return Err(res);
        }
        let (v1, e1) = gk15(p.a, m, f);
        let (v2, e2) = gk15(m, p.b, f);
        value += v1 + v2 - p.value;
        error += e1 + e2 - p.error;
        heap.push(Panel {
            a: p.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: m,
            b: p.b,
            value: v2,
            error: e2,
        });
    }
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums; returns the
/// accelerated limit and a crude error estimate.
pub fn wynn_epsilon(partial: &[f64]) -> (f64, f64) {
    let n = partial.len();
    if n < 3 {
        let last = partial.last().copied().unwrap_or(0.0);
        return (last, f64::INFINITY);
    }
    // e[k] holds column eps_{k}; keep two previous columns.
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial.to_vec();
    let mut best = *partial.last().unwrap();
    let mut best_err = (partial[n - 1] - partial[n - 2]).abs();
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            let v = if d == 0.0 {
                f64::INFINITY
            } else {
                prev[i + 1] + 1.0 / d
            };
            next.push(v);
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 && cur.len() >= 2 {
            let l = cur.len();
            let (a, b) = (cur[l - 1], cur[l - 2]);
            if a.is_finite() && b.is_finite() {
                let e = (a - b).abs();
                if e < best_err {
                    best = a;
                    best_err = e;
                }
            }
        }
    }
    (best, best_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        // exact up to degree 15
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-10);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_exact_degree_22() {
        let (v, _) = gk15(-1.0, 1.0, &mut |x: f64| x.powi(22));
        assert!((v - 2.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let r = adaptive(0.0, 1.0, 1e-14, 1e-12, 500, |x| 1.0 / (1e-4 + (x - 0.3).powi(2))).unwrap();
        let exact = 100.0 * ((70.0f64).atan() + (30.0f64).atan());
        assert!((r.value / exact - 1.0).abs() < 1e-11);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let partial: Vec<f64> = (1..=14)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let (v, _) = wynn_epsilon(&partial);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-10);
    }
}
