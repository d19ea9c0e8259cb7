//! Reader and error metrics for the special-function reference table.

use risop_core::specfun::{
    bessel_i0, bessel_j0, bessel_k0, hyp_1f2, kummer_1f1, ln_gamma, ln_pcf_d, reg_lower_gamma,
};
use std::collections::BTreeMap;

pub struct Row {
    pub name: String,
    pub args: Vec<f64>,
    pub value: f64,
}

pub fn rows() -> Vec<Row> {
    let text = include_str!("../fixtures/specfun_oracle.csv");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut parts = l.split(',');
            let name = parts.next().unwrap().to_string();
            let nums: Vec<f64> = parts.map(|p| p.trim().parse().unwrap()).collect();
            let (value, args) = nums.split_last().unwrap();
            Row {
                name,
                args: args.to_vec(),
                value: *value,
            }
        })
        .collect()
}

/// Error metric per function family and its tolerance.
pub fn evaluate(row: &Row) -> (f64, f64) {
    let a = &row.args;
    let rel = |v: f64| ((v - row.value) / row.value).abs();
    let floor1 = |v: f64| (v - row.value).abs() / row.value.abs().max(1.0);
    match row.name.as_str() {
        "ln_gamma" => (floor1(ln_gamma(a[0]).unwrap().value), 1e-12),
        "reg_lower_gamma" => (rel(reg_lower_gamma(a[0], a[1]).unwrap()), 1e-12),
        "bessel_j0" => (floor1(bessel_j0(a[0])), 1e-12),
        "bessel_i0" => (rel(bessel_i0(a[0])), 1e-12),
        "bessel_k0" => (rel(bessel_k0(a[0]).unwrap()), 1e-12),
        "kummer_1f1" => (rel(kummer_1f1(a[0], a[1], a[2]).unwrap()), 1e-8),
        "hyp_1f2" => (rel(hyp_1f2(a[0], a[1], a[2], a[3]).unwrap()), 1e-8),
        // |Δ ln D| is the relative error of D to first order.
        "ln_pcf_d" => ((ln_pcf_d(a[0], a[1]).unwrap() - row.value).abs(), 1e-8),
        other => panic!("unknown fixture function {other}"),
    }
}

/// Worst error per family: `(error, tolerance, arguments)`.
pub fn worst_errors() -> BTreeMap<String, (f64, f64, Vec<f64>)> {
    let mut worst: BTreeMap<String, (f64, f64, Vec<f64>)> = BTreeMap::new();
    for row in rows() {
        let (err, tol) = evaluate(&row);
        let entry = worst
            .entry(row.name.clone())
            .or_insert((0.0, tol, Vec::new()));
        if !(err <= entry.0) {
            *entry = (err, tol, row.args.clone());
        }
    }
    worst
}
