//! Special functions against a 50-digit reference table.

mod common;

use common::{rows, worst_errors};

#[test]
fn fixture_has_one_thousand_rows() {
    assert_eq!(rows().len(), 1000);
}

#[test]
fn all_kernels_within_tolerance() {
    let mut failed = Vec::new();
    for (name, (err, tol, args)) in &worst_errors() {
        println!("{name:16} max error {err:.3e} (tol {tol:.0e}) at {args:?}");
        if !(err <= tol) {
            failed.push(name.clone());
        }
    }
    assert!(failed.is_empty(), "kernels over tolerance: {failed:?}");
}
