use std::path::Path;
use std::process::{Command, Output};

fn risop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_risop"))
        .args(args)
        .env_remove("RISOP_WORKERS")
        .output()
        .expect("spawn risop")
}

fn ok(args: &[&str]) -> String {
    let out = risop(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn diagnostic(out: &Output) -> String {
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    let line = err.lines().last().unwrap_or("").to_string();
    assert!(line.starts_with("error kind="), "not a diagnostic: {err}");
    line
}

fn evaluate_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&ok(&["--json", "evaluate", path.to_str().unwrap()])).unwrap()
}

#[test]
fn single_step_sweep_is_a_usage_error() {
    let out = risop(&["sweep", "--axis", "snr_db", "--start", "0", "--stop", "10", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let d = diagnostic(&out);
    assert!(d.starts_with("error kind=usage code=2 message=\""), "{d}");
}

#[test]
fn bad_flags_and_parameters_exit_2() {
    for args in [
        vec!["outage", "--n", "0"],
        vec!["outage", "--sigma-sr", "-1"],
        vec!["outage", "--methods", "nonsense"],
        vec!["no-such-command"],
        vec!["reproduce", "fig9"],
    ] {
        let out = risop(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(diagnostic(&out).lines().count(), 1);
    }
}

#[test]
fn missing_files_exit_4() {
    let out = risop(&["evaluate", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(diagnostic(&out).starts_with("error kind=io code=4"));
}

#[test]
fn outage_exact_agrees_with_monte_carlo() {
    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "--json", "outage", "--n", "4", "--snr-db", "10", "--methods", "exact,mc", "--mc-samples", "200000",
    ]))
    .unwrap();
    let exact = v[0]["value"].as_f64().unwrap();
    let mc = v[1]["value"].as_f64().unwrap();
    assert!(exact > 1e-3 && exact < 1e-1, "{exact}");
    assert!((mc - exact).abs() < 0.1 * exact, "{mc} vs {exact}");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 4\nsnr_db = 10.0\nmethods = [\"exact\"]\n").unwrap();
    let from_file = ok(&["--json", "--config", cfg.to_str().unwrap(), "outage"]);
    let overridden = ok(&["--json", "--config", cfg.to_str().unwrap(), "outage", "--snr-db", "20"]);
    let direct = ok(&["--json", "outage", "--n", "4", "--snr-db", "20", "--methods", "exact"]);
    assert_ne!(from_file, overridden);
    assert_eq!(overridden, direct);

    std::fs::write(&cfg, "n = 4\nsnr = 10.0\n").unwrap();
    let out = risop(&["--config", cfg.to_str().unwrap(), "outage"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeded_output_is_reproducible_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = ["sweep", "--n", "4", "--axis", "snr_db", "--start", "0", "--stop", "10", "--steps", "3"];
    let mc = ["--methods", "mc", "--mc-samples", "70000"];
    let run = |path: &Path, workers: &str| {
        let mut args: Vec<&str> = vec!["--seed", "7", "--workers", workers];
        args.extend(base);
        args.extend(mc);
        args.extend(["-o", path.to_str().unwrap()]);
        ok(&args);
    };
    run(&a, "1");
    run(&b, "3");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn every_emitted_schema_round_trips_through_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

    ok(&["pdf-x", "--n", "4", "--mc-samples", "20000", "-o", &p("x.csv")]);
    let s = evaluate_json(Path::new(&p("x.csv")));
    assert_eq!(s["schema"], "pdf");
    for m in ["cf_fft", "gamma_fit", "mc"] {
        let mass = s["groups"][m]["integral"].as_f64().unwrap();
        assert!((mass - 1.0).abs() < 0.02, "{m}: {mass}");
    }

    ok(&["pdf-y", "--n", "4", "--methods", "exact,gamma_fit", "-o", &p("y.csv")]);
    let s = evaluate_json(Path::new(&p("y.csv")));
    assert_eq!(s["schema"], "pdf");
    assert_eq!(s["groups"].as_object().unwrap().len(), 2);

    ok(&["sweep", "--n", "4", "--axis", "inr_db", "--start", "-5", "--stop", "5", "--steps", "3", "-o", &p("s.csv")]);
    let s = evaluate_json(Path::new(&p("s.csv")));
    assert_eq!(s["schema"], "sweep");
    assert_eq!(s["rows"], 9);

    ok(&["outage", "--n", "4", "--methods", "exact,gamma-closed", "-o", &p("o.csv")]);
    assert_eq!(evaluate_json(Path::new(&p("o.csv")))["schema"], "outage");

    ok(&["dataset", "--records", "120", "--range-n", "2:8", "-o", &p("d.csv")]);
    let s = evaluate_json(Path::new(&p("d.csv")));
    assert_eq!(s["schema"], "dataset");
    assert_eq!(s["rows"], 120);

    ok(&[
        "train", "--data", &p("d.csv"), "--max-epochs", "8", "-o", &p("m.json"), "--curve", &p("c.csv"),
    ]);
    let s = evaluate_json(Path::new(&p("c.csv")));
    assert_eq!(s["schema"], "curve");
    let scored: serde_json::Value = serde_json::from_str(&ok(&[
        "--json", "evaluate", &p("d.csv"), "--model", &p("m.json"),
    ]))
    .unwrap();
    assert!(scored["groups"]["surrogate"]["mse"].as_f64().unwrap().is_finite());

    ok(&["predict", "--model", &p("m.json"), "--data", &p("d.csv"), "-o", &p("pred.csv")]);
    assert_eq!(evaluate_json(Path::new(&p("pred.csv")))["schema"], "dataset");
    let single: serde_json::Value =
        serde_json::from_str(&ok(&["--json", "predict", "--model", &p("m.json"), "--n", "4"])).unwrap();
    let v = single["value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&v));

    let out = dir.path().join("rep");
    ok(&[
        "reproduce", "fig7", "--data", &p("d.csv"), "--model", &p("m.json"), "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(evaluate_json(&out.join("fig7_regression.csv"))["schema"], "regression");
    let t = evaluate_json(&out.join("fig7_timing.csv"));
    assert_eq!(t["schema"], "timing");
    assert_eq!(t["groups"]["exact_numeric"]["mse"].as_f64(), Some(0.0));
}

#[test]
fn reproduce_fig5_reports_the_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(&ok(&[
        "--json", "reproduce", "fig5", "--out-dir", out, "--mc-samples", "100",
    ]))
    .unwrap();
    let files = v["files"].as_array().unwrap();
    assert_eq!(files.len(), 6);
    let crossing = v["summary"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e[0].as_str().unwrap().starts_with("N=4 INR=0"))
        .map(|e| e[1].as_f64().unwrap())
        .expect("N=4 crossing");
    assert!((crossing - 20.0).abs() < 2.5, "{crossing}");
    assert_eq!(evaluate_json(&dir.path().join("fig5_n4_inr0.csv"))["schema"], "sweep");
}

#[test]
fn print_config_matches_shipped_file() {
    let text = ok(&["reproduce", "fig6", "--print-config"]);
    let shipped = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/fig6.toml")).unwrap();
    assert_eq!(text, shipped);
}
