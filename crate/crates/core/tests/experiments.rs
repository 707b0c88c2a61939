use lempert_lab::experiments::*;
use lempert_lab::C64;
use std::path::{Path, PathBuf};
use std::process::Command;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn shipped(name: &str) -> String {
    std::fs::read_to_string(configs().join(format!("{name}.json"))).unwrap()
}

/// `ε` with `ε (2 + ln(1/ε)) = δ`: the real preimage `u = 1 - ε` of
/// `w = 2 - δ` under `f(u) = 2u + (1 - u) log(1 - u)`.
fn preimage_gap(delta: f64) -> f64 {
    let mut e = delta / (2.0 + (1.0 / delta).ln());
    for _ in 0..50 {
        let g = e * (2.0 + (1.0 / e).ln()) - delta;
        let dg = 1.0 + (1.0 / e).ln();
        e -= g / dg;
    }
    e
}

fn example4_config(exponents: Vec<u32>, final_ratio_max: f64) -> Example4Config {
    serde_json::from_value(serde_json::json!({
        "exponents": exponents,
        "thresholds": {"final_ratio_max": final_ratio_max, "control_min": 0.9, "control_max": 1.1, "control_flatness": 1e-6}
    }))
    .unwrap()
}

#[test]
fn shipped_configs_parse() {
    for e in Experiment::ALL {
        let text = shipped(e.name());
        match e {
            Experiment::Example4 => serde_json::from_str::<Example4Config>(&text).unwrap().validate().unwrap(),
            Experiment::Theorem1 => serde_json::from_str::<Theorem1Config>(&text).unwrap().validate().unwrap(),
            Experiment::Proposition2 => serde_json::from_str::<Proposition2Config>(&text).unwrap().validate().unwrap(),
            Experiment::Estimates => serde_json::from_str::<EstimatesConfig>(&text).unwrap().validate().unwrap(),
        }
    }
}

#[test]
fn example4_gap_is_the_real_preimage_defect() {
    // on the real axis l(0, w) = |u| with w = f(u), so 1 - l = ε exactly
    let r = run_example4(&example4_config((1..=6).collect(), 0.05)).unwrap();
    let gaps = r.table.values("example4", "gap").unwrap();
    let ds = r.table.values("example4", "d").unwrap();
    let ratios = r.table.values("example4", "ratio").unwrap();
    assert_eq!(gaps.len(), 6);
    for (k, ((g, d), ratio)) in gaps.iter().zip(&ds).zip(&ratios).enumerate() {
        let delta = 10f64.powi(-(k as i32 + 1));
        let eps = preimage_gap(delta);
        assert!((g / eps - 1.0).abs() < 1e-6, "k = {}: {g} vs {eps}", k + 1);
        // d(w) ≤ |w - 2| = δ, hence ratio ≥ ε/δ = 1/(2 + ln(1/ε))
        assert!(*d <= delta * (1.0 + 1e-12));
        assert!(*ratio >= 1.0 / (2.0 + (1.0 / eps).ln()) * (1.0 - 1e-9));
    }
}

#[test]
fn reports_are_deterministic() {
    let text = r#"{
        "targets": [{"name": "e", "domain": {"kind": "ellipse", "a": 2.0, "b": 1.0}},
                    {"name": "b", "ball_dimension": 2}],
        "grid": 8,
        "rays": {"boundary_points": 4, "distances": [0.1, 0.01]},
        "separation": 0.5,
        "thresholds": {"koebe_min": 0.25, "koebe_max": 1.0, "koebe_tolerance": 1e-4,
                       "estimate2_min": 0.0, "refinement_tolerance": 0.5}
    }"#;
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        run(Experiment::Estimates, text).unwrap().write(d.path()).unwrap();
    }
    for f in ["report.csv", "report.json", "plots/estimate1.svg"] {
        let a = std::fs::read(dirs[0].path().join(f)).unwrap();
        let b = std::fs::read(dirs[1].path().join(f)).unwrap();
        assert!(a == b, "{f} differs between runs");
    }
}

#[test]
fn aggregates_are_exact_extremes_of_their_rows() {
    let r = run(Experiment::Theorem1, &shipped("theorem1").replace("\"pairs\": 50", "\"pairs\": 4")).unwrap();
    assert!(!r.aggregates.is_empty());
    for a in &r.aggregates {
        let k = r.table.index(&a.column).unwrap();
        let f = a.filter.as_ref().map(|f| (r.table.index(&f.column).unwrap(), f.min, f.max));
        let vals: Vec<f64> = r
            .table
            .section_rows(&a.section)
            .filter(|row| f.is_none_or(|(i, lo, hi)| row[i].num().is_some_and(|x| x >= lo && x <= hi)))
            .filter_map(|row| row[k].num())
            .collect();
        assert_eq!(vals.len(), a.rows, "{}", a.name);
        let want = match a.reduction {
            Reduction::Min => vals.iter().copied().fold(f64::INFINITY, f64::min),
            Reduction::Max => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        assert_eq!(a.value, want, "{}", a.name);
    }
}

#[test]
fn row_counts_match_the_schedule() {
    let text = r#"{
        "targets": [{"name": "d", "domain": {"kind": "unit_disc"}}, {"name": "b", "ball_dimension": 3}],
        "schedule": {"boundary_points": 5, "distances": [0.2, 0.02, 0.002]},
        "certificates": {"targets": [], "pairs": 0, "distances": []},
        "thresholds": {"min_constant": 0.0, "refinement_tolerance": 0.05, "collapse_ratio": 0.5,
                       "oracle_tolerance": 1e-6, "interpolation_tolerance": 1e-6, "min_certificates": 0}
    }"#;
    let r = run(Experiment::Theorem1, text).unwrap();
    let pairs = |n: usize| n * (n - 1) / 2;
    for t in ["d", "b"] {
        assert_eq!(r.table.count(&format!("{t}/oracle")), pairs(15));
        // refined: 10 boundary points, 5 distances
        assert_eq!(r.table.count(&format!("{t}/refined")), pairs(50));
    }
    assert!(r.failures.is_empty());
    let positive: Vec<_> = r.verdicts.iter().filter(|v| v.name.ends_with("_constant_positive")).collect();
    assert_eq!(positive.len(), 2);
    assert!(positive.iter().all(|v| v.pass), "{positive:?}");
}

#[test]
fn unknown_fields_and_missing_thresholds_are_rejected() {
    assert!(run(Experiment::Example4, r#"{"exponents": [1]}"#).is_err());
    assert!(run(
        Experiment::Example4,
        r#"{"exponents": [1], "thresholds": {"final_ratio_max": 0.05, "control_min": 0.9,
            "control_max": 1.1, "control_flatness": 1e-6}, "extra": 1}"#
    )
    .is_err());
    let bad = shipped("proposition2").replace("\"stabilization_tolerance\": 0.02", "\"stabilization_tolerance\": -1");
    assert!(run(Experiment::Proposition2, &bad).is_err());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lempert-lab"))
}

#[test]
fn cli_exit_code_follows_the_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, c: &Example4Config| {
        let p = dir.path().join(name);
        std::fs::write(&p, serde_json::to_string(c).unwrap()).unwrap();
        p
    };
    let easy = write("easy.json", &example4_config(vec![1, 2, 3], 0.1));
    let hard = write("hard.json", &example4_config(vec![1, 2, 3], 0.01));
    let out = dir.path().join("out");
    let status = cli()
        .args(["example4", "--config"])
        .arg(&easy)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(String::from_utf8_lossy(&status.stdout).contains("PASS example4_ratios_strictly_decreasing"));
    for f in ["report.csv", "report.json", "plots/ratios.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(json["verdicts"].as_array().unwrap().iter().all(|v| v["pass"] == true));

    let status = cli().args(["example4", "--config"]).arg(&hard).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(status.code(), Some(1));
    let status = cli()
        .args(["example4", "--config"])
        .arg(dir.path().join("missing.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn cli_certify_and_map_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let status = cli()
        .args(["certify", "--domain"])
        .arg(configs().join("domains/ellipse.json"))
        .args(["--z", "1.9,0", "--w", "-1.9,0", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let upper = json["certificate"]["upper_bound"].as_f64().unwrap();
    let oracle = json["oracle"].as_f64().unwrap();
    assert!(upper >= oracle - 1e-6 && upper < 1.0);

    let status = cli()
        .args(["certify", "--ball", "2", "--z", "0.9,0;0,0", "--w", "-0.5,0;0,0.5"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let json: serde_json::Value = serde_json::from_slice(&status.stdout).unwrap();
    assert!(json["certificate"]["kappa"].as_f64().unwrap() > 0.0);

    let csv = dir.path().join("map.csv");
    let status = cli()
        .args(["map-export", "--domain"])
        .arg(configs().join("domains/ellipse.json"))
        .args(["--points", "64", "--out"])
        .arg(&csv)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 65);

    let status = cli().args(["certify", "--z", "0,0", "--w", "0.5,0"]).output().unwrap().status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn example4_plot_has_both_series() {
    let r = run_example4(&example4_config(vec![1, 2], 0.5)).unwrap();
    let svg = &r.plots[0].1;
    assert!(svg.contains("logarithmic domain") && svg.contains("unit disc"));
    let _ = C64::new(0.0, 0.0);
}
