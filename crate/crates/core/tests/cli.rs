use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bergmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergmap"))
        .args(args)
        .env("BERGMAP_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn spec(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn kernel_on_the_disc_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let d = spec(dir.path(), "disc.json", r#"{"type":"disc","radius":1.0}"#);
    let out = dir.path().join("k");
    let o = bergmap(&["kernel", "--domain", &d, "--degree", "40", "--ppm", "g", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let origin = rows(&out.join("kernel.csv")).into_iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    assert!((origin[2] - 0.3183099).abs() < 1e-6);
    assert!((origin[5] - 2.0).abs() < 1e-6);
    assert!((origin[6] + 2.0).abs() < 1e-6);
    let meta = json(&out.join("meta.json"));
    let hash = meta["config_hash"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert!(fs::read_to_string(out.join("kernel.csv")).unwrap().contains(&hash));
    let ppm = fs::read(out.join("kernel.ppm")).unwrap();
    assert!(ppm.starts_with(b"P5\n# config_hash="));
    assert!(meta["ppm"]["max"].as_f64().unwrap() > meta["ppm"]["min"].as_f64().unwrap());
}

#[test]
fn ball_kernel_is_analytic_only() {
    let dir = tempfile::tempdir().unwrap();
    let d = spec(dir.path(), "ball.json", r#"{"type":"ball","n":2}"#);
    let out = dir.path().join("b");
    let o = bergmap(&["kernel", "--domain", &d, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let meta = json(&out.join("meta.json"));
    assert_eq!(meta["mode"], "analytic");
    assert!((meta["k_origin"].as_f64().unwrap() - 0.2026424).abs() < 1e-7);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = spec(dir.path(), "bad.json", r#"{"type":"disc"}"#);
    let o = bergmap(&["kernel", "--domain", &bad, "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("radius"));
    let d = spec(dir.path(), "disc.json", r#"{"type":"disc","radius":1.0}"#);
    let o = bergmap(&["check", "--domain", &d, "--checks", "foo", "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = bergmap(&["kernel", "--domain", &d, "--anchor", "1;2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_closed_form_is_a_build_failure() {
    let dir = tempfile::tempdir().unwrap();
    let sq = spec(dir.path(), "sq.json", r#"{"type":"polygon","vertices":[[-1,-1],[1,-1],[1,1],[-1,1]]}"#);
    let o = bergmap(&["check", "--domain", &sq, "--source", "oracle", "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let d = spec(dir.path(), "disc.json", r#"{"type":"disc","radius":1.0}"#);
    let o = bergmap(&["map", "--domain", &d, "--anchor", "2,0", "--out", dir.path().join("y").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside"));
}

#[test]
fn disc_map_has_the_predicted_image_radius() {
    let dir = tempfile::tempdir().unwrap();
    let d = spec(dir.path(), "disc.json", r#"{"type":"disc","radius":1.0}"#);
    let out = dir.path().join("m");
    let o = bergmap(&["map", "--domain", &d, "--anchor", "0.5,0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let meta = json(&out.join("map_meta.json"));
    assert!((meta["image_radius"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    assert_eq!(meta["c_squared"], 1.0);
    assert_eq!(meta["constant_curvature"], true);
    assert!(meta["inverse"]["residual_max"].as_f64().unwrap() < 1e-8);
    assert_eq!(meta["inverse"]["failures"], 0);
}

#[test]
fn slit_disc_map_equals_disc_map() {
    let dir = tempfile::tempdir().unwrap();
    let d = spec(dir.path(), "disc.json", r#"{"type":"disc","radius":1.0}"#);
    let s = spec(dir.path(), "slit.json", r#"{"type":"slit_disc","slit_from":0.0,"slit_to":1.0}"#);
    let (od, os) = (dir.path().join("d"), dir.path().join("s"));
    for (spec, out) in [(&d, &od), (&s, &os)] {
        let o = bergmap(&["map", "--domain", spec, "--anchor", "-0.5,0", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let disc = rows(&od.join("map.csv"));
    let slit = rows(&os.join("map.csv"));
    assert!(slit.len() > 100);
    for r in &slit {
        let q = disc.iter().find(|x| x[0] == r[0] && x[1] == r[1]).expect("slit grid point lies in the disc grid");
        for k in 2..r.len() {
            let same = r[k] == q[k] || (r[k].is_nan() && q[k].is_nan()) || (r[k] - q[k]).abs() <= 1e-9 * (1.0 + q[k].abs());
            assert!(same, "column {k} at ({}, {}): {} vs {}", r[0], r[1], r[k], q[k]);
        }
    }
}

#[test]
fn annulus_map_carries_no_contract() {
    let dir = tempfile::tempdir().unwrap();
    let a = spec(dir.path(), "ann.json", r#"{"type":"annulus","r":0.5,"R":1.0}"#);
    let out = dir.path().join("a");
    let o = bergmap(&["map", "--domain", &a, "--anchor", "0.75,0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let meta = json(&out.join("map_meta.json"));
    assert_eq!(meta["constant_curvature"], false);
    assert!(meta["note"].as_str().unwrap().contains("no theorem contract"));
    // no Green's function column without constant curvature
    let text = fs::read_to_string(out.join("map.csv")).unwrap();
    assert!(text.lines().nth(2).unwrap().ends_with("NaN"));
}

#[test]
fn kerzman_condition_b_is_an_expected_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let k = spec(
        dir.path(),
        "k.json",
        r#"{"type":"sector_complement","r_max":1.0,"theta_min":1.5707963267948966,"theta_max":6.283185307179586}"#,
    );
    let out = dir.path().join("c");
    let o = bergmap(&["check", "--domain", &k, "--anchor", "-0.4,-0.4", "--checks", "condition_b", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out.join("condition_b.json"));
    assert_eq!(r["verdict"], "trend");
    assert_eq!(r["trend"], "divergent");
    assert_eq!(r["as_expected"], true);
    assert!(r["runtime_ms"].is_null());
    assert!(out.join("condition_b_ladder.csv").exists());
    let s = json(&out.join("summary.json"));
    assert_eq!(s["checks"].as_array().unwrap().len(), 1);
}

#[test]
fn ball_check_runs_the_applicable_checks() {
    let dir = tempfile::tempdir().unwrap();
    let b = spec(dir.path(), "ball.json", r#"{"type":"ball","n":3}"#);
    let out = dir.path().join("c");
    let o = bergmap(&["check", "--domain", &b, "--anchor", "0.1,0.2", "--timings", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = json(&out.join("summary.json"));
    let verdicts: Vec<String> = s["checks"].as_array().unwrap().iter().map(|c| c["verdict"].as_str().unwrap().to_string()).collect();
    assert_eq!(verdicts.iter().filter(|v| *v == "pass").count(), 4);
    assert_eq!(verdicts.iter().filter(|v| *v == "skipped").count(), 5);
    assert!(json(&out.join("curvature.json"))["runtime_ms"].as_f64().is_some());
}
