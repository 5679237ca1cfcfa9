use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn berg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_berg")).args(args).env_remove("BERG_CACHE_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("berg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn ball_kernel_at_origin() {
    let v = json(&berg(&["ball-kernel", "--dim", "2", "--z", "0,0", "--w", "0.5,-0.1i"]));
    let expected = 2.0 / (std::f64::consts::PI * std::f64::consts::PI);
    assert!((v["re"].as_f64().unwrap() - expected).abs() < 1e-15);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn omega_series_agrees_with_closed_form() {
    let closed = json(&berg(&["omega-kernel", "--z", "0.3,-0.2i", "--lambda", "0.5", "--w", "0.1,0.2", "--tau", "0.4i"]));
    let series = json(&berg(&["omega-kernel", "--z", "0.3,-0.2i", "--lambda", "0.5", "--w", "0.1,0.2", "--tau", "0.4i", "--series"]));
    for part in ["re", "im"] {
        let (a, b) = (closed[part].as_f64().unwrap(), series[part].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-3), "{part}: {a} vs {b}");
    }
    assert_eq!(series["terms"], 300);
}

#[test]
fn moments_report_exact_and_infinite_values() {
    let v = json(&berg(&["moments", "--m", "2", "--alpha", "1,1", "--exact"]));
    assert_eq!(v["exact"], "(2/3)·π^3");
    let inf = json(&berg(&["moments", "--m", "1", "--alpha", "1,0"]));
    assert_eq!(inf["exact"], "inf");
    assert_eq!(inf["numeric"], "inf");
}

#[test]
fn cache_dir_serves_repeat_queries() {
    let dir = std::env::temp_dir().join(format!("berg-cli-cache-{}", std::process::id()));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_berg"))
            .args(["moments", "--m", "3", "--alpha", "2,0"])
            .env("BERG_CACHE_DIR", &dir)
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    assert_eq!(std::fs::read_dir(dir.join("moments")).unwrap().count(), 1);
    assert_eq!(run().stdout, first.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn group_and_basic_map_for_minus_identity() {
    let g = scratch("minus.json", r#"{"root_order": 2, "generators": [[["-1", "0"], ["0", "-1"]]]}"#);
    let v = json(&berg(&["group", "--gens", g.to_str().unwrap(), "--check", "fpf"]));
    assert_eq!(v["order"], 2);
    assert_eq!(v["fixed_point_free"], true);
    let m = json(&berg(&["basic-map", "--group", g.to_str().unwrap(), "--syzygies", "2"]));
    assert_eq!(m["degrees"], serde_json::json!([2, 2, 2]));
    assert_eq!(m["syzygies"].as_array().unwrap().len(), 1);
}

#[test]
fn reflection_group_reports_witness_and_reflections() {
    let g = scratch("refl.json", r#"{"root_order": 2, "generators": [[["-1", "0"], ["0", "1"]]]}"#);
    let v = json(&berg(&["group", "--gens", g.to_str().unwrap(), "--check", "fpf"]));
    assert_eq!(v["fixed_point_free"], false);
    let r = json(&berg(&["group", "--gens", g.to_str().unwrap(), "--check", "reflections"]));
    assert_eq!(r["reflections"].as_array().unwrap().len(), 1);
}

#[test]
fn quotient_sum_writes_csv() {
    let g = scratch("minus2.json", r#"{"root_order": 2, "generators": [[["-1", "0"], ["0", "-1"]]]}"#);
    let pairs = scratch("pairs.json", "[[[0.1, 0.2], [0.3, [0.0, 0.1]]], [[0.0, 0.0], [0.0, 0.0]]]");
    let o = berg(&["quotient-sum", "--group", g.to_str().unwrap(), "--dim", "2", "--pairs", pairs.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "z,w,re,im");
    // ⟨−I⟩ has det = 1, and the even part of the kernel at the origin is K(0, 0)
    let last: Vec<&str> = lines.last().unwrap().rsplitn(3, ',').collect();
    let k00 = 2.0 * 2.0 / (std::f64::consts::PI * std::f64::consts::PI);
    assert!((last[1].parse::<f64>().unwrap() - k00).abs() < 1e-14);
}

#[test]
fn fit_recovers_disk_relation() {
    let v = json(&berg(&["fit", "--kernel", "disk", "--dz", "4", "--dk", "1", "--boundary-check"]));
    assert!(v["residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["boundary_flagged"], false);
}

#[test]
fn verify_isometry_passes_with_exit_zero() {
    let o = berg(&["verify", "isometry"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l["passed"] == true && l["outcome"]["kind"] == "exact"));
}

#[test]
fn verify_transform_passes() {
    let o = berg(&["verify", "transform", "--pairs", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn verify_repro_replays_byte_identically() {
    let args = ["verify", "repro", "--N", "20000", "--seed", "3"];
    let a = berg(&args);
    let b = berg(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("runtime_ms"));
    let timed = berg(&["verify", "repro", "--N", "20000", "--seed", "3", "--timing"]);
    assert!(stdout(&timed).contains("runtime_ms"));
}

#[test]
fn failing_check_exits_one() {
    // a tolerance no floating residual can meet
    let o = berg(&["verify", "transform", "--pairs", "5", "--tol=-1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(berg(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(berg(&["verify", "repro", "--domain", "torus"]).status.code(), Some(2));
    assert_eq!(berg(&["ball-kernel", "--dim", "2", "--z", "x", "--w", "0,0"]).status.code(), Some(2));
    assert_eq!(berg(&["group", "--gens", "/nonexistent/file.json"]).status.code(), Some(2));
}
