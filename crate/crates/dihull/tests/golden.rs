use std::path::Path;

use dihull::{load_config, run_in};
use serde_json::json;

fn golden_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/golden"))
}

/// Reruns a shipped config and compares against the shipped report byte for byte.
fn rerun(name: &str) -> dihull::ExperimentReport {
    let dir = golden_dir();
    let cfg = load_config(&dir.join(format!("{name}.config.json"))).unwrap();
    let report = run_in(&cfg, dir).unwrap();
    let shipped = std::fs::read_to_string(dir.join(format!("{name}.report.json"))).unwrap();
    assert_eq!(report.to_json(), shipped, "golden drift in {name}");
    report
}

#[test]
fn rstandard_suite() {
    let r = rerun("rstandard");
    assert!(r.passed());
    assert_eq!(r.values["q_hull"][0][2], json!("2"));
    assert_eq!(r.values["centers"], json!([1]));
    assert_eq!(r.values["radius"], json!("1"));
    assert_eq!(r.values["diameter"], json!("2"));
    assert_eq!(r.values["descent_length"], json!(2));
    assert_eq!(r.values["segment_alpha"], json!("2"));
    assert_eq!(r.values["segment_beta"], json!("0"));
}

#[test]
fn swap_is_not_nonexpansive() {
    let r = rerun("swap");
    let m = &r.values["maps"][0];
    assert_eq!(m["nonexpansive"], json!(false));
    assert_eq!(m["witness"], json!([1, 0]));
    assert_eq!(m["fixed_points"], json!([1]));
}

#[test]
fn counterexample_search_exhausts() {
    let r = rerun("counterexample");
    assert!(!r.passed());
    assert_eq!(r.values["instance"], json!(null));
    assert_eq!(r.values["spaces_enumerated"], r.values["spaces_with_blocked_cell"]);
}
