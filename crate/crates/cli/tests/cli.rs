use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lnelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lnelab"))
        .args(args)
        .env_remove("LNELAB_SEED_OVERRIDE")
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(config: &Path, out: &Path) -> Output {
    lnelab(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn empty_config_writes_only_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&config("empty.json"), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["manifest.json"]);
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["passed"], true);
    assert_eq!(m["experiments"].as_array().unwrap().len(), 0);
}

#[test]
fn validate_names_the_offending_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        r#"{"shape": {"kind": "circle", "params": {"radius": 1.0}}, "sample_count": 100, "seed": 0,
            "experiments": [{"type": "scan-medial", "name": "s", "lo": [0.0, 0.0], "hi": [1.0], "resolution": 11}]}"#,
    );
    let o = lnelab(&["validate", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("experiments[0]"), "{err}");
}

#[test]
fn validate_accepts_every_example() {
    for entry in std::fs::read_dir(config("")).unwrap() {
        let p = entry.unwrap().path();
        let o = lnelab(&["validate", "--config", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", p.display(), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert!(run(&config("two_points.json"), out).status.success());
    }
    let mut files: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert!(files.len() > 3);
    for f in files.iter().filter(|f| *f != "manifest.json") {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f:?}");
    }
}

#[test]
fn cusp_tip_theorem_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        r#"{"shape": {"kind": "cusp", "params": {"t_max": 0.25}}, "sample_count": 20001, "seed": 1,
            "experiments": [{"type": "verify-theorem", "name": "tip", "point": [0.0, 0.0],
                             "radii": [0.2, 0.1, 0.05, 0.025, 0.0125], "expect_verdict": "diverging"}]}"#,
    );
    let out = dir.path().join("out");
    let o = run(&p, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("tip.report.json")).unwrap()).unwrap();
    let consistent = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "consistent").unwrap();
    assert_eq!(consistent["passed"], true);
}

#[test]
fn failed_expectation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        r#"{"shape": {"kind": "circle", "params": {"radius": 1.0}}, "sample_count": 4000, "seed": 1,
            "experiments": [{"type": "verify-theorem", "name": "wrong", "point": [1.0, 0.0],
                             "radii": [0.5, 0.25], "expect_medial_approach": true}]}"#,
    );
    let o = run(&p, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn circle_scan_plot_marks_the_centre() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert!(run(&config("circle.json"), &out).status.success());
    let svg = std::fs::read_to_string(out.join("centre-scan.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("<circle"));
    let csv = std::fs::read_to_string(out.join("centre-scan.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}
