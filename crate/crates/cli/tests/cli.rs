use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn trapchain(args: &[&str], out: &Path) -> (i32, Value) {
    let status = Command::new(env!("CARGO_BIN_EXE_trapchain"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    let report = fs::read_to_string(out.join("report.json")).unwrap();
    (status.status.code().unwrap(), serde_json::from_str(&report).unwrap())
}

#[test]
fn staged_commands_match_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let steps: &[&[&str]] = &[
        &["scaffold", "gen"],
        &["scaffold", "validate"],
        &["target", "build"],
        &["approx", "synth"],
        &["verify", "run"],
        &["dynamics", "graph"],
        &["dynamics", "orbit", "--re", "40", "--steps", "3"],
        &["render", "scaffold", "--width", "300"],
        &["render", "bands", "--width", "300"],
    ];
    for args in steps {
        let (code, report) = trapchain(args, out);
        assert_eq!(code, 0, "{args:?}: {report}");
        assert_eq!(report["exit_code"], 0);
    }
    for f in [
        "scaffold.json",
        "validation.json",
        "target.json",
        "f1.json",
        "f2.json",
        "certificates.json",
        "graph.json",
        "graph.txt",
        "orbit.json",
        "scaffold.ppm",
        "bands.ppm",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let graph = fs::read_to_string(out.join("graph.txt")).unwrap();
    assert!(graph.contains("B'1 -> B'2\nB'2 -> B'3\n"), "{graph}");
    let ppm = fs::read(out.join("bands.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n300 "));

    let staged: Value = serde_json::from_str(&fs::read_to_string(out.join("certificates.json")).unwrap()).unwrap();
    let full = tempfile::tempdir().unwrap();
    let (code, _) = trapchain(&["pipeline", "--width", "300"], full.path());
    assert_eq!(code, 0);
    let piped: Value = serde_json::from_str(&fs::read_to_string(full.path().join("certificates.json")).unwrap()).unwrap();
    assert_eq!(staged, piped);
}

#[test]
fn verify_without_synthesis_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(trapchain(&["scaffold", "gen"], dir.path()).0, 0);
    let (code, report) = trapchain(&["verify", "run"], dir.path());
    assert_eq!(code, 3);
    assert!(report["error"].as_str().unwrap().contains("missing approximant file"), "{report}");
}

#[test]
fn corrupted_scaffold_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(trapchain(&["scaffold", "gen"], dir.path()).0, 0);
    let path = dir.path().join("scaffold.json");
    let mut cfg: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let d = cfg["deltas"][0].as_f64().unwrap();
    let l = cfg["ells"][0].as_f64().unwrap();
    cfg["ms"][0] = (d + 0.5 * l).into();
    fs::write(&path, cfg.to_string()).unwrap();
    let (code, report) = trapchain(&["scaffold", "validate"], dir.path());
    assert_eq!(code, 1);
    assert!(report["error"].as_str().unwrap().contains("m_interleave"), "{report}");
    let (code, _) = trapchain(&["pipeline", "--scaffold", path.to_str().unwrap()], dir.path());
    assert_eq!(code, 1);
}

#[test]
fn bad_parameters_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (code, report) = trapchain(&["scaffold", "gen", "--delta", "1.5"], dir.path());
    assert_eq!(code, 3);
    assert!(report["error"].is_string());
}
