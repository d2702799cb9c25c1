use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_causal");

fn repo_config(name: &str) -> String {
    format!("{}/../../configs/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("CAUSAL_THREADS", "2")
        .output()
        .unwrap()
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn profile_rows_match_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "profile",
        "--tau",
        "2",
        "--samples",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines = data_lines(&dir.path().join("profile.csv"));
    assert_eq!(lines[0], "angle_deg,angle_rad,script_d,lagrangian");
    let rows: Vec<Vec<f64>> = lines[1..]
        .iter()
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], vec![0.0, 0.0, 32.0, 32.0]);
    assert!((rows[2][0] - 90.0).abs() < 1e-12);
    assert!((rows[2][2] + 16.0).abs() < 1e-12);
    assert_eq!(rows[2][3], 0.0);
}

#[test]
fn octahedron_pairs_are_all_spacelike() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "classify",
        "--config",
        &repo_config("classify"),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let lines = data_lines(&dir.path().join("relations.csv"));
    assert_eq!(lines.len(), 1 + 30);
    assert!(lines[1..]
        .iter()
        .all(|l| l.split(',').nth(3) == Some("spacelike")));
}

#[test]
fn every_output_carries_a_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "el-check",
        "--config",
        &repo_config("el-check"),
        "--seed",
        "17",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("support.csv")).unwrap();
    assert!(csv.starts_with(&format!(
        "# tool: causal {}\n# command: el-check\n# config_sha256: ",
        env!("CARGO_PKG_VERSION")
    )));
    assert!(csv.contains("\n# seed: 17\n"));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("el_report.json")).unwrap()).unwrap();
    assert_eq!(json["header"]["seed"], 17);
    assert_eq!(json["header"]["config_sha256"].as_str().unwrap().len(), 64);
    let nu = json["data"]["nu"].as_f64().unwrap();
    assert!((nu - 16.0 / 3.0).abs() < 1e-12);
}

#[test]
fn json_format_switches_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "profile",
        "--tau",
        "1.5",
        "--samples",
        "3",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("profile.json")).unwrap()).unwrap();
    assert_eq!(v["data"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_configs_exit_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("malformed", "{\"tau\": 2.0,"),
        ("unknown_field", "{\"tau\": 2.0, \"system\": \"octahedron\", \"colour\": 3}"),
        ("bad_tau", "{\"tau\": 0.5, \"system\": \"octahedron\"}"),
        ("bad_weights", "{\"tau\": 2.0, \"system\": {\"explicit\": {\"points\": [[0,0,1]], \"weights\": [0.3]}}}"),
    ];
    for (name, body) in cases {
        let cfg = dir.path().join(format!("{name}.json"));
        std::fs::write(&cfg, body).unwrap();
        let out_dir = dir.path().join(format!("{name}_out"));
        let out = run(&[
            "classify",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out_dir.exists(), "{name} left outputs behind");
    }
    let missing = run(&["sphere-minimize"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("usage"));
}

#[test]
fn boundary_contact_exits_3_but_writes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("oct.json");
    std::fs::write(
        &cfg,
        "{\"tau\": 1.4142135623730951, \"system\": \"octahedron\"}",
    )
    .unwrap();
    let out = run(&[
        "laplacian",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("o/laplacian.bin").exists());
}

#[test]
fn thread_count_must_be_positive() {
    let out = Command::new(BIN)
        .args(["profile", "--tau", "2"])
        .env("CAUSAL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
