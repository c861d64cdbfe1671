use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn escrow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_escrow"))
        .args(args)
        .output()
        .expect("run escrow")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("escrow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn same_seed_same_bytes() {
    let args = ["escrow-sealing", "--samples", "6", "--seed", "11", "--p-grid", "0,0.25,1"];
    let a = escrow(&args);
    let b = escrow(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = escrow(&["escrow-sealing", "--samples", "6", "--seed", "12", "--p-grid", "0,0.25,1"]);
    assert_ne!(a.stdout, c.stdout);

    let json = ["escrow-binding", "--format", "json"];
    assert_eq!(escrow(&json).stdout, escrow(&json).stdout);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(escrow(&["escrow-binding", "--theta", "pi/2"]).status.code(), Some(2));
    assert_eq!(escrow(&["escrow-binding", "--alpha-grid", "1.0"]).status.code(), Some(2));
    assert_eq!(escrow(&["escrow-sealing", "--p-grid", ","]).status.code(), Some(2));
    assert_eq!(escrow(&["escrow-sealing", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(escrow(&["coinflip", "--bogus"]).status.code(), Some(2));

    let bad = tmp("bad.conf");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(
        escrow(&["escrow-binding", "--config", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let missing = tmp("missing.conf");
    assert_eq!(
        escrow(&["escrow-binding", "--config", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn binding_csv_schema() {
    let o = escrow(&["escrow-binding"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header[0], "alpha");
    assert_eq!(header.last().unwrap(), "pass");
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][1], "0");
    assert_eq!(rows[4][1], "0.353553390593");
    assert!(rows.iter().all(|r| r[10] == "true"));
}

#[test]
fn coinflip_rows_are_distributions() {
    let o = escrow(&["coinflip", "--samples", "50", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header.len(), 9);
    assert_eq!(rows[0][0], "honest");
    assert_eq!(&rows[0][2..5], ["0.5", "0.5", "0"]);
    let fm = rows.iter().find(|r| r[0] == "full-measurement-bob").unwrap();
    assert_eq!(fm[6], "0.853553390593");
    for r in &rows {
        let p: Vec<f64> = r[2..5].iter().map(|x| x.parse().unwrap()).collect();
        assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{r:?}");
        assert_eq!(r[8], "true");
    }
}

#[test]
fn json_mirrors_rows_and_echoes_config() {
    let conf = tmp("run.conf");
    std::fs::write(&conf, "# sweep\nalpha-grid = 0, pi/8\nseed = 5\n").unwrap();
    let out = tmp("binding.json");
    let o = escrow(&[
        "escrow-binding",
        "--config",
        conf.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["file"]["alpha-grid"], "0, pi/8");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys[0], "alpha");
    assert_eq!(keys.len(), 11);
    assert_eq!(v["summary"]["passed"], 2);
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn flags_override_config_file() {
    let conf = tmp("override.conf");
    std::fs::write(&conf, "alpha-grid = 0, pi/8, pi/4\n").unwrap();
    let o = escrow(&["escrow-binding", "--config", conf.to_str().unwrap(), "--alpha-grid", "pi/4"]);
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
}

#[test]
fn selftest_flags_only_the_stated_detection_cap() {
    let o = escrow(&["selftest", "--samples", "20000"]);
    assert_eq!(o.status.code(), Some(3));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["name", "observed", "bound", "pass"]);
    let failed: Vec<&str> = rows.iter().filter(|r| r[3] == "false").map(|r| r[0].as_str()).collect();
    assert_eq!(failed, ["quadratic-alice-detection-stated-cap"]);
    assert!(rows.len() > 10);
}

#[test]
fn injected_failure_fails_every_row() {
    let o = escrow(&["selftest", "--samples", "2000", "--inject-failure"]);
    assert_eq!(o.status.code(), Some(3));
    let (_, rows) = csv_rows(&stdout(&o));
    assert!(rows.iter().all(|r| r[3] == "false"));
}
