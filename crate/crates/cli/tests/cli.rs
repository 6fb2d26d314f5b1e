use std::path::Path;
use std::process::{Command, Output};

fn mtstreams(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtstreams"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    let out = mtstreams(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let out = mtstreams(&["test", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1e-10") && text.contains("mini-crush-v1"));
    assert_eq!(mtstreams(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(mtstreams(&[]).status.code(), Some(1));
    assert_eq!(mtstreams(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        mtstreams(&[
            "gen",
            "--technique",
            "sideways",
            "--count",
            "1",
            "--out",
            "x"
        ])
        .status
        .code(),
        Some(1)
    );
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let r = mtstreams(&[
        "gen",
        "--technique",
        "split",
        "--count",
        "2",
        "--spacing",
        "0",
        "--out",
        p(&out),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("spacing"));
    let r = mtstreams(&[
        "gen",
        "--technique",
        "split",
        "--count",
        "2",
        "--spacing",
        "0",
        "--allow-degenerate",
        "--out",
        p(&out),
    ]);
    assert_eq!(r.status.code(), Some(0));
}

#[test]
fn gen_prints_manifest_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("idx");
    let r = mtstreams(&[
        "gen",
        "--technique",
        "indexed",
        "--count",
        "3",
        "--out",
        p(&out),
    ]);
    assert_eq!(r.status.code(), Some(0));
    let fp = String::from_utf8(r.stdout).unwrap();
    let manifest = std::fs::read(out.join("MANIFEST")).unwrap();
    assert_eq!(fp.trim(), mt_streams::partition::sha256_hex(&manifest));
    for i in 0..3 {
        assert!(out.join(format!("indexed_{i:05}.mts")).is_file());
    }
}

#[test]
fn io_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.jsonl");
    assert_eq!(
        mtstreams(&["report", "--results", p(&missing)])
            .status
            .code(),
        Some(2)
    );
    let bad = dir.path().join("bad.mts");
    std::fs::write(&bad, "not a status\n").unwrap();
    let out = dir.path().join("r.jsonl");
    let r = mtstreams(&["test", "--status", p(&bad), "--out", p(&out), "--strict"]);
    assert_eq!(r.status.code(), Some(2));
    assert_eq!(
        mtstreams(&["verify", "--dir", p(&missing), "--dir", p(dir.path())])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_reports_differences() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    mtstreams(&[
        "gen",
        "--technique",
        "random",
        "--count",
        "4",
        "--seed",
        "9",
        "--out",
        p(&a),
    ]);
    mtstreams(&[
        "gen",
        "--technique",
        "random",
        "--count",
        "4",
        "--seed",
        "9",
        "--out",
        p(&b),
    ]);
    assert_eq!(
        mtstreams(&["verify", "--dir", p(&a), "--dir", p(&b)])
            .status
            .code(),
        Some(0)
    );
    std::fs::remove_file(b.join("random_00003.mts")).unwrap();
    let r = mtstreams(&["verify", "--dir", p(&a), "--dir", p(&b)]);
    assert_eq!(r.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&r.stdout).contains("only in A: random_00003.mts"));
    assert_eq!(
        mtstreams(&["verify", "--dir", p(&a)]).status.code(),
        Some(1)
    );
}

#[test]
fn battery_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let r = mtstreams(&["test", "--print-battery"]);
    assert_eq!(r.status.code(), Some(0));
    let file = dir.path().join("battery.json");
    std::fs::write(&file, &r.stdout).unwrap();
    let again = mtstreams(&["test", "--print-battery", "--battery", p(&file)]);
    assert_eq!(again.stdout, r.stdout);
}

#[test]
fn small_campaign_with_custom_battery() {
    let dir = tempfile::tempdir().unwrap();
    let battery = r#"{"name":"tiny","threshold":1e-10,"tests":[
        {"id":"lc","family":"LinearComp","params":{"n_bits":50000,"bit_offset":0}},
        {"id":"serial","family":"SerialUniformity","params":{"n":20000,"cells":64}}]}"#;
    let bfile = dir.path().join("tiny.json");
    std::fs::write(&bfile, battery).unwrap();
    let statuses = dir.path().join("s");
    mtstreams(&[
        "gen",
        "--technique",
        "indexed",
        "--count",
        "3",
        "--out",
        p(&statuses),
    ]);
    let results = dir.path().join("out").join("r.jsonl");
    let r = mtstreams(&[
        "test",
        "--dir",
        p(&statuses),
        "--battery",
        p(&bfile),
        "--mode",
        "both",
        "--out",
        p(&results),
        "--strict",
    ]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    assert_eq!(
        std::fs::read_to_string(&results).unwrap().lines().count(),
        12
    );

    // with nothing expected to fail, every status is Suspect
    let r = mtstreams(&[
        "test",
        "--dir",
        p(&statuses),
        "--battery",
        p(&bfile),
        "--out",
        p(&results),
        "--strict",
        "--expected-fail",
        "",
    ]);
    assert_eq!(r.status.code(), Some(3));

    let reg = dir.path().join("registry.txt");
    let r = mtstreams(&["registry", "--results", p(&results), "--out", p(&reg)]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&reg).unwrap().lines().count(), 3);
    let r = mtstreams(&[
        "registry",
        "--results",
        p(&results),
        "--out",
        p(&reg),
        "--expected-fail",
        "",
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&reg).unwrap(), "");
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("registry.txt.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["entries"].as_array().unwrap().len(), 0);
    let r = mtstreams(&[
        "registry",
        "--results",
        p(&results),
        "--out",
        p(&reg),
        "--expected-fail",
        "nope",
    ]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn empty_campaign_gives_empty_registry() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let results = dir.path().join("r.jsonl");
    let r = mtstreams(&["test", "--dir", p(&empty), "--out", p(&results)]);
    assert_eq!(r.status.code(), Some(0));
    let reg = dir.path().join("reg.txt");
    let r = mtstreams(&["registry", "--results", p(&results), "--out", p(&reg)]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&reg).unwrap(), "");
}
