//! End-to-end tests of the `schelling` binary: exit codes, help coverage,
//! artifact layout, hash stamps, and byte-level determinism across reruns
//! and scheduling modes.

use std::fs;
use std::path::Path;
use std::process::Command;

const ALL_FLAGS: &[&str] = &[
    "--config",
    "--preset",
    "--n",
    "--m",
    "--w",
    "--p",
    "--closure",
    "--r",
    "--side",
    "--cells",
    "--t",
    "--dt",
    "--horizon",
    "--eps",
    "--budget",
    "--level",
    "--samples",
    "--local-steps",
    "--data",
    "--amp",
    "--radius",
    "--rule",
    "--min-diameter",
    "--search-cap",
    "--shared-init",
    "--seed",
    "--seeds",
    "--out",
    "--sequential",
];

fn run_in(root: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_schelling"))
        .args(args)
        .env("SCHELLING_OUT", root)
        .output()
        .expect("spawn schelling binary");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn summary(dir: &Path) -> serde_json::Value {
    let text = fs::read_to_string(dir.join("run_summary.json")).expect("summary exists");
    serde_json::from_str(&text).expect("summary parses")
}

/// First two lines of every CSV artifact: hash stamp, then schema tag.
fn csv_hash(path: &Path) -> String {
    let text = fs::read_to_string(path).expect("artifact exists");
    let mut lines = text.lines();
    let hash_line = lines.next().expect("hash line");
    let schema_line = lines.next().expect("schema line");
    assert!(hash_line.starts_with("# config-hash: "), "{hash_line}");
    assert!(schema_line.starts_with("# schema: "), "{schema_line}");
    hash_line.trim_start_matches("# config-hash: ").to_string()
}

#[test]
fn help_documents_every_flag_for_every_subcommand() {
    for sub in [
        "simulate",
        "solve",
        "couple",
        "final-configs",
        "stable-shape",
        "occupation",
    ] {
        let out = Command::new(env!("CARGO_BIN_EXE_schelling"))
            .args([sub, "--help"])
            .output()
            .expect("spawn schelling binary");
        assert_eq!(out.status.code(), Some(0));
        let help = String::from_utf8_lossy(&out.stdout).into_owned();
        for flag in ALL_FLAGS {
            assert!(help.contains(flag), "{sub} --help missing {flag}");
        }
        assert!(help.contains("default"), "{sub} --help lists no defaults");
    }
}

#[test]
fn bad_flag_value_exits_2_and_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = run_in(tmp.path(), &["simulate", "--w", "0", "--out", "x"]);
    assert_eq!(code, 2, "stderr: {err}");
    assert!(err.contains("`w`"), "stderr should name the field: {err}");
    assert!(!tmp.path().join("x").exists(), "no artifacts on rejection");

    let (code, _, err) = run_in(tmp.path(), &["occupation", "--cells", "100", "--out", "y"]);
    assert_eq!(code, 2);
    assert!(err.contains("`cells`"), "stderr: {err}");
}

#[test]
fn unknown_flag_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_schelling"))
        .args(["simulate", "--frobnicate"])
        .output()
        .expect("spawn schelling binary");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_errors_exit_2_with_location() {
    let tmp = tempfile::tempdir().unwrap();

    let unknown = tmp.path().join("unknown.toml");
    fs::write(&unknown, "[model]\nn = 1\nbogus = 3\n").unwrap();
    let (code, _, err) = run_in(
        tmp.path(),
        &["simulate", "--config", unknown.to_str().unwrap()],
    );
    assert_eq!(code, 2);
    assert!(err.contains("model.bogus"), "stderr: {err}");

    let broken = tmp.path().join("broken.toml");
    fs::write(&broken, "[model\nn = 1\n").unwrap();
    let (code, _, err) = run_in(
        tmp.path(),
        &["simulate", "--config", broken.to_str().unwrap()],
    );
    assert_eq!(code, 2);
    assert!(err.contains("line 1"), "stderr should locate the error: {err}");

    let (code, _, err) = run_in(
        tmp.path(),
        &["simulate", "--config", "/nonexistent/nope.toml"],
    );
    assert_eq!(code, 2);
    assert!(err.contains("nope.toml"), "stderr: {err}");
}

#[test]
fn config_file_applies_under_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("run.toml");
    fs::write(
        &file,
        "[model]\nw = [2]\n\n[run]\nseeds = 2\nout = \"from-file\"\n",
    )
    .unwrap();
    // The file sets w and out; the flag overrides out but keeps the file's w.
    let (code, _, err) = run_in(
        tmp.path(),
        &[
            "simulate",
            "--config",
            file.to_str().unwrap(),
            "--out",
            "from-flag",
        ],
    );
    assert_eq!(code, 0, "stderr: {err}");
    assert!(!tmp.path().join("from-file").exists());
    let cfg = &summary(&tmp.path().join("from-flag"))["config"];
    assert_eq!(cfg["w"], serde_json::json!([2]));
    assert_eq!(cfg["seeds"], serde_json::json!(2));
}

#[test]
fn minimal_simulate_run_produces_stamped_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, stdout, err) = run_in(
        tmp.path(),
        &["simulate", "--w", "2", "--seeds", "2", "--out", "sim"],
    );
    assert_eq!(code, 0, "stderr: {err}");
    assert!(stdout.contains("run_summary.json"));

    let dir = tmp.path().join("sim");
    let doc = summary(&dir);
    assert_eq!(doc["status"], "done");
    assert_eq!(doc["config"]["kind"], "simulate");
    assert_eq!(doc["config"]["w"], serde_json::json!([2]));
    assert!(doc["rng_algorithm"].as_str().unwrap().contains("ChaCha8"));

    // Same hash on every artifact and in the summary.
    let expect = doc["config_hash"].as_str().unwrap();
    for name in ["simulate_cells.csv", "simulate_structure.csv"] {
        assert_eq!(csv_hash(&dir.join(name)), expect, "{name}");
    }
    let listed: Vec<&str> = doc["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(listed.contains(&"simulate_cells.csv"), "{listed:?}");
}

#[test]
fn reruns_match_byte_for_byte_across_scheduling_modes() {
    let tmp = tempfile::tempdir().unwrap();
    let base = [
        "final-configs",
        "--w",
        "1,2",
        "--seeds",
        "3",
        "--horizon",
        "200",
    ];
    let mut parallel = base.to_vec();
    parallel.extend(["--out", "a"]);
    let mut sequential = base.to_vec();
    sequential.extend(["--out", "b", "--sequential"]);

    let (code, _, err) = run_in(tmp.path(), &parallel);
    assert_eq!(code, 0, "stderr: {err}");
    let (code, _, err) = run_in(tmp.path(), &sequential);
    assert_eq!(code, 0, "stderr: {err}");

    for name in ["final_runs.csv", "final_cells.csv"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between scheduling modes");
    }
    // out and sequential are excluded from the hash, so the two runs stamp
    // the same configuration fingerprint.
    assert_eq!(
        csv_hash(&tmp.path().join("a/final_runs.csv")),
        csv_hash(&tmp.path().join("b/final_runs.csv")),
    );
}

#[test]
fn final_config_runs_are_long_enough() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = run_in(
        tmp.path(),
        &["final-configs", "--w", "1,2", "--seeds", "3", "--out", "f"],
    );
    assert_eq!(code, 0, "stderr: {err}");
    let text = fs::read_to_string(tmp.path().join("f/final_runs.csv")).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(3) {
        let fields: Vec<&str> = line.split(',').collect();
        let w: u64 = fields[0].parse().unwrap();
        let len: u64 = fields[3].parse().unwrap();
        assert!(len >= w + 1, "run of length {len} at w = {w}");
        rows += 1;
    }
    assert!(rows > 0, "no structure rows written");
}

#[test]
fn solve_sawtooth_preset_collapses() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = run_in(
        tmp.path(),
        &["solve", "--preset", "sawtooth", "--out", "saw"],
    );
    assert_eq!(code, 0, "stderr: {err}");
    let doc = summary(&tmp.path().join("saw"));
    let sup = doc["headline"]["sup_hat_final"].as_f64().unwrap();
    assert!(sup <= 0.1, "sup_hat_final = {sup}");
    assert_eq!(doc["headline"]["freeze_violations"], 0);
}

#[test]
fn unresolved_horizon_exits_3_but_keeps_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, err) = run_in(
        tmp.path(),
        &[
            "simulate",
            "--n",
            "2",
            "--side",
            "12",
            "--w",
            "2",
            "--horizon",
            "0.01",
            "--seeds",
            "2",
            "--out",
            "inc",
        ],
    );
    assert_eq!(code, 3, "stderr: {err}");
    assert!(err.contains("inconclusive"));
    let doc = summary(&tmp.path().join("inc"));
    let status = doc["status"].as_str().unwrap();
    assert!(status.starts_with("inconclusive"), "{status}");
    assert!(tmp.path().join("inc/simulate_cells.csv").exists());
}
