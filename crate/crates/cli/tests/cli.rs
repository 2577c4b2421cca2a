use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nonsep_cli::record::read_json_lines;
use nonsep_cli::RunRecord;

fn nonsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn records(path: &Path) -> Vec<RunRecord> {
    read_json_lines(fs::read(path).unwrap().as_slice()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn valid_fixture_exits_zero() {
    let out = nonsep(&["game-finite", "--strategy", s(&fixture("valid_strategy.json"))]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = read_json_lines(out.stdout.as_slice()).unwrap();
    assert_eq!(recs.len(), 1);
    assert!(recs[0].pass);
    assert!((recs[0].aggregate.max - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn invalid_fixture_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.jsonl");
    let out = nonsep(&[
        "game-finite",
        "--strategy",
        s(&fixture("invalid_strategy.json")),
        "--out",
        s(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = &records(&out_path)[0];
    assert!(!r.pass);
    assert_eq!(r.trials[0].detail["valid"], false);
    assert!(r.aggregate.max > 0.99);
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(nonsep(&["ccr-check", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(nonsep(&["ccr-check", "--sites", "3"]).status.code(), Some(2));
    assert_eq!(
        nonsep(&["lemma-witness", "--theta", "1/2,1/2"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "kind = \"ccr-check\"\ntrails = 5\n").unwrap();
    assert_eq!(nonsep(&["ccr-check", "--config", s(&cfg)]).status.code(), Some(2));
    fs::write(&cfg, "kind = \"gns-demo\"\n").unwrap();
    let out = nonsep(&["ccr-check", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing/dir/out.jsonl");
    let out = nonsep(&["chain-roundtrip", "--trials", "3", "--out", s(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("io error"));
    let missing = dir.path().join("nope.toml");
    assert_eq!(nonsep(&["suite", "--config", s(&missing)]).status.code(), Some(3));
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "seed = 7\ntrials = 4\nsites = 8\n").unwrap();
    let out_path = dir.path().join("r.jsonl");
    let out = nonsep(&[
        "chain-roundtrip",
        "--config",
        s(&cfg),
        "--seed",
        "9",
        "--out",
        s(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out_path)[0];
    assert_eq!(
        (r.config.seed, r.config.trials, r.config.sites),
        (9, Some(4), Some(8))
    );
    assert_eq!(r.trials.len(), 4);
}

#[test]
fn sequential_and_parallel_payloads_match() {
    for args in [
        &["epr-witness", "--trials", "40", "--seed", "3"][..],
        &["game-optimize", "--n", "3", "--inputs", "5", "--seed", "3"][..],
        &["game-finite", "--trials", "10"][..],
    ] {
        let par = nonsep(args);
        let mut seq_args = vec!["--sequential"];
        seq_args.extend_from_slice(args);
        let seq = nonsep(&seq_args);
        let a = read_json_lines(par.stdout.as_slice()).unwrap();
        let b = read_json_lines(seq.stdout.as_slice()).unwrap();
        assert_eq!(a[0].payload(), b[0].payload(), "{args:?}");
        assert_eq!(a[0].payload_sha256, b[0].payload_sha256);
    }
}

#[test]
fn suite_rerun_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    fs::write(
        &cfg,
        "[[experiment]]\nkind = \"game-optimize\"\nrestarts = 4\n\n\
         [[experiment]]\nkind = \"ccr-check\"\ntrials = 20\n\n\
         [[experiment]]\nkind = \"game-epsilon\"\nmetric = \"discrete\"\n",
    )
    .unwrap();
    let rec = dir.path().join("r.jsonl");
    let out = nonsep(&["suite", "--config", s(&cfg), "--seed", "11", "--out", s(&rec)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(records(&rec).iter().all(|r| r.config.seed == 11));

    let again = nonsep(&["rerun", s(&rec)]);
    assert_eq!(again.status.code(), Some(0));
    let text = String::from_utf8(again.stdout).unwrap();
    assert_eq!(text.matches("reproduced").count(), 3, "{text}");

    let summary = nonsep(&["summarize", s(&rec)]);
    assert_eq!(summary.status.code(), Some(0));
    let text = String::from_utf8(summary.stdout).unwrap();
    let sections: Vec<&str> = text.lines().filter(|l| l.starts_with("## ")).collect();
    assert_eq!(sections, ["## ccr-check", "## game-optimize", "## game-epsilon"]);
}

#[test]
fn tampered_record_is_not_reproduced() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("r.jsonl");
    assert_eq!(
        nonsep(&["gns-demo", "--trials", "5", "--out", s(&rec)])
            .status
            .code(),
        Some(0)
    );
    let mut r = records(&rec).remove(0);
    r.aggregate.max = 0.5;
    fs::write(&rec, r.to_json_line() + "\n").unwrap();
    let out = nonsep(&["rerun", s(&rec)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("DIFFERS"));
}

#[test]
fn empty_summary() {
    let out = nonsep(&["summarize"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn csv_output() {
    let out = nonsep(&["game-optimize", "--format", "csv", "--restarts", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("kind,seed,statistic,count"));
    assert!(lines.next().unwrap().starts_with("game-optimize,0,G,3,"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let file = nonsep_cli::config::load_config(&path, None).unwrap();
        let configs = match file {
            nonsep_cli::config::ConfigFile::Single(c) => vec![*c],
            nonsep_cli::config::ConfigFile::Suite(cs) => cs,
        };
        for c in configs {
            c.resolve().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
}
