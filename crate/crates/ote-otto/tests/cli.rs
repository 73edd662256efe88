//! End-to-end checks through the compiled binary: exit codes, stdout/file
//! output equivalence, format and thread-count flags.

use std::path::PathBuf;
use std::process::{Command, Output};

use ote_otto::cli::ResultTable;

const BIN: &str = env!("CARGO_BIN_EXE_ote-otto");

fn tmp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ote-otto-e2e-{}-{name}", std::process::id()))
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("OTE_OTTO_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

const SWEEP_CONFIG: &str = "\
[environment]
material = \"vacuum\"
slab_temperature = 700.0
blackbody_temperature = 200.0

[cycle]
mode = \"standard\"
k_grid = { start = 0.3, stop = 0.9, points = 5 }
";

#[test]
fn missing_config_file_is_an_io_error() {
    let out = run(&["sweep", "--config", "/nonexistent/run.toml"], &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "stderr was: {err}");
}

#[test]
fn malformed_config_is_a_config_error() {
    let path = tmp_path("bad.toml");
    std::fs::write(&path, "[environment\n").unwrap();
    let out = run(&["sweep", "--config", path.to_str().unwrap()], &[]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "stderr was: {err}");
}

#[test]
fn stdout_and_file_output_agree() {
    let cfg = tmp_path("sweep.toml");
    std::fs::write(&cfg, SWEEP_CONFIG).unwrap();

    let to_stdout = run(&["sweep", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(to_stdout.status.code(), Some(0));
    let text = String::from_utf8(to_stdout.stdout).unwrap();
    let from_stdout = ResultTable::from_csv(&text).expect("stdout parses as CSV");

    let out_file = tmp_path("sweep.csv");
    let to_file = run(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_file.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let from_file =
        ResultTable::from_csv(&std::fs::read_to_string(&out_file).unwrap()).expect("file parses");
    std::fs::remove_file(&cfg).ok();
    std::fs::remove_file(&out_file).ok();

    assert_eq!(from_stdout.rows, from_file.rows);
    assert_eq!(
        from_stdout.metadata.get("config_digest"),
        from_file.metadata.get("config_digest")
    );
    assert_eq!(from_stdout.rows.len(), 5);
}

#[test]
fn json_format_flag_round_trips_the_same_rows() {
    let cfg = tmp_path("fmt.toml");
    std::fs::write(&cfg, SWEEP_CONFIG).unwrap();
    let csv_run = run(&["sweep", "--config", cfg.to_str().unwrap()], &[]);
    let json_run = run(
        &["sweep", "--config", cfg.to_str().unwrap(), "--format", "json"],
        &[],
    );
    std::fs::remove_file(&cfg).ok();
    assert_eq!(csv_run.status.code(), Some(0));
    assert_eq!(json_run.status.code(), Some(0));
    let csv = ResultTable::from_csv(&String::from_utf8(csv_run.stdout).unwrap()).unwrap();
    let json = ResultTable::from_json(&String::from_utf8(json_run.stdout).unwrap()).unwrap();
    assert_eq!(csv.rows, json.rows);
    assert_eq!(csv.columns, json.columns);
}

#[test]
fn thread_flag_overrides_broken_env_var() {
    let cfg = tmp_path("threads.toml");
    std::fs::write(&cfg, SWEEP_CONFIG).unwrap();
    // an unparsable env value only matters when the flag is absent
    let flag_wins = run(
        &[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--threads",
            "2",
        ],
        &[("OTE_OTTO_THREADS", "plenty")],
    );
    assert_eq!(flag_wins.status.code(), Some(0));
    let env_used = run(
        &["sweep", "--config", cfg.to_str().unwrap()],
        &[("OTE_OTTO_THREADS", "plenty")],
    );
    std::fs::remove_file(&cfg).ok();
    assert_eq!(env_used.status.code(), Some(1));
    let err = String::from_utf8_lossy(&env_used.stderr);
    assert!(err.contains("OTE_OTTO_THREADS"), "stderr was: {err}");
}

#[test]
fn reproduce_refuses_an_external_config() {
    let cfg = tmp_path("extra.toml");
    std::fs::write(&cfg, SWEEP_CONFIG).unwrap();
    let out = run(
        &["reproduce", "sec4", "--config", cfg.to_str().unwrap()],
        &[],
    );
    std::fs::remove_file(&cfg).ok();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bundled preset"), "stderr was: {err}");
}

// The fuzz seed corpora double as format examples; they must keep parsing
// as the schemas evolve, or the fuzzers start from dead inputs.
#[test]
fn fuzz_corpus_seeds_parse() {
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus");
    let read_dir = |name: &str| {
        let dir = corpus.join(name);
        let mut seeds = Vec::new();
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            seeds.push((
                path.display().to_string(),
                std::fs::read_to_string(&path).unwrap(),
            ));
        }
        assert!(!seeds.is_empty(), "no seeds in {}", dir.display());
        seeds
    };
    for (path, text) in read_dir("fuzz_parse_config") {
        ote_otto::cli::parse_config(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
    }
    for (path, text) in read_dir("fuzz_parse_table_csv") {
        let t = ResultTable::from_csv(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
        assert!(!t.rows.is_empty(), "{path} has no rows");
    }
    for (path, text) in read_dir("fuzz_parse_table_json") {
        let t = ResultTable::from_json(&text).unwrap_or_else(|e| panic!("{path}: {e}"));
        assert!(!t.rows.is_empty(), "{path} has no rows");
    }
}
