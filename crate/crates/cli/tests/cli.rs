//! End-to-end tests of the `emdet` binary: output files, determinism,
//! flag/config-file equivalence and exit codes.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn emdet() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emdet"))
}

fn work_dir(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("emdet-cli-{test}-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("create test dir");
    dir
}

fn run_ok(args: &[&str]) -> Output {
    let out = emdet().args(args).output().expect("spawn emdet");
    assert!(
        out.status.success(),
        "emdet {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(args: &[&str]) -> i32 {
    emdet()
        .args(args)
        .output()
        .expect("spawn emdet")
        .status
        .code()
        .expect("exit code")
}

/// Parses our CSV layout into (meta, columns).
fn parse_csv(path: &Path) -> (HashMap<String, String>, HashMap<String, Vec<f64>>) {
    let text = fs::read_to_string(path).expect("read csv");
    let mut meta = HashMap::new();
    let mut lines = text.lines().peekable();
    while let Some(line) = lines.peek() {
        if let Some(entry) = line.strip_prefix("# ") {
            let (k, v) = entry.split_once('=').expect("meta line");
            meta.insert(k.to_string(), v.to_string());
            lines.next();
        } else {
            break;
        }
    }
    let header: Vec<&str> = lines.next().expect("header row").split(',').collect();
    let mut columns: HashMap<String, Vec<f64>> =
        header.iter().map(|h| (h.to_string(), Vec::new())).collect();
    for line in lines {
        for (name, value) in header.iter().zip(line.split(',')) {
            columns
                .get_mut(*name)
                .expect("known column")
                .push(value.parse().expect("numeric cell"));
        }
    }
    (meta, columns)
}

#[test]
fn farfield_cancellation_writes_zero_column() {
    let dir = work_dir("farfield-zero");
    let out_path = dir.join("out.csv");
    run_ok(&[
        "farfield",
        "--d-over-lambda",
        "3",
        "--zeta",
        "-1",
        "--cut",
        "polar",
        "--phi",
        "0",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    let (meta, columns) = parse_csv(&out_path);
    assert_eq!(meta.get("zeta").map(String::as_str), Some("-1"));
    assert_eq!(meta.get("command").map(String::as_str), Some("farfield"));
    let generalized = &columns["generalized"];
    assert_eq!(generalized.len(), 721);
    assert!(generalized.iter().all(|&v| v == 0.0));
    assert!(columns["glauber"].iter().any(|&v| v > 0.0));
}

#[test]
fn fringe_summary_reports_unit_visibility() {
    let dir = work_dir("fringe-summary");
    let out_path = dir.join("fringe.csv");
    let out = run_ok(&[
        "fringe",
        "--zeta",
        "0",
        "--phi",
        "0",
        "--points",
        "1001",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("visibility=1.0000"),
        "unexpected summary: {stdout}"
    );
}

#[test]
fn resonance_summary_reports_critical_peak() {
    let dir = work_dir("resonance-peak");
    let out_path = dir.join("resonance.csv");
    let out = run_ok(&[
        "resonance",
        "--gamma-e",
        "1",
        "--gamma-m",
        "1",
        "--gamma-i",
        "2",
        "--delta-range",
        "-10:10:801",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("peak_absorption=1.0000") && stdout.contains("at delta=0.0000"),
        "unexpected summary: {stdout}"
    );
    let (_, columns) = parse_csv(&out_path);
    let deltas = &columns["delta"];
    let absorption = &columns["absorption"];
    let idx = deltas.iter().position(|&d| d == 0.0).expect("on-grid zero");
    assert!((absorption[idx] - 1.0).abs() <= 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = work_dir("determinism");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for path in [&a, &b] {
        run_ok(&[
            "sample",
            "--zeta",
            "0.5",
            "--events",
            "20000",
            "--seed",
            "11",
            "-o",
            path.to_str().unwrap(),
        ]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = dir.join("c.json");
    let d = dir.join("d.json");
    for path in [&c, &d] {
        run_ok(&[
            "fringe",
            "--zeta",
            "0.5+0.5i",
            "--format",
            "json",
            "-o",
            path.to_str().unwrap(),
        ]);
    }
    assert_eq!(fs::read(&c).unwrap(), fs::read(&d).unwrap());
}

#[test]
fn flags_and_config_file_are_equivalent() {
    let dir = work_dir("flag-file");
    let by_flags = dir.join("flags.csv");
    let by_file = dir.join("file.csv");
    run_ok(&[
        "fringe",
        "--zeta",
        "0.25+0.1i",
        "--phi",
        "0.7",
        "--points",
        "501",
        "--periods",
        "2",
        "-o",
        by_flags.to_str().unwrap(),
    ]);
    let cfg = dir.join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "# fringe run\ncommand = fringe\nzeta = 0.25+0.1i\nphi = 0.7\npoints = 501\n\
             periods = 2\noutput = {}\n",
            by_file.display()
        ),
    )
    .unwrap();
    run_ok(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(fs::read(&by_flags).unwrap(), fs::read(&by_file).unwrap());
}

#[test]
fn flags_override_config_file() {
    let dir = work_dir("flag-override");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "command = fringe\nzeta = 0\npoints = 101\n").unwrap();
    let out_path = dir.join("out.csv");
    let out = run_ok(&[
        "fringe",
        "--config",
        cfg.to_str().unwrap(),
        "--zeta",
        "1",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("closed_form=0.0000"),
        "flag did not override file: {stdout}"
    );
    let (meta, _) = parse_csv(&out_path);
    assert_eq!(meta.get("zeta").map(String::as_str), Some("1"));
    assert_eq!(meta.get("n_points").map(String::as_str), Some("101"));
}

#[test]
fn json_output_is_well_formed() {
    let dir = work_dir("json");
    let out_path = dir.join("bloch.json");
    run_ok(&[
        "bloch",
        "--zeta-range",
        "-1:1:21",
        "--format",
        "json",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    let value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(value["meta"]["command"], "bloch");
    assert_eq!(value["columns"]["zeta"].as_array().unwrap().len(), 21);
    assert_eq!(value["columns"]["bloch_z"][20], 1.0);
}

#[test]
fn env_var_sets_default_output_dir() {
    let dir = work_dir("env-dir");
    let out = emdet()
        .args(["critical", "--points", "41"])
        .env("EMDET_OUTPUT_DIR", &dir)
        .output()
        .expect("spawn emdet");
    assert!(out.status.success());
    assert!(dir.join("critical.csv").exists());
}

#[test]
fn sample_metadata_header_is_complete() {
    let dir = work_dir("sample-meta");
    let out_path = dir.join("events.csv");
    run_ok(&[
        "sample",
        "--zeta",
        "0.25",
        "--phi",
        "0.5",
        "--events",
        "500",
        "--seed",
        "77",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    let (meta, columns) = parse_csv(&out_path);
    assert_eq!(meta.get("rng").map(String::as_str), Some("chacha12"));
    assert_eq!(meta.get("seed").map(String::as_str), Some("77"));
    assert_eq!(meta.get("n_events").map(String::as_str), Some("500"));
    assert_eq!(meta.get("zeta").map(String::as_str), Some("0.25"));
    assert_eq!(meta.get("phi").map(String::as_str), Some("0.5"));
    assert!(meta.contains_key("wavenumber_k"));
    assert_eq!(columns["x"].len(), 500);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(exit_code(&["fringe", "--zeta", "bogus"]), 1);
    assert_eq!(exit_code(&["fringe", "--no-such-flag", "1"]), 1);
    assert_eq!(exit_code(&["fringe", "--format", "xml"]), 1);
    assert_eq!(exit_code(&["bloch", "--zeta-range", "1:0:10"]), 1);
    assert_eq!(exit_code(&[]), 1);

    // unknown key in a config file
    let dir = work_dir("bad-key");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "command = fringe\nbogus-key = 1\n").unwrap();
    assert_eq!(exit_code(&["--config", cfg.to_str().unwrap()]), 1);
}

#[test]
fn numerical_precondition_violations_exit_2() {
    let dir = work_dir("numerical");
    let out = dir.join("x.csv");
    let out = out.to_str().unwrap();
    assert_eq!(exit_code(&["farfield", "--points", "1", "-o", out]), 2);
    assert_eq!(
        exit_code(&["resonance", "--gamma-e", "-1", "-o", out]),
        2
    );
    assert_eq!(exit_code(&["evolve", "--dt", "10", "-o", out]), 2);
    assert_eq!(
        exit_code(&["fringe", "--periods", "0.5", "-o", out]),
        2
    );
    assert_eq!(
        exit_code(&["sample", "--events", "10", "--bins", "4", "-o", out]),
        2
    );
}

#[test]
fn io_errors_exit_3() {
    assert_eq!(
        exit_code(&[
            "critical",
            "--points",
            "11",
            "-o",
            "/nonexistent-emdet-dir/out.csv"
        ]),
        3
    );
    assert_eq!(exit_code(&["--config", "/nonexistent-emdet-dir/run.cfg"]), 3);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(exit_code(&["--help"]), 0);
    assert_eq!(exit_code(&["--version"]), 0);
    assert_eq!(exit_code(&["fringe", "--help"]), 0);
}
