use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use optdg_core::EventLog;
use serde_json::Value;
use tempfile::TempDir;

fn optdg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optdg"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_log(dir: &Path, name: &str, traces: &[(&[&str], u64)]) -> PathBuf {
    let log = EventLog::from_traces(traces.iter().map(|(t, c)| (t.iter().copied(), *c))).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, log.to_json().unwrap()).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn discover_sequence_writes_golden_chain() {
    let tmp = TempDir::new().unwrap();
    write_log(tmp.path(), "seq.json", &[(&["s", "a", "b", "e"], 5)]);
    let out = optdg(&["discover", "seq.json", "-o", "out"], tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let graph = std::fs::read_to_string(tmp.path().join("out/graph.json")).unwrap();
    assert_eq!(
        graph.trim(),
        r#"{"tasks":["s","a","b","e"],"arcs":[[0,1],[1,2],[2,3]],"start":0,"end":3}"#
    );
    let q = read_json(&tmp.path().join("out/quality.json"));
    assert_eq!(
        (q["fim"].as_f64(), q["prm"].as_f64(), q["an"].as_u64()),
        (Some(1.0), Some(1.0), Some(3))
    );
    assert!(tmp.path().join("out/graph.dot").exists());
    assert!(tmp.path().join("out/summary.json").exists());
}

#[test]
fn export_lp_only_skips_solving() {
    let tmp = TempDir::new().unwrap();
    write_log(tmp.path(), "seq.json", &[(&["s", "a", "e"], 2)]);
    let out = optdg(
        &["discover", "seq.json", "-o", "out", "--export-lp", "only"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let lp = std::fs::read_to_string(tmp.path().join("out/model.lp")).unwrap();
    assert!(lp.contains("Maximize"));
    assert!(!tmp.path().join("out/graph.json").exists());
}

#[test]
fn unreadable_input_is_an_input_error() {
    let tmp = TempDir::new().unwrap();
    let out = optdg(&["discover", "missing.json", "-o", "out"], tmp.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
    std::fs::write(tmp.path().join("broken.xes"), "<log><trace>").unwrap();
    let out = optdg(&["discover", "broken.xes", "-o", "out"], tmp.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse stage"));
}

#[test]
fn infeasible_config_exits_one_without_artifacts() {
    let tmp = TempDir::new().unwrap();
    write_log(tmp.path(), "seq.json", &[(&["s", "a", "e"], 2)]);
    let out = optdg(
        &[
            "discover",
            "seq.json",
            "-o",
            "out",
            "--max-inputs",
            "0",
            "--export-lp",
            "also",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("solve stage"));
    assert_eq!(std::fs::read_dir(tmp.path().join("out")).unwrap().count(), 0);
}

#[test]
fn bad_config_values_are_input_errors() {
    let tmp = TempDir::new().unwrap();
    write_log(tmp.path(), "seq.json", &[(&["s", "a", "e"], 2)]);
    let out = optdg(
        &["discover", "seq.json", "-o", "out", "--dep-thresh", "1.5"],
        tmp.path(),
    );
    assert_eq!(code(&out), 2);
    std::fs::write(tmp.path().join("bad.toml"), "MaxArcsRatio = \"x\"\n").unwrap();
    let out = optdg(&["export-lp", "seq.json", "--config", "bad.toml"], tmp.path());
    assert_eq!(code(&out), 2);
}

#[test]
fn flags_override_the_config_file() {
    let tmp = TempDir::new().unwrap();
    write_log(
        tmp.path(),
        "log.json",
        &[(&["s", "a", "b", "e"], 3), (&["s", "b", "a", "e"], 3)],
    );
    std::fs::write(tmp.path().join("cfg.toml"), "MaxArcsRatio = 1.0\nMaxInputs = 1\n").unwrap();
    let lp = |args: &[&str]| {
        let mut all = vec!["export-lp", "log.json"];
        all.extend_from_slice(args);
        optdg(&all, tmp.path()).stdout
    };
    let from_file = lp(&["--config", "cfg.toml"]);
    let overridden = lp(&["--config", "cfg.toml", "--max-arcs-ratio", "2"]);
    assert_ne!(from_file, overridden);
    assert_eq!(overridden, lp(&["--max-inputs", "1", "--max-arcs-ratio", "2"]));
    assert_eq!(from_file, lp(&["--max-inputs", "1", "--max-arcs-ratio", "1"]));
    let out = optdg(
        &["discover", "log.json", "-o", "o1", "--config", "cfg.toml"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let out = optdg(
        &[
            "discover",
            "log.json",
            "-o",
            "o2",
            "--config",
            "cfg.toml",
            "--max-inputs",
            "2",
            "--max-arcs-ratio",
            "2",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let inputs_of_end = |dir: &str| {
        let g = read_json(&tmp.path().join(dir).join("graph.json"));
        g["arcs"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|a| a[1] == g["end"])
            .count()
    };
    assert_eq!(inputs_of_end("o1"), 1);
    assert_eq!(inputs_of_end("o2"), 2);
}

#[test]
fn sweep_marks_failed_rows_and_keeps_the_rest() {
    let tmp = TempDir::new().unwrap();
    write_log(
        tmp.path(),
        "log.json",
        &[(&["s", "a", "b", "e"], 3), (&["s", "b", "a", "e"], 3)],
    );
    let out = optdg(
        &[
            "sweep",
            "log.json",
            "--param",
            "MaxInputs",
            "--values",
            "0,1000",
            "-o",
            "sw",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(tmp.path().join("sw.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "method,config,params,status,AN,FiM,PrM,F-score,solve_time,paths"
    );
    assert!(lines[1].starts_with("ilp,C1,MaxInputs=0,infeasible,,"));
    assert!(lines[2].starts_with("ilp,C2,MaxInputs=1000,optimal,4,"));
    assert!(lines[2].ends_with(",ok"));
    let json = read_json(&tmp.path().join("sw.json"));
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn ratio_sweep_is_monotone_and_matches_discover() {
    let tmp = TempDir::new().unwrap();
    let out = optdg(
        &[
            "synth",
            "--alphabet",
            "8",
            "--traces",
            "80",
            "--noise",
            "0.1",
            "--seed",
            "4",
            "-o",
            "log.json",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let out = optdg(&["sweep", "log.json", "-o", "sw"], tmp.path());
    assert_eq!(code(&out), 0);
    let json = read_json(&tmp.path().join("sw.json"));
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    let an: Vec<u64> = rows.iter().map(|r| r["an"].as_u64().unwrap()).collect();
    assert!(an.windows(2).all(|w| w[0] >= w[1]), "{an:?}");

    let out = optdg(&["sweep", "log.json", "--values", "1.5", "-o", "one"], tmp.path());
    assert_eq!(code(&out), 0);
    let out = optdg(
        &["discover", "log.json", "--max-arcs-ratio", "1.5", "-o", "d"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let row = &read_json(&tmp.path().join("one.json"))["rows"][0];
    let q = read_json(&tmp.path().join("d/quality.json"));
    for key in ["an", "fim", "prm", "fscore"] {
        assert_eq!(row[key], q[key], "{key}");
    }
}

#[test]
fn compare_flags_baseline_path_failures() {
    let tmp = TempDir::new().unwrap();
    write_log(
        tmp.path(),
        "loop.json",
        &[(&["s", "a", "b", "a", "b", "a", "b", "e"], 1), (&["s", "c", "e"], 100)],
    );
    let out = optdg(&["compare", "loop.json", "-o", "cmp"], tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&tmp.path().join("cmp.json"));
    let methods = report["methods"].as_array().unwrap();
    assert_eq!(methods[0]["method"], "ilp");
    assert_eq!(methods[0]["path_failures"], 0);
    assert!(methods[1]["path_failures"].as_u64().unwrap() >= 1);
    assert_eq!(methods[0]["min_an"].as_array().unwrap().len(), 4);
}

#[test]
fn compare_is_byte_for_byte_deterministic() {
    let tmp = TempDir::new().unwrap();
    let out = optdg(
        &[
            "synth",
            "--alphabet",
            "7",
            "--traces",
            "60",
            "--noise",
            "0.05",
            "--seed",
            "9",
            "-o",
            "log.json",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let first = optdg(&["compare", "log.json", "-o", "a"], tmp.path());
    let second = optdg(&["compare", "log.json", "-o", "b"], tmp.path());
    assert_eq!(code(&first), 0);
    for ext in ["csv", "json"] {
        let a = std::fs::read(tmp.path().join(format!("a.{ext}"))).unwrap();
        let b = std::fs::read(tmp.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext}");
    }
    let text = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with("wrote"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(text(&first), text(&second));
}

#[test]
fn synth_is_deterministic_and_noise_adds_variety() {
    let tmp = TempDir::new().unwrap();
    let spec = r#"{"root":{"seq":[{"task":"s"},{"task":"a"},{"task":"b"},{"task":"e"}]}}"#;
    std::fs::write(tmp.path().join("seq.json"), spec).unwrap();
    let run = |noise: &str, out: &str| {
        let o = optdg(
            &[
                "synth",
                "--spec",
                "seq.json",
                "--traces",
                "100",
                "--noise",
                noise,
                "--seed",
                "1",
                "-o",
                out,
                "--xes",
                &format!("{out}.xes"),
            ],
            tmp.path(),
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        EventLog::from_json(&std::fs::read_to_string(tmp.path().join(out)).unwrap()).unwrap()
    };
    let clean = run("0", "a.json");
    run("0", "b.json");
    assert_eq!(
        std::fs::read(tmp.path().join("a.json")).unwrap(),
        std::fs::read(tmp.path().join("b.json")).unwrap()
    );
    assert_eq!(
        std::fs::read(tmp.path().join("a.json.xes")).unwrap(),
        std::fs::read(tmp.path().join("b.json.xes")).unwrap()
    );
    assert_eq!(clean.distinct_traces(), 1);
    let noisy = run("0.2", "c.json");
    assert!(noisy.distinct_traces() > clean.distinct_traces());
}

#[test]
fn evaluate_reports_json_and_table() {
    let tmp = TempDir::new().unwrap();
    write_log(
        tmp.path(),
        "log.json",
        &[(&["s", "a", "b", "e"], 2), (&["s", "b", "e"], 1)],
    );
    std::fs::write(
        tmp.path().join("g.json"),
        r#"{"tasks":["s","a","b","e"],"arcs":[[0,1],[1,2],[2,3]],"start":0,"end":3}"#,
    )
    .unwrap();
    let out = optdg(&["evaluate", "log.json", "-g", "g.json"], tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let q: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(q["an"], 3);
    assert!(q["fim"].as_f64().unwrap() < 1.0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("F-score"));
    let strict = optdg(
        &["evaluate", "log.json", "-g", "g.json", "--fim-strict-pseudocode"],
        tmp.path(),
    );
    assert_eq!(code(&strict), 0);
    let s: Value = serde_json::from_slice(&strict.stdout).unwrap();
    assert!(s["fitness"]["afe"].as_u64() <= q["fitness"]["afe"].as_u64());
}

#[test]
fn dumps_carry_task_names() {
    let tmp = TempDir::new().unwrap();
    write_log(tmp.path(), "log.json", &[(&["s", "a", "b", "a", "b", "a", "e"], 1)]);
    let rel: Value = serde_json::from_slice(&optdg(&["relations-dump", "log.json"], tmp.path()).stdout).unwrap();
    assert_eq!(rel["tasks"], serde_json::json!(["s", "a", "b", "e"]));
    assert_eq!(rel["direct"][1][2], 2);
    assert_eq!(rel["eventually_follows"][3][0], false);
    let meas: Value = serde_json::from_slice(&optdg(&["measures-dump", "log.json"], tmp.path()).stdout).unwrap();
    let d = meas["d"][1][2].as_f64().unwrap();
    assert!((d - 0.0).abs() < 1e-12, "{d}");
}
