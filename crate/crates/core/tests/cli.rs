mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mrclens::evaluation::EvalResult;
use mrclens::report::report_from_json;

fn mrclens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrclens"))
        .args(args)
        .env_remove("MRCLENS_SEED")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = mrclens(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn corpus() -> String {
    common::fixture_path("corpus.json").to_string_lossy().into_owned()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(mrclens(&[]).status.code(), Some(1));
    assert_eq!(mrclens(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mrclens(&["run", "--out", "x"]).status.code(), Some(1));
    assert_eq!(mrclens(&["truncate", "--dataset", "/nonexistent/d.json", "--out", "x"]).status.code(), Some(1));
    assert_eq!(mrclens(&["perturb", "--dataset", &corpus(), "--ablation", "e9", "--out", "x"]).status.code(), Some(1));
    assert_eq!(mrclens(&["run", "--dataset", &corpus(), "--thresholds", "30,10", "--out", "x"]).status.code(), Some(1));
    assert_eq!(mrclens(&["--help"]).status.code(), Some(0));
    assert_eq!(mrclens(&["--version"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"version":"1.1","data":[{"title":"T","paragraphs":[{"context":"abc","qas":[{"id":"q","question":"?","answers":[{"text":"zz","answer_start":0}]}]}]}]}"#).unwrap();
    let out = mrclens(&["run", "--dataset", s(&bad), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q: answer 0"));

    fs::write(&bad, "{not json").unwrap();
    let out = mrclens(&["truncate", "--dataset", s(&bad), "--out", s(&dir.path().join("t.json"))]);
    assert_eq!(out.status.code(), Some(2));

    let preds = dir.path().join("p.json");
    fs::write(&preds, r#"{"c01a":"Rust"}"#).unwrap();
    let out = mrclens(&["evaluate", "--dataset", &corpus(), "--predictions", s(&preds)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing predictions"));
}

#[test]
fn run_writes_the_documented_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    ok(&["run", "--dataset", &corpus(), "--seed", "42", "--out", s(&out)]);
    let tree = common::read_tree(&out);
    let mut expected = vec![
        "datasets/truncated.json".to_string(),
        "predictions/original.json".into(),
        "predictions/truncated.json".into(),
        "eval/original.json".into(),
        "eval/truncated.json".into(),
        "report.md".into(),
        "report.json".into(),
    ];
    for i in 1..=8 {
        expected.push(format!("datasets/e{i}.json"));
        expected.push(format!("records/e{i}.jsonl"));
        expected.push(format!("predictions/e{i}.json"));
        expected.push(format!("eval/e{i}.json"));
    }
    let mut expected_sorted = expected.clone();
    expected_sorted.sort();
    assert_eq!(tree.keys().cloned().collect::<Vec<_>>(), expected_sorted);

    let report = report_from_json(&tree["report.json"]).unwrap();
    assert_eq!(report.rows.len(), 8);
    assert_eq!(report.global_seed, 42);
    let md = String::from_utf8(tree["report.md"].clone()).unwrap();
    assert!(md.contains("| ablation | em | f1 | f1 drop | n | skipped | interpretation |"));
    for id in ["e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8"] {
        assert!(md.contains(&format!("| {id} ")), "{id} row missing");
    }
}

#[test]
fn run_is_byte_identical_across_invocations_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    ok(&["run", "--dataset", &corpus(), "--seed", "42", "--out", s(&a), "--jobs", "1"]);
    ok(&["run", "--dataset", &corpus(), "--seed", "42", "--out", s(&b), "--jobs", "4"]);
    ok(&["run", "--dataset", &corpus(), "--seed", "42", "--out", s(&c)]);
    let ta = common::read_tree(&a);
    assert_eq!(ta, common::read_tree(&b));
    assert_eq!(ta, common::read_tree(&c));

    let d = dir.path().join("d");
    ok(&["run", "--dataset", &corpus(), "--seed", "43", "--out", s(&d)]);
    assert_ne!(ta["datasets/e3.json"], common::read_tree(&d)["datasets/e3.json"]);
}

#[test]
fn seed_precedence_flag_then_config_then_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, format!(r#"{{"dataset":{:?},"seed":7,"ablations":["e5"]}}"#, corpus())).unwrap();
    let seed_of = |extra: &[&str], env: Option<&str>| {
        let out = dir.path().join(format!("o{}", extra.len() + env.map_or(0, |_| 10)));
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_mrclens"));
        cmd.arg("run").args(extra).args(["--out", s(&out)]).env_remove("MRCLENS_SEED");
        if let Some(e) = env {
            cmd.env("MRCLENS_SEED", e);
        }
        let status = cmd.status().unwrap();
        assert!(status.success());
        report_from_json(&fs::read(out.join("report.json")).unwrap()).unwrap().global_seed
    };
    assert_eq!(seed_of(&["--config", s(&cfg), "--seed", "9"], Some("5")), 9);
    assert_eq!(seed_of(&["--config", s(&cfg)], Some("5")), 7);
    assert_eq!(seed_of(&["--dataset", &corpus(), "--ablation", "e5"], Some("5")), 5);
    assert_eq!(seed_of(&["--dataset", &corpus(), "--ablation", "e5", "--jobs", "2"], None), 42);
}

#[test]
fn manual_chain_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let auto = dir.path().join("auto");
    let manual = dir.path().join("manual");
    ok(&["run", "--dataset", &corpus(), "--seed", "11", "--out", s(&auto)]);

    ok(&["perturb", "--dataset", &corpus(), "--seed", "11", "--out", s(&manual)]);
    let mut runs = vec![("original".to_string(), corpus())];
    runs.push(("truncated".into(), s(&manual.join("datasets/truncated.json")).to_string()));
    for i in 1..=8 {
        runs.push((format!("e{i}"), s(&manual.join(format!("datasets/e{i}.json"))).to_string()));
    }
    for (run, dataset) in &runs {
        let preds = manual.join(format!("predictions/{run}.json"));
        let eval = manual.join(format!("eval/{run}.json"));
        ok(&["predict", "--dataset", dataset, "--out", s(&preds)]);
        ok(&["evaluate", "--dataset", dataset, "--predictions", s(&preds), "--out", s(&eval)]);
    }
    ok(&["report", "--seed", "11", "--out", s(&manual)]);
    assert_eq!(common::read_tree(&auto), common::read_tree(&manual));

    let truncated = dir.path().join("t.json");
    ok(&["truncate", "--dataset", &corpus(), "--out", s(&truncated)]);
    assert_eq!(fs::read(&truncated).unwrap(), fs::read(auto.join("datasets/truncated.json")).unwrap());
}

#[test]
fn external_predictions_directory_drives_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    ok(&["run", "--dataset", &corpus(), "--ablation", "e3,e1", "--out", s(&first)]);
    let second = dir.path().join("second");
    let preds = first.join("predictions");
    ok(&["run", "--dataset", &corpus(), "--ablation", "e3,e1", "--predictions", s(&preds), "--out", s(&second)]);
    let a = common::read_tree(&first);
    let b = common::read_tree(&second);
    assert!(!b.keys().any(|k| k.starts_with("predictions/")));
    for (k, v) in &b {
        assert_eq!(&a[k], v, "{k}");
    }
    let ev = EvalResult::from_json(&b["eval/e1.json"]).unwrap();
    assert_eq!(ev.question_count, 25);

    fs::remove_file(preds.join("e1.json")).unwrap();
    let third = dir.path().join("third");
    let out = mrclens(&["run", "--dataset", &corpus(), "--ablation", "e1", "--predictions", s(&preds), "--out", s(&third)]);
    assert_ne!(out.status.code(), Some(0));
}
