mod support;

use argbind_harness::cli::run;
use std::fs;
use std::path::Path;
use support::{FakeServer, Reply};

fn argbind(args: &[&str]) -> i32 {
    run(std::iter::once("argbind").chain(args.iter().copied()))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for out in [&a, &b] {
        assert_eq!(argbind(&["generate", "--dataset", "d11", "--seed", "7", "--count", "all", "--out", p(out)]), 0);
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    assert_eq!(bytes.iter().filter(|&&c| c == b'\n').count(), 1160);

    // the full D11 enumeration draws nothing at random; a sample does
    let (c, d) = (dir.path().join("c.jsonl"), dir.path().join("d.jsonl"));
    assert_eq!(argbind(&["generate", "--dataset", "d11", "--seed", "7", "--count", "50", "--out", p(&c)]), 0);
    assert_eq!(argbind(&["generate", "--dataset", "d11", "--seed", "8", "--count", "50", "--out", p(&d)]), 0);
    assert_ne!(fs::read(&c).unwrap(), fs::read(&d).unwrap());
}

#[test]
fn family_filter_and_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.jsonl");
    assert_eq!(argbind(&["generate", "--dataset", "d22", "--count", "10", "--family", "bat", "--out", p(&out)]), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().all(|l| l.contains("\"template_id\":\"bat-")));
}

#[test]
fn validate_passes_clean_and_fails_corrupted() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("d.jsonl");
    assert_eq!(argbind(&["generate", "--dataset", "d21", "--seed", "1", "--count", "40", "--out", p(&ds)]), 0);
    assert_eq!(argbind(&["validate", p(&ds)]), 0);

    let text = fs::read_to_string(&ds).unwrap();
    let corrupted = text.replacen("\"gold_answer\":\"yes\"", "\"gold_answer\":\"no\"", 1);
    assert_ne!(corrupted, text);
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, corrupted).unwrap();
    assert_eq!(argbind(&["validate", p(&bad)]), 1);
    // input untouched
    assert_eq!(fs::read_to_string(&ds).unwrap(), text);
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(argbind(&[]), 2);
    assert_eq!(argbind(&["generate", "--dataset", "d99", "--out", "x"]), 2);
    assert_eq!(argbind(&["score-fol", "a", "b", "--policy", "fuzzy"]), 2);
    assert_eq!(argbind(&["run", "--mode", "live"]), 2);
    assert_eq!(argbind(&["validate", "/nonexistent/d.jsonl"]), 1);
    assert_eq!(argbind(&["--help"]), 0);
    // D21 has three question pairs per instance, so an odd count cannot balance
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(argbind(&["generate", "--dataset", "d21", "--count", "3", "--out", p(&dir.path().join("x"))]), 2);
    assert_eq!(argbind(&["generate", "--dataset", "d11", "--count", "3", "--out", p(&dir.path().join("y"))]), 0);
}

#[test]
fn oracle_pipeline_scores_100_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    for d in ["d11", "dand", "d32"] {
        let ds = dir.path().join(format!("{d}.jsonl"));
        let qa = dir.path().join(format!("{d}-qa.jsonl"));
        let fol = dir.path().join(format!("{d}-fol.jsonl"));
        let out = dir.path().join(format!("out-{d}"));
        assert_eq!(argbind(&["generate", "--dataset", d, "--seed", "2", "--count", "60", "--out", p(&ds)]), 0);
        assert_eq!(argbind(&["oracle", p(&ds), "--task", "qa", "--out", p(&qa)]), 0);
        assert_eq!(argbind(&["oracle", p(&ds), "--task", "fol", "--out", p(&fol)]), 0);
        assert_eq!(argbind(&["score-qa", p(&ds), p(&qa), "--run-name", "oracle", "--out", p(&out.join("qa"))]), 0);
        assert_eq!(argbind(&["score-fol", p(&ds), p(&fol), "--run-name", "oracle", "--out", p(&out.join("fol"))]), 0);

        let qa_report = fs::read_to_string(out.join("qa/report.md")).unwrap();
        assert!(qa_report.contains("100.0 / 100.0 / 100.0"), "{qa_report}");
        let fol_report = fs::read_to_string(out.join("fol/report.md")).unwrap();
        assert!(fol_report.contains("0/60"), "{fol_report}");

        let merged = dir.path().join(format!("{d}.csv"));
        let metrics = [out.join("qa/metrics.json"), out.join("fol/metrics.json")];
        assert_eq!(argbind(&["report", p(&metrics[0]), p(&metrics[1]), "--format", "csv", "--out", p(&merged)]), 0);
        let csv = fs::read_to_string(&merged).unwrap();
        assert_eq!(csv.lines().count(), 2, "{csv}");
    }
}

#[test]
fn scoring_is_deterministic_and_rejects_unknown_ids() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("d.jsonl");
    let qa = dir.path().join("qa.jsonl");
    assert_eq!(argbind(&["generate", "--dataset", "d22", "--seed", "4", "--count", "30", "--out", p(&ds)]), 0);
    assert_eq!(argbind(&["oracle", p(&ds), "--task", "qa", "--out", p(&qa)]), 0);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(argbind(&["score-qa", p(&ds), p(&qa), "--out", p(out)]), 0);
    }
    for f in ["metrics.json", "report.md"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }

    let mut text = fs::read_to_string(&qa).unwrap();
    text.push_str("{\"question_id\":\"nope-q1\",\"answer\":\"yes\"}\n");
    let stray = dir.path().join("stray.jsonl");
    fs::write(&stray, text).unwrap();
    assert_eq!(argbind(&["score-qa", p(&ds), p(&stray)]), 1);
}

#[test]
fn live_run_writes_generations_predictions_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("d.jsonl");
    assert_eq!(argbind(&["generate", "--dataset", "d11", "--seed", "5", "--count", "20", "--out", p(&ds)]), 0);
    let server = FakeServer::start(|_, _| Reply::text("Yes, it was."));
    let out = dir.path().join("run");
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "mode = \"live\"\ntask = \"qa\"\ndataset = \"d.jsonl\"\nout_dir = \"run\"\n\n[endpoint]\nbase_url = \"{}\"\nmodel = \"always-yes\"\nbackoff_ms = 1\n",
            server.url
        ),
    )
    .unwrap();
    assert_eq!(argbind(&["run", "--config", p(&cfg)]), 0);
    assert_eq!(server.hits(), 80);
    for f in ["prompts.jsonl", "generations.log.jsonl", "generations.jsonl", "predictions.jsonl", "summary.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let preds = fs::read_to_string(out.join("predictions.jsonl")).unwrap();
    assert!(preds.lines().all(|l| l.ends_with("\"answer\":\"yes\"}")));
    // always-yes is right on exactly the balanced half
    let report = fs::read_to_string(out.join("report.md")).unwrap();
    assert!(report.contains("always-yes") && report.contains("50.0 / 50.0 / 50.0"), "{report}");

    // rerun resumes: no new requests, same outputs
    let before = fs::read(out.join("report.md")).unwrap();
    assert_eq!(argbind(&["run", "--config", p(&cfg)]), 0);
    assert_eq!(server.hits(), 80);
    assert_eq!(fs::read(out.join("report.md")).unwrap(), before);
}

#[test]
fn live_run_with_auth_failure_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("d.jsonl");
    assert_eq!(argbind(&["generate", "--dataset", "d11", "--count", "4", "--out", p(&ds)]), 0);
    let server = FakeServer::start(|_, _| Reply::status(401));
    let out = dir.path().join("run");
    let code = argbind(&[
        "run",
        "--mode",
        "live",
        "--task",
        "fol",
        "--dataset",
        p(&ds),
        "--out-dir",
        p(&out),
        "--base-url",
        &server.url,
        "--model",
        "m",
    ]);
    assert_eq!(code, 1);
    assert_eq!(server.hits(), 4);
    // every instance is missing, hence wrong
    let report = fs::read_to_string(out.join("report.md")).unwrap();
    assert!(report.contains("0/4"), "{report}");
    assert_eq!(fs::read_to_string(out.join("predictions.jsonl")).unwrap(), "");
}

#[test]
fn offline_run_scores_existing_generations() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("d.jsonl");
    assert_eq!(argbind(&["generate", "--dataset", "d11", "--seed", "6", "--count", "10", "--out", p(&ds)]), 0);
    let prompts = dir.path().join("prompts.jsonl");
    assert_eq!(argbind(&["prompts", p(&ds), "--task", "fol", "--out", p(&prompts)]), 0);
    // generations from the gold FOL, one instance left out
    let text = fs::read_to_string(&ds).unwrap();
    let gens: String = text
        .lines()
        .skip(1)
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            format!("{}\n", serde_json::json!({"id": v["instance_id"], "generation": format!(" {}\n", v["gold_fol"].as_str().unwrap())}))
        })
        .collect();
    let gen_path = dir.path().join("gens.jsonl");
    fs::write(&gen_path, gens).unwrap();
    let out = dir.path().join("off");
    let code = argbind(&[
        "run",
        "--mode",
        "offline",
        "--task",
        "fol",
        "--dataset",
        p(&ds),
        "--generations",
        p(&gen_path),
        "--out-dir",
        p(&out),
        "--run-name",
        "gold",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    let fol = &metrics["datasets"]["D11"]["fol"];
    assert_eq!(fol["accuracy"]["hits"], 9);
    assert_eq!(fol["accuracy"]["total"], 10);
    assert_eq!(fol["missing"], 1);
    assert!(out.join("report.csv").exists());
}
