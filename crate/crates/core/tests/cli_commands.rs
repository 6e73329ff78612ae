mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use leanctx::cli::{
    cmd_ask, cmd_eval, cmd_ingest, cmd_train, exit_code, text_report_path, Runtime,
};
use leanctx::config::AppConfig;
use leanctx::corpus::VectorStore;
use leanctx::eval::{parse_methods, ExperimentReport};
use leanctx::llm::MockProvider;
use leanctx::rl::Agent;
use leanctx::Error;
use tempfile::TempDir;

use common::{fixture_config, fixtures};

struct Trained {
    dir: TempDir,
    rt: Runtime,
}

impl Trained {
    fn store(&self) -> PathBuf {
        self.dir.path().join("store.json")
    }
    fn agent(&self) -> PathBuf {
        self.dir.path().join("agent.json")
    }
}

fn trained() -> Trained {
    let dir = tempfile::tempdir().unwrap();
    let rt = Runtime::from_config(fixture_config()).unwrap();
    let store = dir.path().join("store.json");
    cmd_ingest(&rt, &fixtures().join("corpus.jsonl"), &store).unwrap();
    cmd_train(
        &rt,
        &store,
        &fixtures().join("qa_train.jsonl"),
        &dir.path().join("agent.json"),
        None,
        None,
    )
    .unwrap();
    Trained { dir, rt }
}

#[test]
fn ingest_reports_and_persists() {
    let dir = tempfile::tempdir().unwrap();
    let rt = Runtime::from_config(fixture_config()).unwrap();
    let out = dir.path().join("s.json");
    let summary = cmd_ingest(&rt, &fixtures().join("corpus.jsonl"), &out).unwrap();
    assert_eq!((summary.documents, summary.chunks), (10, 10));
    let store = VectorStore::load(&out).unwrap();
    assert_eq!(store.len(), 10);
    assert_eq!(store.dimension(), 64);
}

#[test]
fn ingest_rejects_bad_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let rt = Runtime::from_config(AppConfig::default()).unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    };
    let out = dir.path().join("s.json");

    let dup = write(
        "dup.jsonl",
        "{\"doc_id\":\"a\",\"text\":\"x\"}\n{\"doc_id\":\"a\",\"text\":\"y\"}\n",
    );
    assert!(cmd_ingest(&rt, &dup, &out).is_err());

    let broken = write(
        "broken.jsonl",
        "{\"doc_id\":\"a\",\"text\":\"x\"}\n\n{oops\n",
    );
    match cmd_ingest(&rt, &broken, &out).unwrap_err() {
        Error::MalformedLine { line, .. } => assert_eq!(line, 3),
        e => panic!("unexpected {e:?}"),
    }

    let empty = write("empty.jsonl", "\n");
    assert!(matches!(
        cmd_ingest(&rt, &empty, &out),
        Err(Error::InvalidConfig(_))
    ));
    assert!(matches!(
        cmd_ingest(&rt, &dir.path().join("missing"), &out),
        Err(Error::Io { .. })
    ));
    assert!(!out.exists());
}

#[test]
fn training_is_deterministic_for_a_seed() {
    let t = trained();
    let again = t.dir.path().join("again.json");
    cmd_train(
        &t.rt,
        &t.store(),
        &fixtures().join("qa_train.jsonl"),
        &again,
        None,
        None,
    )
    .unwrap();
    assert_eq!(fs::read(t.agent()).unwrap(), fs::read(&again).unwrap());

    let agent = Agent::load(t.agent()).unwrap();
    assert_eq!(agent.actions().len(), 9);
    assert_eq!(agent.q_table().states(), 8);
}

#[test]
fn ask_is_deterministic_and_reports_stats() {
    let t = trained();
    let q = "Who restored the clock tower in Dunmarr?";
    let a = cmd_ask(&t.rt, &t.store(), &t.agent(), q, None).unwrap();
    let b = cmd_ask(&t.rt, &t.store(), &t.agent(), q, None).unwrap();
    assert_eq!(a.render(), b.render());
    assert_eq!(a.context_sentences, 20);
    let inf = &a.inference;
    assert!((0.0..=0.4).contains(&inf.theta));
    assert!(inf.reduced.reduced_tokens < inf.reduced.original_tokens);
    let text = a.render();
    for field in ["answer:", "theta:", "tau:", "kept sentences:"] {
        assert!(text.contains(field), "{text}");
    }
    assert!(matches!(
        cmd_ask(&t.rt, &t.store(), &t.dir.path().join("nope.json"), q, None),
        Err(Error::Io { .. })
    ));
}

fn eval(t: &Trained, methods: &str, agent: bool) -> leanctx::Result<ExperimentReport> {
    let agent = agent.then(|| t.agent());
    cmd_eval(
        &t.rt,
        &t.store(),
        agent.as_deref(),
        &fixtures().join("qa_test.jsonl"),
        &parse_methods(methods)?,
        &t.dir.path().join("report.json"),
        None,
    )
}

#[test]
fn eval_writes_json_and_table() {
    let t = trained();
    let report = eval(
        &t,
        "fixed_k:0.2,external:lead3,cascade:0.1:external:lead3,cqsumdp",
        false,
    )
    .unwrap();
    let names: Vec<&str> = report.summaries.iter().map(|s| s.method.as_str()).collect();
    assert_eq!(
        names,
        [
            "original",
            "fixed_k:0.2",
            "external:lead3",
            "cascade:0.1:external:lead3",
            "cqsumdp"
        ]
    );
    assert_eq!(report.records.len(), 100);
    assert!(report.records.iter().all(|r| r.error.is_none()));
    let cq = report
        .summaries
        .iter()
        .find(|s| s.method == "cqsumdp")
        .unwrap();
    assert!(cq.avg_summary_tokens > 0);

    let json: ExperimentReport =
        serde_json::from_slice(&fs::read(t.dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json, report);
    let table = fs::read_to_string(t.dir.path().join("report.txt")).unwrap();
    assert!(table.contains("cascade:0.1:external:lead3"));
}

#[test]
fn eval_errors() {
    let t = trained();
    assert!(matches!(
        eval(&t, "adaptive_k", false),
        Err(Error::InvalidConfig(_))
    ));
    assert!(eval(&t, "fixed_k:0.7", true).is_err());
    assert!(eval(&t, "bogus", true).is_err());

    // A summarizer that cannot run fails its records, not the experiment.
    let report = eval(&t, "external:/nonexistent/summarizer", false).unwrap();
    let failed = report
        .summaries
        .iter()
        .find(|s| s.method.starts_with("external"))
        .unwrap();
    assert_eq!(failed.failures, 20);
}

#[cfg(unix)]
#[test]
fn external_command_receives_context_and_query() {
    use std::os::unix::fs::PermissionsExt;
    let t = trained();
    let script = t.dir.path().join("first_line.sh");
    fs::write(
        &script,
        "#!/bin/sh\nprintf '%s ' \"$LEANCTX_QUERY\"\nhead -c 40\n",
    )
    .unwrap();
    fs::set_permissions(&script, fs::Permissions::from_mode(0o755)).unwrap();
    let report = eval(&t, &format!("external:{}", script.display()), false).unwrap();
    let rec = report
        .records
        .iter()
        .find(|r| r.method.starts_with("external"))
        .unwrap();
    assert!(rec.error.is_none(), "{:?}", rec.error);
}

#[test]
fn mock_calls_match_the_exploration_contract() {
    let dir = tempfile::tempdir().unwrap();
    let llm = Arc::new(MockProvider::default());
    let rt = Runtime::with_llm(fixture_config(), llm.clone()).unwrap();
    let store = dir.path().join("s.json");
    cmd_ingest(&rt, &fixtures().join("corpus.jsonl"), &store).unwrap();
    assert_eq!(llm.calls(), 0);
    let report = cmd_train(
        &rt,
        &store,
        &fixtures().join("qa_train.jsonl"),
        &dir.path().join("a.json"),
        Some(3),
        None,
    )
    .unwrap();
    assert_eq!(llm.calls(), 10 * 9 + 10);
    assert_eq!(report.q_updates, 90);
    assert_eq!(report.state_visits.iter().sum::<u64>(), 90);
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&Error::InvalidConfig("x".into())), 2);
    assert_eq!(exit_code(&Error::InvalidThreshold(0.9)), 2);
    assert_eq!(exit_code(&Error::EmptyStore), 1);
    assert_eq!(
        text_report_path(Path::new("out/r.json")),
        Path::new("out/r.txt")
    );
    assert_eq!(
        text_report_path(Path::new("r.txt")),
        Path::new("r.table.txt")
    );
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_leanctx"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn binary_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let fx = |n: &str| fixtures().join(n).to_str().unwrap().to_string();
    let config = fx("config.json");

    let out = bin(&[
        "--config",
        &config,
        "ingest",
        &fx("corpus.jsonl"),
        "--store",
        &p("s.json"),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("10 documents"));

    let out = bin(&[
        "--config",
        &config,
        "train",
        &fx("qa_train.jsonl"),
        "--store",
        &p("s.json"),
        "--agent",
        &p("a.json"),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("llm calls: 100"));

    let out = bin(&[
        "--config",
        &config,
        "ask",
        "Who built the stone bridge in Orinth?",
        "--store",
        &p("s.json"),
        "--agent",
        &p("a.json"),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("answer: "));

    let out = bin(&[
        "--config",
        &config,
        "eval",
        &fx("qa_test.jsonl"),
        "--store",
        &p("s.json"),
        "--agent",
        &p("a.json"),
        "--methods",
        "original,adaptive_k",
        "--report",
        &p("r.json"),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("r.json").exists() && dir.path().join("r.txt").exists());

    let out = bin(&[
        "--config",
        &config,
        "eval",
        &fx("qa_test.jsonl"),
        "--store",
        &p("s.json"),
        "--methods",
        "fixed_k:0.9",
        "--report",
        &p("r.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = bin(&[
        "ask",
        "q",
        "--store",
        &p("missing.json"),
        "--agent",
        &p("a.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}
