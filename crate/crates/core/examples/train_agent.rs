//! Train the adaptive-k agent on the bundled fixtures with the mock LLM, then
//! answer a question with the learned policy.
//!
//! cargo run --example train_agent

use std::path::Path;

use leanctx::cli::{cmd_ask, cmd_ingest, cmd_train, Runtime};
use leanctx::config::AppConfig;

fn main() -> leanctx::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let rt = Runtime::from_config(AppConfig::load(fixtures.join("config.json"))?)?;
    let out = std::env::temp_dir().join("leanctx-train-example");
    std::fs::create_dir_all(&out).map_err(|e| leanctx::Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let (store, agent) = (out.join("store.json"), out.join("agent.json"));

    cmd_ingest(&rt, &fixtures.join("corpus.jsonl"), &store)?;
    let report = cmd_train(
        &rt,
        &store,
        &fixtures.join("qa_train.jsonl"),
        &agent,
        None,
        None,
    )?;
    println!(
        "{} samples x {} thresholds: {} exploration + {} full-context calls",
        report.samples, report.actions, report.exploration_calls, report.full_context_calls
    );
    println!("state visits: {:?}", report.state_visits);

    let answer = cmd_ask(
        &rt,
        &store,
        &agent,
        "Who restored the clock tower in Dunmarr?",
        None,
    )?;
    println!("\n{}", answer.render());
    Ok(())
}
