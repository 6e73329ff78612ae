//! Compare reduction methods on the fixture question set and print the
//! report table.
//!
//! cargo run --example evaluate_methods

use std::path::Path;

use leanctx::cli::{cmd_eval, cmd_ingest, cmd_train, Runtime};
use leanctx::config::AppConfig;
use leanctx::eval::parse_methods;

fn main() -> leanctx::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let rt = Runtime::from_config(AppConfig::load(fixtures.join("config.json"))?)?;
    let out = std::env::temp_dir().join("leanctx-eval-example");
    std::fs::create_dir_all(&out).map_err(|e| leanctx::Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let (store, agent) = (out.join("store.json"), out.join("agent.json"));
    cmd_ingest(&rt, &fixtures.join("corpus.jsonl"), &store)?;
    cmd_train(
        &rt,
        &store,
        &fixtures.join("qa_train.jsonl"),
        &agent,
        None,
        None,
    )?;

    let methods = parse_methods(
        "fixed_k:0.1,fixed_k:0.2,adaptive_k,sc_only:0.5,cqsumdp,cascade:0.1:external:lead3",
    )?;
    let report = cmd_eval(
        &rt,
        &store,
        Some(&agent),
        &fixtures.join("qa_test.jsonl"),
        &methods,
        &out.join("report.json"),
        None,
    )?;
    print!("{}", report.to_text());
    println!("\nreports written to {}", out.display());
    Ok(())
}
