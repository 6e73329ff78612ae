use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use leanctx::cli::{self, Runtime};
use leanctx::config::AppConfig;
use leanctx::eval::parse_methods;
use leanctx::Error;

#[derive(Parser)]
#[command(
    name = "leanctx",
    version,
    about = "Query-aware context reduction for RAG question answering"
)]
struct Cli {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chunk, embed and index a JSONL corpus.
    Ingest {
        corpus: PathBuf,
        #[arg(long)]
        store: PathBuf,
    },
    /// Train the threshold agent on JSONL QA pairs.
    Train {
        qa_train: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        agent: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_chunks: Option<usize>,
    },
    /// Answer one question with a reduced context.
    Ask {
        question: String,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        agent: PathBuf,
        #[arg(long)]
        n_chunks: Option<usize>,
    },
    /// Compare reduction methods over a JSONL QA set.
    Eval {
        qa_test: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        methods: String,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        agent: Option<PathBuf>,
        #[arg(long)]
        n_chunks: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    let config = match &cli.config {
        Some(path) => AppConfig::load(path)?,
        None => AppConfig::default(),
    };
    let rt = Runtime::from_config(config)?;
    match cli.command {
        Command::Ingest { corpus, store } => {
            let s = cli::cmd_ingest(&rt, &corpus, &store)?;
            println!(
                "ingested {} documents into {} chunks -> {}",
                s.documents,
                s.chunks,
                store.display()
            );
        }
        Command::Train {
            qa_train,
            store,
            agent,
            seed,
            n_chunks,
        } => {
            let r = cli::cmd_train(&rt, &store, &qa_train, &agent, seed, n_chunks)?;
            println!("samples: {}", r.samples);
            println!("actions: {}", r.actions);
            println!("states: {}", r.states);
            println!("exploration calls: {}", r.exploration_calls);
            println!("full-context calls: {}", r.full_context_calls);
            println!("llm calls: {}", r.exploration_calls + r.full_context_calls);
            println!("state visits: {:?}", r.state_visits);
            println!("agent -> {}", agent.display());
        }
        Command::Ask {
            question,
            store,
            agent,
            n_chunks,
        } => {
            print!(
                "{}",
                cli::cmd_ask(&rt, &store, &agent, &question, n_chunks)?.render()
            );
        }
        Command::Eval {
            qa_test,
            store,
            methods,
            report,
            agent,
            n_chunks,
        } => {
            let methods = parse_methods(&methods)?;
            let r = cli::cmd_eval(
                &rt,
                &store,
                agent.as_deref(),
                &qa_test,
                &methods,
                &report,
                n_chunks,
            )?;
            print!("{}", r.to_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
