//! The `ingest`, `train`, `ask` and `eval` commands as library functions.
//! The `leanctx` binary only parses arguments and prints what these return.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::config::{AppConfig, EmbedderConfig, LlmConfig};
use crate::corpus::{
    build_context, read_corpus, Embedder, HashEmbedder, HttpEmbedder, IngestSummary, VectorStore,
};
use crate::error::{Error, Result};
use crate::eval::{
    read_qa_pairs, run_experiment, CommandSummarizer, EvalEnv, ExperimentReport, LeadSummarizer,
    Method, Summarizer,
};
use crate::llm::{
    CompletionProvider, MockProvider, OpenAiClient, OpenAiProvider, RuleTokenizer, Tokenizer,
};
use crate::reducer::{Reducer, SentenceSegmenter, UnigramModel};
use crate::rl::{fit_and_train, infer, Agent, Inference, TrainingReport, TrainingSample};

/// Built-in external summarizer name usable as `external:lead3`.
pub const LEAD3: &str = "lead3";

/// Exit status for a failed command: 2 for usage/configuration problems,
/// 1 for everything else.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::InvalidConfig(_)
        | Error::InvalidThreshold(_)
        | Error::InvalidRate(_)
        | Error::TemplateArity { .. } => 2,
        _ => 1,
    }
}

/// Configured backends shared by every command.
pub struct Runtime {
    pub config: AppConfig,
    pub tokenizer: Arc<dyn Tokenizer>,
    pub embedder: Arc<dyn Embedder>,
    pub llm: Arc<dyn CompletionProvider>,
    pub segmenter: SentenceSegmenter,
}

impl Runtime {
    pub fn from_config(config: AppConfig) -> Result<Self> {
        config.validate()?;
        let tokenizer: Arc<dyn Tokenizer> = Arc::new(RuleTokenizer);
        let llm: Arc<dyn CompletionProvider> = match &config.llm {
            LlmConfig::Mock => Arc::new(MockProvider::new(tokenizer.clone())),
            LlmConfig::Http { endpoint } => Arc::new(
                OpenAiProvider::new(Arc::new(OpenAiClient::new(endpoint.clone())?))
                    .with_tokenizer(tokenizer.clone()),
            ),
        };
        Self::with_llm(config, llm)
    }

    /// Uses the given completion provider instead of the configured one.
    pub fn with_llm(config: AppConfig, llm: Arc<dyn CompletionProvider>) -> Result<Self> {
        config.validate()?;
        let embedder: Arc<dyn Embedder> = match &config.embedder {
            EmbedderConfig::Hash { dimension } => Arc::new(HashEmbedder::new(*dimension)?),
            EmbedderConfig::Http {
                dimension,
                endpoint,
            } => Arc::new(HttpEmbedder::new(
                Arc::new(OpenAiClient::new(endpoint.clone())?),
                *dimension,
            )),
        };
        Ok(Self {
            config,
            tokenizer: Arc::new(RuleTokenizer),
            embedder,
            llm,
            segmenter: SentenceSegmenter::default(),
        })
    }

    /// Reducer whose self-information model is fitted on the store's chunks.
    pub fn reducer(&self, store: &VectorStore) -> Result<Reducer> {
        let model = UnigramModel::from_texts(
            store.chunks().iter().map(|c| c.text.as_str()),
            self.tokenizer.as_ref(),
        );
        Reducer::new(
            self.embedder.clone(),
            self.tokenizer.clone(),
            Arc::new(model),
            self.config.reducer.rate,
        )
    }

    fn n_chunks(&self, n_override: Option<usize>) -> Result<usize> {
        match n_override.unwrap_or(self.config.retrieval.n_chunks) {
            0 => Err(Error::InvalidConfig("--n-chunks must be positive".into())),
            n => Ok(n),
        }
    }
}

pub fn cmd_ingest(rt: &Runtime, corpus: &Path, store_out: &Path) -> Result<IngestSummary> {
    let docs = read_corpus(corpus)?;
    if docs.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "{}: corpus has no documents",
            corpus.display()
        )));
    }
    let mut store = VectorStore::new(rt.embedder.dimension(), rt.config.store)?;
    let summary = store.ingest(&docs, rt.embedder.as_ref(), rt.tokenizer.as_ref())?;
    store.save(store_out)?;
    Ok(summary)
}

pub fn cmd_train(
    rt: &Runtime,
    store: &Path,
    qa_train: &Path,
    agent_out: &Path,
    seed: Option<u64>,
    n_chunks: Option<usize>,
) -> Result<TrainingReport> {
    let store = VectorStore::load(store)?;
    let pairs = read_qa_pairs(qa_train)?;
    if pairs.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "{}: no training pairs",
            qa_train.display()
        )));
    }
    let n = rt.n_chunks(n_chunks)?;
    let reducer = rt.reducer(&store)?;
    let samples = pairs
        .iter()
        .map(|p| {
            let context =
                build_context(&store, rt.embedder.as_ref(), &rt.segmenter, &p.question, n)?
                    .with_query_id(&p.query_id);
            Ok(TrainingSample {
                query: p.question.clone(),
                reference_answer: p.reference_answer.clone(),
                context,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut config = rt.config.rl.train_config()?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let (agent, report) = fit_and_train(&config, &samples, rt.llm.as_ref(), &reducer)?;
    agent.save(agent_out)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct AskOutcome {
    pub question: String,
    pub context_sentences: usize,
    pub inference: Inference,
}

impl AskOutcome {
    pub fn render(&self) -> String {
        let inf = &self.inference;
        let rec = &inf.completion;
        let mut out = String::new();
        let _ = writeln!(out, "answer: {}", rec.answer);
        let _ = writeln!(out, "state: {}", inf.state);
        let _ = writeln!(out, "theta: {}", inf.theta);
        let _ = writeln!(
            out,
            "kept sentences: {} of {}",
            inf.reduced.kept_indices.len(),
            self.context_sentences
        );
        let _ = writeln!(out, "context tokens T: {}", inf.reduced.original_tokens);
        let _ = writeln!(out, "reduced tokens t: {}", inf.reduced.reduced_tokens);
        let _ = writeln!(out, "tau: {:.4}", inf.reduced.tau);
        let _ = writeln!(
            out,
            "prompt/completion/total tokens: {}/{}/{}",
            rec.prompt_tokens,
            rec.completion_tokens,
            rec.total_tokens()
        );
        out
    }
}

pub fn cmd_ask(
    rt: &Runtime,
    store: &Path,
    agent: &Path,
    question: &str,
    n_chunks: Option<usize>,
) -> Result<AskOutcome> {
    let store = VectorStore::load(store)?;
    let agent = Agent::load(agent)?;
    let reducer = rt.reducer(&store)?;
    let context = build_context(
        &store,
        rt.embedder.as_ref(),
        &rt.segmenter,
        question,
        rt.n_chunks(n_chunks)?,
    )?;
    let inference = infer(&agent, question, &context, rt.llm.as_ref(), &reducer)?;
    Ok(AskOutcome {
        question: question.to_string(),
        context_sentences: context.len(),
        inference,
    })
}

/// `lead3` is built in; any other name is run as an executable.
fn summarizer_for(name: &str) -> Arc<dyn Summarizer> {
    if name == LEAD3 {
        Arc::new(LeadSummarizer::new(3))
    } else {
        Arc::new(CommandSummarizer::new(name))
    }
}

fn external_names(method: &Method, out: &mut Vec<String>) {
    match method {
        Method::External(name) => out.push(name.clone()),
        Method::Cascade { base, .. } => external_names(base, out),
        _ => {}
    }
}

/// Where the plain-text table goes next to the JSON report.
pub fn text_report_path(report: &Path) -> PathBuf {
    if report.extension().is_some_and(|e| e == "txt") {
        report.with_extension("table.txt")
    } else {
        report.with_extension("txt")
    }
}

pub fn cmd_eval(
    rt: &Runtime,
    store: &Path,
    agent: Option<&Path>,
    qa_test: &Path,
    methods: &[Method],
    report_out: &Path,
    n_chunks: Option<usize>,
) -> Result<ExperimentReport> {
    let store = VectorStore::load(store)?;
    let pairs = read_qa_pairs(qa_test)?;
    let agent = agent.map(Agent::load).transpose()?;
    let reducer = rt.reducer(&store)?;
    let mut env = EvalEnv::new(
        &store,
        &reducer,
        &rt.segmenter,
        rt.llm.as_ref(),
        rt.n_chunks(n_chunks)?,
    );
    if let Some(agent) = &agent {
        env = env.with_agent(agent);
    }
    let mut names = Vec::new();
    methods.iter().for_each(|m| external_names(m, &mut names));
    for name in names {
        env = env.with_summarizer(name.clone(), summarizer_for(&name));
    }

    let report = run_experiment(&pairs, methods, &env)?;
    fs::write(report_out, report.to_json()?).map_err(|e| Error::io(report_out, e))?;
    let text_path = text_report_path(report_out);
    fs::write(&text_path, report.to_text()).map_err(|e| Error::io(&text_path, e))?;
    Ok(report)
}
