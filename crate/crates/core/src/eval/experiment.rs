use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{assemble_context, VectorStore};
use crate::error::{Error, Result};
use crate::jsonl::read_jsonl;
use crate::llm::{cost_savings, round_to, CompletionProvider, CompletionRecord, PromptTemplate};
use crate::reducer::{select_top_k, token_ratio, Context, Reducer, SentenceSegmenter};
use crate::rl::Agent;

use super::{rouge_l, rouge_n, KMode, Method, RougeScore, Summarizer};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaPair {
    pub query_id: String,
    pub doc_id: String,
    pub question: String,
    pub reference_answer: String,
}

pub fn read_qa_pairs(path: impl AsRef<Path>) -> Result<Vec<QaPair>> {
    let path = path.as_ref();
    let pairs: Vec<QaPair> = read_jsonl(path)?;
    for (i, p) in pairs.iter().enumerate() {
        if p.question.trim().is_empty() || p.reference_answer.trim().is_empty() {
            return Err(Error::MalformedLine {
                path: path.to_path_buf(),
                line: i + 1,
                message: "question and reference_answer must be non-empty".into(),
            });
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub query_id: String,
    pub method: String,
    pub answer: String,
    pub rouge1: RougeScore,
    pub rouge2: RougeScore,
    pub rouge_l: RougeScore,
    pub completion: CompletionRecord,
    pub tau: f64,
    /// Threshold used when the method keeps top-k sentences.
    pub theta: Option<f64>,
    pub savings_vs_original: Option<f64>,
    pub error: Option<String>,
}

impl EvalRecord {
    fn failed(pair: &QaPair, method: &Method, error: &Error) -> Self {
        Self {
            query_id: pair.query_id.clone(),
            method: method.to_string(),
            answer: String::new(),
            rouge1: RougeScore::default(),
            rouge2: RougeScore::default(),
            rouge_l: RougeScore::default(),
            completion: CompletionRecord::default(),
            tau: 0.0,
            theta: None,
            savings_vs_original: None,
            error: Some(error.to_string()),
        }
    }

    pub fn total_tokens(&self) -> usize {
        self.completion.total_tokens()
    }
}

/// Everything a method needs to answer one question.
pub struct EvalEnv<'a> {
    pub store: &'a VectorStore,
    pub reducer: &'a Reducer,
    pub segmenter: &'a SentenceSegmenter,
    pub llm: &'a dyn CompletionProvider,
    pub agent: Option<&'a Agent>,
    pub summarizers: BTreeMap<String, Arc<dyn Summarizer>>,
    pub n_chunks: usize,
}

impl<'a> EvalEnv<'a> {
    pub fn new(
        store: &'a VectorStore,
        reducer: &'a Reducer,
        segmenter: &'a SentenceSegmenter,
        llm: &'a dyn CompletionProvider,
        n_chunks: usize,
    ) -> Self {
        Self {
            store,
            reducer,
            segmenter,
            llm,
            agent: None,
            summarizers: BTreeMap::new(),
            n_chunks,
        }
    }

    pub fn with_agent(mut self, agent: &'a Agent) -> Self {
        self.agent = Some(agent);
        self
    }

    pub fn with_summarizer(
        mut self,
        name: impl Into<String>,
        summarizer: Arc<dyn Summarizer>,
    ) -> Self {
        self.summarizers.insert(name.into(), summarizer);
        self
    }

    fn agent(&self) -> Result<&'a Agent> {
        self.agent
            .ok_or_else(|| Error::InvalidConfig("adaptive methods need a trained agent".into()))
    }
}

/// Text handed to the QA prompt plus the tokens spent producing it.
struct Reduction {
    text: String,
    summary_tokens: usize,
    theta: Option<f64>,
}

struct Prepared {
    context: Context,
    query_embedding: Vec<f64>,
    context_embedding: Option<Vec<f64>>,
}

impl Prepared {
    fn new(pair: &QaPair, env: &EvalEnv<'_>) -> Result<Self> {
        let query_embedding = env.reducer.embedder().embed(&pair.question)?;
        let context = assemble_context(env.store, &query_embedding, env.n_chunks, env.segmenter)?
            .with_query_id(pair.query_id.clone());
        Ok(Self {
            context,
            query_embedding,
            context_embedding: None,
        })
    }

    fn adaptive_theta(&mut self, env: &EvalEnv<'_>) -> Result<f64> {
        let agent = env.agent()?;
        if self.context_embedding.is_none() {
            self.context_embedding = Some(env.reducer.embedder().embed(&self.context.text())?);
        }
        let state = agent.get_state(
            self.context_embedding.as_ref().unwrap(),
            &self.query_embedding,
        )?;
        agent.policy(state)
    }
}

fn llm_reduction(
    env: &EvalEnv<'_>,
    template: PromptTemplate,
    context: &str,
    query: Option<&str>,
) -> Result<Reduction> {
    let record = env.llm.complete(&template.render(context, query)?)?;
    Ok(Reduction {
        summary_tokens: record.prompt_tokens + record.completion_tokens,
        text: record.answer,
        theta: None,
    })
}

fn reduce(
    method: &Method,
    pair: &QaPair,
    prep: &mut Prepared,
    env: &EvalEnv<'_>,
) -> Result<Reduction> {
    let plain = |text: String, theta: Option<f64>| Reduction {
        text,
        summary_tokens: 0,
        theta,
    };
    let query = pair.question.as_str();
    Ok(match method {
        Method::Original => plain(prep.context.text(), None),
        Method::FixedK(theta) => {
            let r = env
                .reducer
                .reduce(&prep.context, &prep.query_embedding, *theta)?;
            plain(r.text, Some(*theta))
        }
        Method::AdaptiveK => {
            let theta = prep.adaptive_theta(env)?;
            let r = env
                .reducer
                .reduce(&prep.context, &prep.query_embedding, theta)?;
            plain(r.text, Some(theta))
        }
        Method::ScOnly(rate) => plain(env.reducer.compress_all(&prep.context, *rate)?.text, None),
        Method::Cqsumdp => llm_reduction(
            env,
            PromptTemplate::Cqsumdp,
            &prep.context.text(),
            Some(query),
        )?,
        Method::SemanticCompression => llm_reduction(
            env,
            PromptTemplate::SemanticCompression,
            &prep.context.text(),
            None,
        )?,
        Method::External(name) => {
            let summarizer = env.summarizers.get(name).ok_or_else(|| {
                Error::InvalidConfig(format!("no summarizer registered as `{name}`"))
            })?;
            plain(
                summarizer.summarize(&prep.context.text(), Some(query))?,
                None,
            )
        }
        Method::Cascade { base, k } => {
            let theta = match k {
                KMode::Fixed(t) => *t,
                KMode::Adaptive => prep.adaptive_theta(env)?,
            };
            let ranked = env.reducer.rank(&prep.context, &prep.query_embedding)?;
            let kept = select_top_k(&ranked, theta, prep.context.len())?;
            let block = kept
                .iter()
                .map(|&i| prep.context.sentences[i].as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let base = reduce(base, pair, prep, env)?;
            let text = match (block.is_empty(), base.text.is_empty()) {
                (true, _) => base.text,
                (false, true) => block,
                (false, false) => format!("{block}\n\n{}", base.text),
            };
            Reduction {
                text,
                summary_tokens: base.summary_tokens,
                theta: Some(theta),
            }
        }
    })
}

fn try_run(
    method: &Method,
    pair: &QaPair,
    prep: &mut Prepared,
    env: &EvalEnv<'_>,
) -> Result<EvalRecord> {
    let reduction = reduce(method, pair, prep, env)?;
    let tokenizer = env.reducer.tokenizer();
    let tau = token_ratio(
        tokenizer.count_tokens(&reduction.text),
        tokenizer.count_tokens(&prep.context.text()),
    );
    let prompt = PromptTemplate::Qa.render(&reduction.text, Some(&pair.question))?;
    let mut completion = env.llm.complete(&prompt)?;
    completion.summary_tokens = reduction.summary_tokens;
    let answer = completion.answer.clone();
    Ok(EvalRecord {
        query_id: pair.query_id.clone(),
        method: method.to_string(),
        rouge1: rouge_n(&answer, &pair.reference_answer, 1),
        rouge2: rouge_n(&answer, &pair.reference_answer, 2),
        rouge_l: rouge_l(&answer, &pair.reference_answer),
        answer,
        completion,
        tau,
        theta: reduction.theta,
        savings_vs_original: matches!(method, Method::Original).then_some(0.0),
        error: None,
    })
}

/// Runs one method on one question. Failures are captured in the record's
/// `error` field rather than returned.
pub fn run_method(method: &Method, pair: &QaPair, env: &EvalEnv<'_>) -> EvalRecord {
    let result =
        Prepared::new(pair, env).and_then(|mut prep| try_run(method, pair, &mut prep, env));
    result.unwrap_or_else(|e| EvalRecord::failed(pair, method, &e))
}

fn run_pair(methods: &[Method], pair: &QaPair, env: &EvalEnv<'_>) -> Vec<EvalRecord> {
    let mut prep = match Prepared::new(pair, env) {
        Ok(p) => p,
        Err(e) => {
            return methods
                .iter()
                .map(|m| EvalRecord::failed(pair, m, &e))
                .collect()
        }
    };
    let mut records: Vec<EvalRecord> = methods
        .iter()
        .map(|m| {
            try_run(m, pair, &mut prep, env).unwrap_or_else(|e| EvalRecord::failed(pair, m, &e))
        })
        .collect();
    let baseline = records
        .iter()
        .find(|r| r.method == Method::Original.to_string() && r.error.is_none())
        .map(|r| r.total_tokens() as u64);
    if let Some(base) = baseline {
        for r in records.iter_mut().filter(|r| r.error.is_none()) {
            r.savings_vs_original = cost_savings(base, r.total_tokens() as u64).ok();
        }
    }
    records
}

/// Per-method averages shaped like a results table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub queries: usize,
    pub failures: usize,
    pub avg_total_tokens: u64,
    pub avg_prompt_tokens: u64,
    pub avg_summary_tokens: u64,
    pub avg_completion_tokens: u64,
    pub mean_total_tokens: f64,
    pub mean_tau: f64,
    pub rouge1: f64,
    pub rouge2: f64,
    pub rouge_l: f64,
    pub cost_savings: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n_chunks: usize,
    pub summaries: Vec<MethodSummary>,
    pub records: Vec<EvalRecord>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Half-up rounding to an integer token count.
fn round_tokens(x: f64) -> u64 {
    (x + 0.5).floor() as u64
}

/// Averages successful records per method, in `methods` order. Savings
/// compare rounded average totals against the `original` row.
pub fn summarize(records: &[EvalRecord], methods: &[String]) -> Vec<MethodSummary> {
    let mut rows: Vec<MethodSummary> = methods
        .iter()
        .map(|method| {
            let all: Vec<&EvalRecord> = records.iter().filter(|r| &r.method == method).collect();
            let ok: Vec<&EvalRecord> = all.iter().copied().filter(|r| r.error.is_none()).collect();
            let avg = |f: &dyn Fn(&EvalRecord) -> f64| mean(ok.iter().map(|r| f(r)));
            MethodSummary {
                method: method.clone(),
                queries: all.len(),
                failures: all.len() - ok.len(),
                avg_total_tokens: round_tokens(avg(&|r| r.total_tokens() as f64)),
                avg_prompt_tokens: round_tokens(avg(&|r| r.completion.prompt_tokens as f64)),
                avg_summary_tokens: round_tokens(avg(&|r| r.completion.summary_tokens as f64)),
                avg_completion_tokens: round_tokens(avg(&|r| {
                    r.completion.completion_tokens as f64
                })),
                mean_total_tokens: avg(&|r| r.total_tokens() as f64),
                mean_tau: avg(&|r| r.tau),
                rouge1: round_to(avg(&|r| r.rouge1.f1), 4),
                rouge2: round_to(avg(&|r| r.rouge2.f1), 4),
                rouge_l: round_to(avg(&|r| r.rouge_l.f1), 4),
                cost_savings: None,
            }
        })
        .collect();
    let original = Method::Original.to_string();
    if let Some(base) = rows
        .iter()
        .find(|r| r.method == original && r.queries > r.failures)
    {
        let base = base.avg_total_tokens;
        for row in rows.iter_mut().filter(|r| r.queries > r.failures) {
            row.cost_savings = cost_savings(base, row.avg_total_tokens).ok();
        }
    }
    rows
}

/// Evaluates every method on every question. `original` is added as the
/// first method when missing. Questions are processed in parallel; the
/// report does not depend on completion order.
pub fn run_experiment(
    dataset: &[QaPair],
    methods: &[Method],
    env: &EvalEnv<'_>,
) -> Result<ExperimentReport> {
    if dataset.is_empty() {
        return Err(Error::InvalidConfig("dataset is empty".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidConfig("no methods to evaluate".into()));
    }
    let mut all = Vec::with_capacity(methods.len() + 1);
    if !methods.contains(&Method::Original) {
        all.push(Method::Original);
    }
    let mut seen = BTreeSet::new();
    for m in methods {
        m.validate()?;
        if m.needs_agent() && env.agent.is_none() {
            return Err(Error::InvalidConfig(format!(
                "method `{m}` needs a trained agent"
            )));
        }
        if seen.insert(m.to_string()) {
            all.push(m.clone());
        }
    }

    let records: Vec<EvalRecord> = dataset
        .par_iter()
        .map(|pair| run_pair(&all, pair, env))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let names: Vec<String> = all.iter().map(Method::to_string).collect();
    Ok(ExperimentReport {
        n_chunks: env.n_chunks,
        summaries: summarize(&records, &names),
        records,
    })
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let header = [
            "Method",
            "Total",
            "Prompt",
            "Summary",
            "Completion",
            "ROUGE-1",
            "ROUGE-2",
            "ROUGE-L",
            "Savings(%)",
        ];
        let rows: Vec<[String; 9]> = self
            .summaries
            .iter()
            .map(|s| {
                [
                    s.method.clone(),
                    s.avg_total_tokens.to_string(),
                    s.avg_prompt_tokens.to_string(),
                    s.avg_summary_tokens.to_string(),
                    s.avg_completion_tokens.to_string(),
                    format!("{:.4}", s.rouge1),
                    format!("{:.4}", s.rouge2),
                    format!("{:.4}", s.rouge_l),
                    s.cost_savings.map_or("-".into(), |v| format!("{v:.2}")),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &mut dyn Iterator<Item = &str>| {
            let parts: Vec<String> = cells
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| {
                    if i == 0 {
                        format!("{c:<w$}")
                    } else {
                        format!("{c:>w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut header.iter().copied());
        line(
            &mut widths
                .iter()
                .map(|w| "-".repeat(*w))
                .collect::<Vec<_>>()
                .iter()
                .map(String::as_str),
        );
        for row in &rows {
            line(&mut row.iter().map(String::as_str));
        }
        let failures: usize = self.summaries.iter().map(|s| s.failures).sum();
        if failures > 0 {
            let _ = writeln!(
                out,
                "\n{failures} query evaluations failed; see the JSON report."
            );
        }
        out
    }
}
