//! ROUGE scoring and method comparison over a QA dataset.

mod experiment;
mod method;
mod rouge;

pub use experiment::{
    read_qa_pairs, run_experiment, run_method, summarize, EvalEnv, EvalRecord, ExperimentReport,
    MethodSummary, QaPair,
};
pub use method::{
    parse_methods, CommandSummarizer, KMode, LeadSummarizer, Method, Summarizer, METHOD_SYNTAX,
    QUERY_ENV,
};
pub use rouge::{lcs_len, rouge_l, rouge_n, rouge_tokens, RougeScore};
