//! Query-aware context reduction for retrieval-augmented question answering.
//!
//! A question is answered from the `N` most similar chunks of an ingested
//! corpus. Before the context reaches the LLM, the `k` sentences most similar
//! to the question are kept verbatim and everything between them is
//! compressed, cutting prompt tokens. `k` is chosen per query by a tabular
//! Q-learning agent trained with full exploration over a set of thresholds.
//!
//! Modules:
//!
//! - [`corpus`]: chunking, embedding, the vector store and context assembly
//! - [`reducer`]: sentence ranking, top-k selection, compression and stitching
//! - [`rl`]: state clustering, Q-table, reward, training and inference
//! - [`llm`]: prompt templates, providers, tokenizer and cost accounting
//! - [`eval`]: ROUGE and experiment reports
//! - [`cli`]: the `ingest`/`train`/`ask`/`eval` commands

pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod jsonl;
pub mod llm;
pub mod reducer;
pub mod rl;
pub mod vector;

pub use error::{Error, Result};
