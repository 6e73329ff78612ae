//! Query-aware context reduction.
//!
//! Sentences of a retrieved context are ranked against the query, the top-k
//! are kept verbatim and every run of the remaining sentences is compressed by
//! dropping its least informative tokens. The output keeps the original
//! sentence order.

mod compress;
mod rank;
mod segment;
mod selfinfo;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::Embedder;
use crate::error::{Error, Result};
use crate::llm::Tokenizer;

pub use compress::{reduce_fragment, stitch, token_budget, token_ratio, Fragment, ReducedContext};
pub use rank::{rank_sentences, select_top_k, top_k_count, RankedSentence, MAX_THRESHOLD};
pub use segment::{segment_sentences, SentenceSegmenter, DEFAULT_ABBREVIATIONS};
pub use selfinfo::{SelfInformation, UnigramModel};

pub const DEFAULT_RATE: f64 = 0.8;

/// Ordered sentences assembled for one query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Context {
    pub query_id: String,
    pub sentences: Vec<String>,
    pub source_chunk_ids: Vec<String>,
}

impl Context {
    pub fn new(query_id: impl Into<String>, sentences: Vec<String>) -> Self {
        Self {
            query_id: query_id.into(),
            sentences,
            source_chunk_ids: Vec::new(),
        }
    }

    pub fn with_query_id(mut self, query_id: impl Into<String>) -> Self {
        self.query_id = query_id.into();
        self
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Sentences joined by single spaces.
    pub fn text(&self) -> String {
        self.sentences.join(" ")
    }
}

/// The reduction stack: sentence embedder, tokenizer, self-information
/// scorer and the compression rate for non-kept sentences.
#[derive(Clone)]
pub struct Reducer {
    embedder: Arc<dyn Embedder>,
    tokenizer: Arc<dyn Tokenizer>,
    information: Arc<dyn SelfInformation>,
    rate: f64,
}

impl Reducer {
    pub fn new(
        embedder: Arc<dyn Embedder>,
        tokenizer: Arc<dyn Tokenizer>,
        information: Arc<dyn SelfInformation>,
        rate: f64,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidRate(rate));
        }
        Ok(Self {
            embedder,
            tokenizer,
            information,
            rate,
        })
    }

    pub fn embedder(&self) -> &dyn Embedder {
        self.embedder.as_ref()
    }

    pub fn tokenizer(&self) -> &dyn Tokenizer {
        self.tokenizer.as_ref()
    }

    pub fn information(&self) -> &dyn SelfInformation {
        self.information.as_ref()
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn rank(&self, context: &Context, query_embedding: &[f64]) -> Result<Vec<RankedSentence>> {
        rank_sentences(&context.sentences, query_embedding, self.embedder.as_ref())
    }

    pub fn stitch(&self, context: &Context, kept: &BTreeSet<usize>) -> Result<ReducedContext> {
        stitch(
            context,
            kept,
            self.rate,
            self.information.as_ref(),
            self.tokenizer.as_ref(),
        )
    }

    /// Keeps the top-k sentences for `theta` from an existing ranking.
    pub fn reduce_ranked(
        &self,
        context: &Context,
        ranked: &[RankedSentence],
        theta: f64,
    ) -> Result<ReducedContext> {
        let kept = select_top_k(ranked, theta, context.len())?;
        self.stitch(context, &kept.into_iter().collect())
    }

    pub fn reduce(
        &self,
        context: &Context,
        query_embedding: &[f64],
        theta: f64,
    ) -> Result<ReducedContext> {
        let ranked = self.rank(context, query_embedding)?;
        self.reduce_ranked(context, &ranked, theta)
    }

    /// Compresses every sentence at `rate` with nothing kept verbatim.
    pub fn compress_all(&self, context: &Context, rate: f64) -> Result<ReducedContext> {
        stitch(
            context,
            &BTreeSet::new(),
            rate,
            self.information.as_ref(),
            self.tokenizer.as_ref(),
        )
    }
}
