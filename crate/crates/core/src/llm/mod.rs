//! LLM access: prompt templates, completion providers, tokenization and
//! token/cost accounting.

mod cost;
pub mod http;
mod mock;
mod prompt;
mod tokenizer;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use cost::{cost, cost_savings, round_to, CostModel};
pub use http::{OpenAiClient, OpenAiConfig, OpenAiProvider, API_KEY_ENV};
pub use mock::MockProvider;
pub use prompt::{render_prompt, ParsedPrompt, PromptTemplate};
pub use tokenizer::{count_tokens, words, RuleTokenizer, TokenSpan, Tokenizer};

/// Token accounting for one question-answering call.
///
/// `summary_tokens` holds the prompt and completion tokens of any LLM call
/// made to reduce the context before the question was asked.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub prompt_tokens: usize,
    pub completion_tokens: usize,
    pub summary_tokens: usize,
    pub answer: String,
}

impl CompletionRecord {
    pub fn total_tokens(&self) -> usize {
        self.prompt_tokens + self.completion_tokens + self.summary_tokens
    }
}

pub trait CompletionProvider: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<CompletionRecord>;
}

impl<P: CompletionProvider + ?Sized> CompletionProvider for std::sync::Arc<P> {
    fn complete(&self, prompt: &str) -> Result<CompletionRecord> {
        (**self).complete(prompt)
    }
}

impl<P: CompletionProvider + ?Sized> CompletionProvider for &P {
    fn complete(&self, prompt: &str) -> Result<CompletionRecord> {
        (**self).complete(prompt)
    }
}

pub fn complete(provider: &dyn CompletionProvider, prompt: &str) -> Result<CompletionRecord> {
    provider.complete(prompt)
}
