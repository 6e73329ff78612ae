use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::reducer::SentenceSegmenter;

use super::{
    words, CompletionProvider, CompletionRecord, PromptTemplate, RuleTokenizer, Tokenizer,
};

pub const NO_ANSWER: &str = "No answer";

/// Deterministic offline stand-in for an LLM.
///
/// Contexts are split with a lenient segmenter, so a compressed fragment on
/// its own line never merges into a neighbouring kept sentence.
///
/// * QA prompts: returns the context sentence sharing the most distinct words
///   with the question (earliest wins ties; the first sentence when nothing
///   overlaps).
/// * Query-focused summary prompts: returns every sentence that shares a word
///   with the query, or the first sentence if none do.
/// * Compression prompts: keeps the words of four or more characters.
pub struct MockProvider {
    tokenizer: Arc<dyn Tokenizer>,
    segmenter: SentenceSegmenter,
    max_prompt_tokens: Option<usize>,
    calls: AtomicUsize,
}

impl Default for MockProvider {
    fn default() -> Self {
        Self::new(Arc::new(RuleTokenizer))
    }
}

impl MockProvider {
    pub fn new(tokenizer: Arc<dyn Tokenizer>) -> Self {
        Self {
            tokenizer,
            segmenter: SentenceSegmenter::default().lenient(),
            max_prompt_tokens: None,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn with_max_prompt_tokens(mut self, limit: usize) -> Self {
        self.max_prompt_tokens = Some(limit);
        self
    }

    /// Number of `complete` calls served so far, failed ones included.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn respond(&self, prompt: &str) -> String {
        match PromptTemplate::detect(prompt) {
            Some(parsed) => match parsed.template {
                PromptTemplate::Qa => self.answer(parsed.context, parsed.query.unwrap_or("")),
                PromptTemplate::Cqsumdp => {
                    self.summarize(parsed.context, parsed.query.unwrap_or(""))
                }
                PromptTemplate::SemanticCompression => compress(parsed.context),
            },
            None => self.answer(prompt, ""),
        }
    }

    fn answer(&self, context: &str, question: &str) -> String {
        let question: BTreeSet<String> = words(question).collect();
        let mut best: Option<(usize, String)> = None;
        for sentence in self.segmenter.segment(context) {
            let overlap = overlap(&question, &sentence);
            if best.as_ref().is_none_or(|(score, _)| overlap > *score) {
                best = Some((overlap, sentence));
            }
        }
        best.map(|(_, s)| s)
            .unwrap_or_else(|| NO_ANSWER.to_string())
    }

    fn summarize(&self, context: &str, query: &str) -> String {
        let query: BTreeSet<String> = words(query).collect();
        let sentences = self.segmenter.segment(context);
        let relevant: Vec<&str> = sentences
            .iter()
            .filter(|s| overlap(&query, s) > 0)
            .map(String::as_str)
            .collect();
        if relevant.is_empty() {
            sentences.into_iter().next().unwrap_or_default()
        } else {
            relevant.join(" ")
        }
    }
}

fn overlap(question: &BTreeSet<String>, sentence: &str) -> usize {
    words(sentence)
        .collect::<BTreeSet<_>>()
        .intersection(question)
        .count()
}

fn compress(text: &str) -> String {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| w.chars().count() >= 4)
        .collect::<Vec<_>>()
        .join(" ")
}

impl CompletionProvider for MockProvider {
    fn complete(&self, prompt: &str) -> Result<CompletionRecord> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        if prompt.trim().is_empty() {
            return Err(Error::EmptyInput);
        }
        let prompt_tokens = self.tokenizer.count_tokens(prompt);
        if let Some(limit) = self.max_prompt_tokens {
            if prompt_tokens > limit {
                return Err(Error::ContextTooLarge(format!(
                    "{prompt_tokens} tokens, limit {limit}"
                )));
            }
        }
        let answer = self.respond(prompt);
        Ok(CompletionRecord {
            prompt_tokens,
            completion_tokens: self.tokenizer.count_tokens(&answer),
            summary_tokens: 0,
            answer,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qa(context: &str, question: &str) -> String {
        PromptTemplate::Qa.render(context, Some(question)).unwrap()
    }

    #[test]
    fn picks_max_overlap_sentence() {
        let mock = MockProvider::default();
        let rec = mock
            .complete(&qa(
                "The sky is blue. Grass is green.",
                "What color is grass?",
            ))
            .unwrap();
        assert_eq!(rec.answer, "Grass is green.");
    }

    #[test]
    fn zero_overlap_returns_first_sentence() {
        let mock = MockProvider::default();
        let rec = mock.complete(&qa("Alpha one. Beta two.", "zzz?")).unwrap();
        assert_eq!(rec.answer, "Alpha one.");
    }

    #[test]
    fn empty_context_has_no_answer() {
        let mock = MockProvider::default();
        assert_eq!(mock.complete(&qa("", "why?")).unwrap().answer, NO_ANSWER);
    }

    #[test]
    fn token_accounting() {
        let mock = MockProvider::default();
        let prompt = qa("The sky is blue. Grass is green.", "What color is grass?");
        let rec = mock.complete(&prompt).unwrap();
        assert_eq!(rec.prompt_tokens, RuleTokenizer.count_tokens(&prompt));
        assert_eq!(rec.completion_tokens, 4);
        assert_eq!(rec.summary_tokens, 0);
        assert_eq!(mock.complete(&prompt).unwrap(), rec);
        assert_eq!(mock.calls(), 2);
    }

    #[test]
    fn prompt_limit() {
        let mock = MockProvider::default().with_max_prompt_tokens(5);
        assert!(matches!(
            mock.complete(&qa("long context here.", "q")),
            Err(Error::ContextTooLarge(_))
        ));
        assert!(matches!(mock.complete("  "), Err(Error::EmptyInput)));
    }

    #[test]
    fn reduction_prompts() {
        let mock = MockProvider::default();
        let p = PromptTemplate::Cqsumdp
            .render("Cats purr. Dogs bark. Cats sleep.", Some("what do cats do"))
            .unwrap();
        assert_eq!(mock.respond(&p), "Cats purr. Cats sleep.");
        let p = PromptTemplate::SemanticCompression
            .render("The big elephant is here.", None)
            .unwrap();
        assert_eq!(mock.respond(&p), "elephant here");
    }
}
