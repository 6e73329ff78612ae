//! Token counting.
//!
//! Token counts drive every ratio and cost figure in the crate, so a tokenizer
//! only needs to be internally consistent. The default [`RuleTokenizer`] is
//! offline and deterministic; a BPE tokenizer can be plugged in through the
//! [`Tokenizer`] trait.

use std::ops::Range;

/// Byte range of one token inside the tokenized text.
pub type TokenSpan = Range<usize>;

pub trait Tokenizer: Send + Sync {
    fn tokenize(&self, text: &str) -> Vec<TokenSpan>;

    fn count_tokens(&self, text: &str) -> usize {
        self.tokenize(text).len()
    }
}

/// Maximal runs of letters/digits are one token; every other non-whitespace
/// character is a token of its own.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleTokenizer;

impl Tokenizer for RuleTokenizer {
    fn tokenize(&self, text: &str) -> Vec<TokenSpan> {
        let mut spans = Vec::new();
        let mut word_start: Option<usize> = None;
        for (i, c) in text.char_indices() {
            if c.is_alphanumeric() {
                word_start.get_or_insert(i);
                continue;
            }
            if let Some(start) = word_start.take() {
                spans.push(start..i);
            }
            if !c.is_whitespace() {
                spans.push(i..i + c.len_utf8());
            }
        }
        if let Some(start) = word_start {
            spans.push(start..text.len());
        }
        spans
    }

    fn count_tokens(&self, text: &str) -> usize {
        let mut count = 0;
        let mut in_word = false;
        for c in text.chars() {
            if c.is_alphanumeric() {
                if !in_word {
                    count += 1;
                    in_word = true;
                }
            } else {
                in_word = false;
                if !c.is_whitespace() {
                    count += 1;
                }
            }
        }
        count
    }
}

pub fn count_tokens(tokenizer: &dyn Tokenizer, text: &str) -> usize {
    tokenizer.count_tokens(text)
}

/// Lowercased maximal alphanumeric runs.
pub fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn texts(text: &str) -> Vec<&str> {
        RuleTokenizer
            .tokenize(text)
            .into_iter()
            .map(|s| &text[s])
            .collect()
    }

    #[test]
    fn empty_and_words() {
        assert_eq!(RuleTokenizer.count_tokens(""), 0);
        assert_eq!(RuleTokenizer.count_tokens("hello world"), 2);
    }

    #[test]
    fn punctuation_splits() {
        assert_eq!(
            texts("don't stop, now!"),
            ["don", "'", "t", "stop", ",", "now", "!"]
        );
        assert_eq!(RuleTokenizer.count_tokens("don't stop, now!"), 7);
    }

    #[test]
    fn unicode_letters_are_word_chars() {
        assert_eq!(texts("café—naïve"), ["café", "—", "naïve"]);
    }

    proptest! {
        #[test]
        fn count_matches_tokenize(s in "\\PC{0,60}") {
            prop_assert_eq!(RuleTokenizer.count_tokens(&s), RuleTokenizer.tokenize(&s).len());
        }

        #[test]
        fn additive_over_whitespace(a in "[a-zA-Z0-9,.!' ]{0,30}", b in "[a-zA-Z0-9,.!' ]{0,30}") {
            let joined = format!("{a} {b}");
            prop_assert_eq!(
                RuleTokenizer.count_tokens(&joined),
                RuleTokenizer.count_tokens(&a) + RuleTokenizer.count_tokens(&b)
            );
        }
    }
}
