//! ROUGE-N and ROUGE-L over lowercased rule-tokenizer tokens, no stemming or
//! stopword removal.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::llm::{RuleTokenizer, Tokenizer};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    pub fn from_counts(overlap: usize, candidate: usize, reference: usize) -> Self {
        if candidate == 0 || reference == 0 {
            return Self::default();
        }
        let precision = overlap as f64 / candidate as f64;
        let recall = overlap as f64 / reference as f64;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            precision,
            recall,
            f1,
        }
    }
}

pub fn rouge_tokens(text: &str) -> Vec<String> {
    RuleTokenizer
        .tokenize(text)
        .into_iter()
        .map(|s| text[s].to_lowercase())
        .collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if n > 0 {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped n-gram overlap. An empty side (fewer than `n` tokens) scores zero.
pub fn rouge_n(candidate: &str, reference: &str, n: usize) -> RougeScore {
    let cand = rouge_tokens(candidate);
    let refr = rouge_tokens(reference);
    let cand_counts = ngram_counts(&cand, n);
    let ref_counts = ngram_counts(&refr, n);
    let overlap = cand_counts
        .iter()
        .map(|(gram, &c)| c.min(ref_counts.get(gram).copied().unwrap_or(0)))
        .sum();
    RougeScore::from_counts(
        overlap,
        cand_counts.values().sum(),
        ref_counts.values().sum(),
    )
}

pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn rouge_l(candidate: &str, reference: &str) -> RougeScore {
    let cand = rouge_tokens(candidate);
    let refr = rouge_tokens(reference);
    RougeScore::from_counts(lcs_len(&cand, &refr), cand.len(), refr.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        for n in [1, 2] {
            let s = rouge_n("The cat sat on the mat.", "the cat sat on the mat.", n);
            assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(rouge_l("a b c", "a b c").f1, 1.0);
    }

    #[test]
    fn partial_unigrams() {
        let s = rouge_n("the cat", "the cat sat", 1);
        assert_eq!(s.precision, 1.0);
        assert!((s.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.f1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn clipping() {
        let s = rouge_n("the the the", "the cat", 1);
        assert!((s.precision - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.recall, 0.5);
    }

    #[test]
    fn empty_sides() {
        assert_eq!(rouge_n("", "the cat", 1), RougeScore::default());
        assert_eq!(rouge_n("cat", "", 1), RougeScore::default());
        assert_eq!(rouge_n("cat", "cat", 2), RougeScore::default());
        assert_eq!(rouge_l("", "x"), RougeScore::default());
    }

    #[test]
    fn lcs_by_hand() {
        let s = rouge_l("a b c", "a x c");
        assert!((s.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(rouge_l("a b", "c d").f1, 0.0);
        assert_eq!(lcs_len(&[1, 3, 4, 1, 2], &[3, 4, 1, 2, 1, 3]), 4);
    }
}
