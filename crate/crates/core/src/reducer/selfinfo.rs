use std::collections::HashMap;

use crate::llm::Tokenizer;

/// Scores lexical units by self-information, `-log2 p(u)`, in bits.
/// Higher means more informative; compression drops the lowest first.
pub trait SelfInformation: Send + Sync {
    fn information(&self, unit: &str) -> f64;
}

/// Unigram frequency model with add-one smoothing.
///
/// `p(u) = (count(u) + 1) / (total + vocabulary + 1)`, where the extra slot is
/// shared by all unseen units. Unseen units therefore get the maximum score.
/// Units are compared case-insensitively.
#[derive(Debug, Clone, Default)]
pub struct UnigramModel {
    counts: HashMap<String, u64>,
    total: u64,
}

impl UnigramModel {
    pub fn from_texts<'a, I>(texts: I, tokenizer: &dyn Tokenizer) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut model = Self::default();
        for text in texts {
            for span in tokenizer.tokenize(text) {
                model.observe(&text[span], 1);
            }
        }
        model
    }

    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut model = Self::default();
        for (unit, n) in counts {
            model.observe(unit.as_ref(), n);
        }
        model
    }

    fn observe(&mut self, unit: &str, n: u64) {
        *self.counts.entry(unit.to_lowercase()).or_default() += n;
        self.total += n;
    }

    pub fn probability(&self, unit: &str) -> f64 {
        let count = self.counts.get(&unit.to_lowercase()).copied().unwrap_or(0);
        (count + 1) as f64 / (self.total + self.counts.len() as u64 + 1) as f64
    }

    pub fn vocabulary_size(&self) -> usize {
        self.counts.len()
    }
}

impl SelfInformation for UnigramModel {
    fn information(&self, unit: &str) -> f64 {
        -self.probability(unit).log2()
    }
}
