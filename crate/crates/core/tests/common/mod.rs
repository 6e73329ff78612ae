#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use leanctx::config::AppConfig;
use leanctx::corpus::{fnv1a, DEFAULT_DIMENSION};
use leanctx::llm::{
    CompletionProvider, CompletionRecord, PromptTemplate, RuleTokenizer, Tokenizer,
};
use leanctx::reducer::Context;
use leanctx::rl::TrainingSample;
use leanctx::Result;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture_config() -> AppConfig {
    AppConfig::load(fixtures().join("config.json")).unwrap()
}

const VOCAB: &[&str] = &[
    "river", "stone", "lamp", "market", "tower", "quiet", "green", "the", "a", "of", "in", "salt",
    "bridge", "north", "winter", "bell", "road", "mill", "guild", "harbor", "42", "1871", "x", "y",
];

/// Random lowercase-ish text over a small vocabulary so n-grams repeat.
pub fn random_words(rng: &mut impl Rng, max_len: usize) -> String {
    let n = rng.random_range(0..=max_len);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let w = *VOCAB.choose(rng).unwrap();
        out.push(if rng.random_bool(0.2) {
            w.to_uppercase()
        } else {
            w.to_string()
        });
        if rng.random_bool(0.1) {
            out.push([",", ".", "!", "-"].choose(rng).unwrap().to_string());
        }
    }
    out.join(" ")
}

pub fn random_sentence(rng: &mut impl Rng) -> String {
    let n = rng.random_range(1..=18);
    let words: Vec<&str> = (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect();
    let mut s = words.join(if rng.random_bool(0.2) { ", " } else { " " });
    s.push(*['.', '!', '?'].choose(rng).unwrap());
    s
}

pub fn random_context(rng: &mut impl Rng, min: usize, max: usize) -> Context {
    let n = rng.random_range(min..=max);
    Context::new("random", (0..n).map(|_| random_sentence(rng)).collect())
}

/// Lowercased rule tokens, computed without the library tokenizer.
pub fn oracle_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
            continue;
        }
        if !word.is_empty() {
            out.push(std::mem::take(&mut word));
        }
        if !c.is_whitespace() {
            out.push(c.to_lowercase().collect());
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
    out
}

fn f1(overlap: usize, cand: usize, refr: usize) -> (f64, f64, f64) {
    if cand == 0 || refr == 0 {
        return (0.0, 0.0, 0.0);
    }
    let p = overlap as f64 / cand as f64;
    let r = overlap as f64 / refr as f64;
    let f = if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    };
    (p, r, f)
}

/// Brute-force clipped n-gram overlap via explicit multisets.
pub fn oracle_rouge_n(cand: &str, refr: &str, n: usize) -> (f64, f64, f64) {
    let grams = |t: &[String]| -> Vec<Vec<String>> {
        if t.len() < n {
            return Vec::new();
        }
        (0..=t.len() - n).map(|i| t[i..i + n].to_vec()).collect()
    };
    let c = grams(&oracle_tokens(cand));
    let mut pool = grams(&oracle_tokens(refr));
    let total_ref = pool.len();
    let mut overlap = 0;
    for g in &c {
        if let Some(pos) = pool.iter().position(|x| x == g) {
            pool.swap_remove(pos);
            overlap += 1;
        }
    }
    f1(overlap, c.len(), total_ref)
}

/// Memoized recursive LCS.
pub fn oracle_lcs(a: &[String], b: &[String]) -> usize {
    fn go(
        a: &[String],
        b: &[String],
        i: usize,
        j: usize,
        memo: &mut HashMap<(usize, usize), usize>,
    ) -> usize {
        if i == a.len() || j == b.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            1 + go(a, b, i + 1, j + 1, memo)
        } else {
            go(a, b, i + 1, j, memo).max(go(a, b, i, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

pub fn oracle_rouge_l(cand: &str, refr: &str) -> (f64, f64, f64) {
    let (c, r) = (oracle_tokens(cand), oracle_tokens(refr));
    f1(oracle_lcs(&c, &r), c.len(), r.len())
}

/// Answers QA prompts with `reply` when `needle` survives verbatim in the
/// context and with "No answer" otherwise.
pub struct NeedleLlm {
    pub calls: AtomicUsize,
}

impl NeedleLlm {
    pub fn new() -> Self {
        Self {
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

pub const NEEDLE_REPLY: &str = "the vault code is 7";

impl CompletionProvider for NeedleLlm {
    fn complete(&self, prompt: &str) -> Result<CompletionRecord> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let context = PromptTemplate::Qa
            .parse(prompt)
            .map_or(prompt, |p| p.context);
        let answer = if context.contains("vault code is 7 and never changes") {
            NEEDLE_REPLY
        } else {
            "No answer"
        };
        Ok(CompletionRecord {
            prompt_tokens: RuleTokenizer.count_tokens(prompt),
            completion_tokens: RuleTokenizer.count_tokens(answer),
            summary_tokens: 0,
            answer: answer.to_string(),
        })
    }
}

/// Bandit where the answer sentence always ranks fourth of twenty, so with
/// the default thresholds only `theta = 0.2` keeps it at minimal cost.
///
/// Each group has its own query vocabulary, which spreads samples over
/// distinct states.
pub fn bandit_samples(rng: &mut impl Rng, groups: usize, per_group: usize) -> Vec<TrainingSample> {
    let topics = [
        ["amber", "basil", "cedar"],
        ["delta", "ember", "fjord"],
        ["gorse", "heron", "indigo"],
        ["juniper", "kelp", "lilac"],
        ["maple", "nectar", "onyx"],
        ["pepper", "quartz", "rowan"],
    ];
    let filler = [
        "wagons", "creak", "along", "tracks", "after", "storms", "ravens", "circle", "pines",
        "dusk", "lamps", "glow", "behind", "windows", "bakers", "sell", "loaves", "carts", "fog",
        "lingers", "fields", "noon",
        // The answer's own words are common, so compression drops them first.
        "vault", "code", "is", "7", "and", "never", "changes", "for", "anyone", "vault", "code",
        "is", "7", "and", "never", "changes", "for", "anyone",
    ];
    let mut out = Vec::new();
    for g in 0..groups {
        let [a, b, c] = topics[g % topics.len()];
        // Filler words never share a hash bucket with the query, so they score zero.
        let bucket = |w: &str| fnv1a(w.as_bytes()) % DEFAULT_DIMENSION as u64;
        let taken = [bucket(a), bucket(b), bucket(c)];
        let filler: Vec<&str> = filler
            .iter()
            .copied()
            .filter(|w| !taken.contains(&bucket(w)))
            .collect();
        for _ in 0..per_group {
            let mut sentences = Vec::new();
            // Three short sentences made only of query words outrank the answer.
            sentences.push(format!("{a} {b} {c}."));
            sentences.push(format!("{c} {a} {b}."));
            sentences.push(format!("{b} {c} {a}."));
            sentences.push(format!(
                "The {a} {b} {c} vault code is 7 and never changes for anyone."
            ));
            while sentences.len() < 20 {
                let n = rng.random_range(4..9);
                let words: Vec<&str> = (0..n).map(|_| *filler.choose(rng).unwrap()).collect();
                sentences.push(format!("{}.", words.join(" ")));
            }
            sentences.shuffle(rng);
            out.push(TrainingSample {
                query: format!("{a} {b} {c}?"),
                reference_answer: NEEDLE_REPLY.to_string(),
                context: Context::new(format!("g{g}"), sentences),
            });
        }
    }
    out
}

pub fn shared<T>(v: T) -> Arc<T> {
    Arc::new(v)
}
