use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llm::{TokenSpan, Tokenizer};

use super::{Context, SelfInformation};

/// A maximal run of non-kept sentences `[start, end)` and its compressed text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fragment {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedContext {
    pub kept_indices: Vec<usize>,
    pub fragments: Vec<Fragment>,
    pub text: String,
    pub original_tokens: usize,
    pub reduced_tokens: usize,
    pub tau: f64,
}

/// Largest token count a fragment of `tokens` tokens may keep at `rate`:
/// `ceil((1 - rate) * tokens)`, at least one. The small epsilon absorbs
/// binary rounding such as `(1 - 0.7) * 10 = 3.0000000000000004`.
pub fn token_budget(tokens: usize, rate: f64) -> usize {
    if tokens == 0 {
        return 0;
    }
    let raw = ((1.0 - rate) * tokens as f64 - 1e-9).ceil();
    (raw as usize).clamp(1, tokens)
}

fn check_rate(rate: f64) -> Result<()> {
    if (0.0..1.0).contains(&rate) {
        Ok(())
    } else {
        Err(Error::InvalidRate(rate))
    }
}

/// Drops the least informative tokens of the space-joined sentences until the
/// token budget is met. Equal scores drop the earlier occurrence first;
/// survivors keep their original order.
pub fn reduce_fragment(
    sentences: &[String],
    rate: f64,
    provider: &dyn SelfInformation,
    tokenizer: &dyn Tokenizer,
) -> Result<String> {
    check_rate(rate)?;
    let text = sentences.join(" ");
    let spans = tokenizer.tokenize(&text);
    let budget = token_budget(spans.len(), rate);
    if budget == spans.len() {
        return Ok(render(&text, &spans, &vec![true; spans.len()]));
    }

    let scores: Vec<f64> = spans
        .iter()
        .map(|s| provider.information(&text[s.clone()]))
        .collect();
    let mut drop_order: Vec<usize> = (0..spans.len()).collect();
    drop_order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));

    let mut keep = vec![true; spans.len()];
    let mut dropped = 0;
    for &i in &drop_order[..spans.len() - budget] {
        keep[i] = false;
        dropped += 1;
    }
    let mut out = render(&text, &spans, &keep);
    // Only tokenizers that re-split the rendered text differently need more.
    while tokenizer.count_tokens(&out) > budget && dropped + 1 < spans.len() {
        keep[drop_order[dropped]] = false;
        dropped += 1;
        out = render(&text, &spans, &keep);
    }
    Ok(out)
}

/// Surviving tokens in order. Tokens that were adjacent keep their original
/// separator (nothing, or one space); any gap left by a dropped token becomes
/// one space so neighbours never fuse.
fn render(text: &str, spans: &[TokenSpan], keep: &[bool]) -> String {
    let mut out = String::new();
    let mut prev: Option<usize> = None;
    for (i, span) in spans.iter().enumerate().filter(|(i, _)| keep[*i]) {
        if let Some(p) = prev {
            if p + 1 != i || !text[spans[p].end..span.start].is_empty() {
                out.push(' ');
            }
        }
        out.push_str(&text[span.clone()]);
        prev = Some(i);
    }
    out
}

/// Emits kept sentences verbatim and replaces each maximal run of other
/// sentences with its compressed form, all in original order, one unit per
/// line.
pub fn stitch(
    context: &Context,
    kept: &BTreeSet<usize>,
    rate: f64,
    provider: &dyn SelfInformation,
    tokenizer: &dyn Tokenizer,
) -> Result<ReducedContext> {
    check_rate(rate)?;
    let n = context.sentences.len();
    if let Some(&bad) = kept.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidIndex(format!("sentence {bad} of {n}")));
    }

    let mut units: Vec<String> = Vec::new();
    let mut fragments = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..=n {
        let boundary = i == n || kept.contains(&i);
        if boundary {
            if let Some(start) = run_start.take() {
                let text =
                    reduce_fragment(&context.sentences[start..i], rate, provider, tokenizer)?;
                if !text.is_empty() {
                    units.push(text.clone());
                }
                fragments.push(Fragment {
                    start,
                    end: i,
                    text,
                });
            }
            if i < n {
                units.push(context.sentences[i].clone());
            }
        } else if run_start.is_none() {
            run_start = Some(i);
        }
    }

    let text = units.join("\n");
    let original_tokens = tokenizer.count_tokens(&context.text());
    let reduced_tokens = tokenizer.count_tokens(&text);
    Ok(ReducedContext {
        kept_indices: kept.iter().copied().collect(),
        fragments,
        text,
        original_tokens,
        reduced_tokens,
        tau: token_ratio(reduced_tokens, original_tokens),
    })
}

/// `t / T`; an empty original counts as fully kept.
pub fn token_ratio(reduced: usize, original: usize) -> f64 {
    if original == 0 {
        1.0
    } else {
        reduced as f64 / original as f64
    }
}
