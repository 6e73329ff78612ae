use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::CompletionRecord;

/// Linear per-1k-token pricing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub price_per_1k_prompt: f64,
    pub price_per_1k_completion: f64,
}

impl CostModel {
    pub fn new(price_per_1k_prompt: f64, price_per_1k_completion: f64) -> Result<Self> {
        if !(price_per_1k_prompt >= 0.0 && price_per_1k_completion >= 0.0) {
            return Err(Error::InvalidConfig("prices must be non-negative".into()));
        }
        Ok(Self {
            price_per_1k_prompt,
            price_per_1k_completion,
        })
    }
}

/// Summary tokens are input tokens of an earlier call and are billed at the
/// prompt rate.
pub fn cost(record: &CompletionRecord, model: &CostModel) -> f64 {
    let input = (record.prompt_tokens + record.summary_tokens) as f64;
    model.price_per_1k_prompt * input / 1000.0
        + model.price_per_1k_completion * record.completion_tokens as f64 / 1000.0
}

/// Percentage of baseline tokens saved, rounded to two decimals.
pub fn cost_savings(baseline_total: u64, variant_total: u64) -> Result<f64> {
    if baseline_total == 0 {
        return Err(Error::DivisionByZero);
    }
    let raw = 100.0 * (baseline_total as f64 - variant_total as f64) / baseline_total as f64;
    Ok(round_to(raw, 2))
}

/// Round half away from zero at `decimals` places.
pub fn round_to(value: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (value * scale).round() / scale
}
