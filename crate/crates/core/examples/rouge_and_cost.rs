//! ROUGE scores, token counts and cost savings for a pair of answers.
//!
//! cargo run --example rouge_and_cost

use leanctx::eval::{rouge_l, rouge_n};
use leanctx::llm::{cost, cost_savings, CompletionRecord, CostModel, RuleTokenizer, Tokenizer};

fn main() -> leanctx::Result<()> {
    let reference = "The stone bridge was built by Tamsin Vell in 1742.";
    let candidate = "Tamsin Vell built the bridge in 1742.";
    for (name, s) in [
        ("rouge-1", rouge_n(candidate, reference, 1)),
        ("rouge-2", rouge_n(candidate, reference, 2)),
        ("rouge-l", rouge_l(candidate, reference)),
    ] {
        println!(
            "{name}: P {:.4}  R {:.4}  F1 {:.4}",
            s.precision, s.recall, s.f1
        );
    }

    let tok = RuleTokenizer;
    println!(
        "\n{:?} -> {} tokens",
        reference,
        tok.count_tokens(reference)
    );

    let prices = CostModel::new(0.5, 1.5)?;
    let full = CompletionRecord {
        prompt_tokens: 740,
        completion_tokens: 21,
        ..Default::default()
    };
    let reduced = CompletionRecord {
        prompt_tokens: 226,
        completion_tokens: 19,
        ..Default::default()
    };
    println!(
        "full context: {} tokens, ${:.6}",
        full.total_tokens(),
        cost(&full, &prices)
    );
    println!(
        "reduced: {} tokens, ${:.6}",
        reduced.total_tokens(),
        cost(&reduced, &prices)
    );
    println!(
        "savings: {:.2}%",
        cost_savings(full.total_tokens() as u64, reduced.total_tokens() as u64)?
    );
    Ok(())
}
