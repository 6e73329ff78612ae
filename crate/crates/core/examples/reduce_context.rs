//! Keep the sentences most similar to the question and compress the rest,
//! for each threshold in the action set.
//!
//! cargo run --example reduce_context

use std::sync::Arc;

use leanctx::corpus::HashEmbedder;
use leanctx::llm::RuleTokenizer;
use leanctx::reducer::{Context, Reducer, UnigramModel};

fn main() -> leanctx::Result<()> {
    let ctx = Context::new(
        "demo",
        [
            "The harbor at Selm freezes most winters.",
            "Ferries then run from the northern pier instead.",
            "The lighthouse keeper, Ada Morrow, has kept the lamp lit since 1961.",
            "She trained under her uncle, who kept it before her.",
            "Visitors may climb the tower on Sundays.",
            "The lamp was converted to electricity in 1974.",
            "Gulls nest on the rocks below the gallery.",
            "A small museum sits beside the keeper's cottage.",
            "The museum displays old lenses and logbooks.",
            "Storm damage in 1990 closed the tower for a season.",
        ]
        .map(String::from)
        .to_vec(),
    );
    let tok = Arc::new(RuleTokenizer);
    let model = UnigramModel::from_texts(ctx.sentences.iter().map(String::as_str), tok.as_ref());
    let reducer = Reducer::new(Arc::new(HashEmbedder::new(64)?), tok, Arc::new(model), 0.8)?;

    let question = "Who has kept the lighthouse lamp lit since 1961?";
    let q = reducer.embedder().embed(question)?;
    for r in reducer.rank(&ctx, &q)?.iter().take(3) {
        println!("{:.3}  {}", r.similarity, ctx.sentences[r.index]);
    }

    for theta in [0.0, 0.1, 0.2, 0.3, 0.4] {
        let reduced = reducer.reduce(&ctx, &q, theta)?;
        println!(
            "\ntheta {theta}: kept {:?}, {} -> {} tokens (tau {:.3})\n  {}",
            reduced.kept_indices,
            reduced.original_tokens,
            reduced.reduced_tokens,
            reduced.tau,
            reduced.text.replace('\n', "\n  ")
        );
    }
    Ok(())
}
