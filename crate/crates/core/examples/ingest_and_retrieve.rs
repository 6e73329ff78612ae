//! Chunk a small corpus, embed it with the hash embedder and pull back the
//! context for a question.
//!
//! cargo run --example ingest_and_retrieve

use leanctx::corpus::{
    build_context, ChunkConfig, ChunkUnit, Document, Embedder, HashEmbedder, VectorStore,
};
use leanctx::llm::RuleTokenizer;
use leanctx::reducer::SentenceSegmenter;

fn main() -> leanctx::Result<()> {
    let docs = [
        Document::new(
            "orinth",
            "The stone bridge in Orinth was built by Tamsin Vell in 1742. \
             It has nine arches. Carts crossed it daily until the flood of 1803. \
             The bridge was rebuilt a year later with the original stones.",
        ),
        Document::new(
            "dunmarr",
            "The clock tower in Dunmarr was restored by the Harrow guild. \
             Its bell weighs two tonnes. The clock runs four minutes fast every winter.",
        ),
    ];
    let embedder = HashEmbedder::new(64)?;
    let mut store = VectorStore::new(64, ChunkConfig::new(30, 0, ChunkUnit::Tokens)?)?;
    let summary = store.ingest(&docs, &embedder, &RuleTokenizer)?;
    println!(
        "{} documents -> {} chunks",
        summary.documents, summary.chunks
    );

    let question = "Who built the stone bridge in Orinth?";
    let q = embedder.embed(question)?;
    for hit in store.retrieve_top_n(&q, 3)? {
        println!("{:.3}  {}", hit.similarity, hit.chunk.chunk_id);
    }

    let ctx = build_context(
        &store,
        &embedder,
        &SentenceSegmenter::default(),
        question,
        2,
    )?;
    println!("\ncontext in document order:");
    for (i, s) in ctx.sentences.iter().enumerate() {
        println!("  [{i}] {s}");
    }
    Ok(())
}
