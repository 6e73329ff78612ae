//! Ask an OpenAI-compatible endpoint a question over a reduced context.
//!
//! LEANCTX_BASE_URL=https://api.openai.com LEANCTX_MODEL=gpt-4o-mini \
//! LEANCTX_API_KEY=... cargo run --example openai_provider
//!
//! Without LEANCTX_BASE_URL the request body is printed instead of sent.

use std::sync::Arc;

use leanctx::corpus::HashEmbedder;
use leanctx::llm::{
    CompletionProvider, OpenAiClient, OpenAiConfig, OpenAiProvider, PromptTemplate, RuleTokenizer,
};
use leanctx::reducer::{Context, Reducer, UnigramModel};

fn main() -> leanctx::Result<()> {
    let ctx = Context::new(
        "demo",
        [
            "Dunmarr sits at the mouth of the Vell.",
            "Its clock tower was restored by the Harrow guild in 1911.",
            "The guild also repaired the harbor wall.",
            "Fishing boats leave before dawn.",
            "The tower bell weighs two tonnes.",
        ]
        .map(String::from)
        .to_vec(),
    );
    let question = "Who restored the clock tower?";
    let tok = Arc::new(RuleTokenizer);
    let model = UnigramModel::from_texts(ctx.sentences.iter().map(String::as_str), tok.as_ref());
    let reducer = Reducer::new(
        Arc::new(HashEmbedder::new(64)?),
        tok.clone(),
        Arc::new(model),
        0.8,
    )?;
    let reduced = reducer.reduce(&ctx, &reducer.embedder().embed(question)?, 0.2)?;
    let prompt = PromptTemplate::Qa.render(&reduced.text, Some(question))?;

    let model = std::env::var("LEANCTX_MODEL").unwrap_or_else(|_| "gpt-4o-mini".into());
    let Ok(base_url) = std::env::var("LEANCTX_BASE_URL") else {
        let offline = OpenAiProvider::new(Arc::new(OpenAiClient::new(OpenAiConfig::new(
            "http://localhost",
            model,
        ))?));
        println!("{:#}", offline.request_body(&prompt));
        return Ok(());
    };
    let client = OpenAiClient::new(OpenAiConfig::new(base_url, model))?;
    let provider = OpenAiProvider::new(Arc::new(client)).with_tokenizer(tok);
    let record = provider.complete(&prompt)?;
    println!("answer: {}", record.answer);
    println!(
        "tokens: prompt {} completion {} (tau {:.3})",
        record.prompt_tokens, record.completion_tokens, reduced.tau
    );
    Ok(())
}
