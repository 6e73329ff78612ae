//! Prompt templates for question answering and LLM-based context reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CONTEXT: &str = "{CONTEXT}";
const QUERY: &str = "{QUERY}";

const QA: &str = "Answer to the question based on the given context. Context: {CONTEXT}, \nQuestion: {QUERY}, if you do not find any answer in the context, simply return 'No answer'";

const CQSUMDP: &str = "A document along with its query is given below. Write down the most reasonable summary relevant to its document-query pair.\nDocument: {CONTEXT}\nQuery: {QUERY}";

const SEMANTIC_COMPRESSION: &str = "Please compress the following text into a latent representation that a different gpt-3.5-turbo model can decompress into the original text. The compression model should purely minimize the number of characters in the compressed representation while maintaining the semantics of the original text. The resulting compressed text does not need to be decompressed into the original text but should capture the semantics of the original text. The compressed text should be able to be decompressed into a text that is semantically similar to the original text but does not need to be identical.\nText to Compress: {CONTEXT}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptTemplate {
    Qa,
    Cqsumdp,
    SemanticCompression,
}

/// A rendered prompt taken apart again.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedPrompt<'a> {
    pub template: PromptTemplate,
    pub context: &'a str,
    pub query: Option<&'a str>,
}

impl PromptTemplate {
    pub const ALL: [PromptTemplate; 3] = [
        PromptTemplate::Qa,
        PromptTemplate::Cqsumdp,
        PromptTemplate::SemanticCompression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PromptTemplate::Qa => "qa",
            PromptTemplate::Cqsumdp => "cqsumdp",
            PromptTemplate::SemanticCompression => "semantic_compression",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            PromptTemplate::Qa => QA,
            PromptTemplate::Cqsumdp => CQSUMDP,
            PromptTemplate::SemanticCompression => SEMANTIC_COMPRESSION,
        }
    }

    pub fn takes_query(self) -> bool {
        !matches!(self, PromptTemplate::SemanticCompression)
    }

    /// (prefix, separator between context and query, suffix)
    fn pieces(self) -> (&'static str, Option<&'static str>, &'static str) {
        let text = self.text();
        let (pre, rest) = text
            .split_once(CONTEXT)
            .expect("template has a context slot");
        match rest.split_once(QUERY) {
            Some((mid, post)) => (pre, Some(mid), post),
            None => (pre, None, rest),
        }
    }

    /// Substitutes each placeholder exactly once. Payloads are inserted
    /// verbatim, so placeholder-like text inside the context is left alone.
    pub fn render(self, context: &str, query: Option<&str>) -> Result<String> {
        let (pre, mid, post) = self.pieces();
        match (mid, query) {
            (Some(mid), Some(query)) => Ok([pre, context, mid, query, post].concat()),
            (None, None) => Ok([pre, context, post].concat()),
            (Some(_), None) => Err(Error::TemplateArity {
                template: self.name(),
                problem: "requires a query",
            }),
            (None, Some(_)) => Err(Error::TemplateArity {
                template: self.name(),
                problem: "does not accept a query",
            }),
        }
    }

    /// Inverse of [`render`](Self::render) for prompts produced by this template.
    pub fn parse(self, prompt: &str) -> Option<ParsedPrompt<'_>> {
        let (pre, mid, post) = self.pieces();
        let body = prompt.strip_prefix(pre)?.strip_suffix(post)?;
        let (context, query) = match mid {
            Some(mid) => {
                let (c, q) = body.rsplit_once(mid)?;
                (c, Some(q))
            }
            None => (body, None),
        };
        Some(ParsedPrompt {
            template: self,
            context,
            query,
        })
    }

    pub fn detect(prompt: &str) -> Option<ParsedPrompt<'_>> {
        Self::ALL.iter().find_map(|t| t.parse(prompt))
    }
}

pub fn render_prompt(
    template: PromptTemplate,
    context: &str,
    query: Option<&str>,
) -> Result<String> {
    template.render(context, query)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qa_template() {
        let p = PromptTemplate::Qa.render("C", Some("Q")).unwrap();
        assert!(p.starts_with("Answer to the question based on the given context."));
        assert!(p.contains("Context: C"));
        assert!(p.contains("Question: Q"));
        assert!(p.contains("simply return 'No answer'"));
    }

    #[test]
    fn cqsumdp_template() {
        let p = PromptTemplate::Cqsumdp
            .render("the doc", Some("the query"))
            .unwrap();
        assert!(p.contains("most reasonable summary relevant to its document-query pair"));
        let doc = p.find("\nDocument: the doc").unwrap();
        let query = p.find("\nQuery: the query").unwrap();
        assert!(doc < query);
    }

    #[test]
    fn semantic_compression_rejects_query() {
        assert!(matches!(
            PromptTemplate::SemanticCompression.render("x", Some("q")),
            Err(Error::TemplateArity { .. })
        ));
        let p = PromptTemplate::SemanticCompression
            .render("x", None)
            .unwrap();
        assert!(p.contains("compress the following text into a latent representation"));
        assert!(p.ends_with("Text to Compress: x"));
    }

    #[test]
    fn query_templates_require_query() {
        assert!(PromptTemplate::Qa.render("x", None).is_err());
        assert!(PromptTemplate::Cqsumdp.render("x", None).is_err());
    }

    #[test]
    fn placeholders_in_payload_survive() {
        let ctx = "weird {QUERY} and {CONTEXT} text";
        let p = PromptTemplate::Qa.render(ctx, Some("q?")).unwrap();
        assert!(p.contains(ctx));
        let parsed = PromptTemplate::detect(&p).unwrap();
        assert_eq!(parsed.template, PromptTemplate::Qa);
        assert_eq!(parsed.context, ctx);
        assert_eq!(parsed.query, Some("q?"));
    }

    #[test]
    fn detect_each_template() {
        for t in PromptTemplate::ALL {
            let q = t.takes_query().then_some("why?");
            let p = t.render("A. B.", q).unwrap();
            let parsed = PromptTemplate::detect(&p).unwrap();
            assert_eq!(parsed.template, t);
            assert_eq!(parsed.context, "A. B.");
            assert_eq!(parsed.query, q);
        }
        assert!(PromptTemplate::detect("hello").is_none());
    }
}
