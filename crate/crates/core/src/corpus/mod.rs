//! Document ingestion: chunking, embedding, the in-memory vector index and
//! per-query context assembly.

mod embed;
mod store;

use std::collections::HashSet;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl::read_jsonl;
use crate::llm::Tokenizer;

pub use embed::{embed_text, fnv1a, Embedder, HashEmbedder, HttpEmbedder, DEFAULT_DIMENSION};
pub use store::{assemble_context, build_context, IngestSummary, Retrieved, VectorStore};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            text: text.into(),
        }
    }
}

/// A stored chunk with its unit-norm embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub chunk_id: String,
    pub doc_id: String,
    pub seq_index: usize,
    pub text: String,
    pub embedding: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChunkUnit {
    Tokens,
    Characters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChunkConfig {
    #[serde(default = "default_chunk_size")]
    pub chunk_size: usize,
    #[serde(default)]
    pub chunk_overlap: usize,
    #[serde(default = "default_unit")]
    pub unit: ChunkUnit,
}

fn default_chunk_size() -> usize {
    500
}

fn default_unit() -> ChunkUnit {
    ChunkUnit::Tokens
}

impl Default for ChunkConfig {
    fn default() -> Self {
        Self {
            chunk_size: default_chunk_size(),
            chunk_overlap: 0,
            unit: default_unit(),
        }
    }
}

impl ChunkConfig {
    pub fn new(chunk_size: usize, chunk_overlap: usize, unit: ChunkUnit) -> Result<Self> {
        let config = Self {
            chunk_size,
            chunk_overlap,
            unit,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.chunk_size == 0 {
            return Err(Error::InvalidConfig("chunk_size must be positive".into()));
        }
        if self.chunk_overlap >= self.chunk_size {
            return Err(Error::InvalidConfig(format!(
                "chunk_overlap {} must be smaller than chunk_size {}",
                self.chunk_overlap, self.chunk_size
            )));
        }
        Ok(())
    }
}

/// One window of a split document, before embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextChunk {
    pub seq_index: usize,
    /// Half-open range of measurement units covered by this chunk.
    pub units: Range<usize>,
    pub text: String,
}

/// Sliding-window split over tokens or characters.
///
/// Windows start every `chunk_size - chunk_overlap` units and stop once one
/// reaches the end of the text. A window's text runs from the start of its
/// first unit to the start of the unit after its last one, so with zero
/// overlap the chunks tile the document byte for byte.
pub fn split_document(
    doc: &Document,
    config: &ChunkConfig,
    tokenizer: &dyn Tokenizer,
) -> Result<Vec<TextChunk>> {
    config.validate()?;
    if doc.text.trim().is_empty() {
        return Err(Error::EmptyDocument);
    }
    let starts: Vec<usize> = match config.unit {
        ChunkUnit::Tokens => tokenizer
            .tokenize(&doc.text)
            .into_iter()
            .map(|s| s.start)
            .collect(),
        ChunkUnit::Characters => doc.text.char_indices().map(|(i, _)| i).collect(),
    };
    let total = starts.len();
    if total == 0 {
        return Err(Error::EmptyDocument);
    }
    let byte_at = |unit: usize| match unit {
        0 => 0,
        u if u >= total => doc.text.len(),
        u => starts[u],
    };

    let step = config.chunk_size - config.chunk_overlap;
    let mut chunks = Vec::new();
    let mut start = 0;
    loop {
        let end = (start + config.chunk_size).min(total);
        chunks.push(TextChunk {
            seq_index: chunks.len(),
            units: start..end,
            text: doc.text[byte_at(start)..byte_at(end)].to_string(),
        });
        if end == total {
            break;
        }
        start += step;
    }
    Ok(chunks)
}

/// Loads a JSONL corpus of `{"doc_id", "text"}` objects, rejecting blank or
/// duplicate entries.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let docs: Vec<Document> = read_jsonl(path)?;
    let mut seen = HashSet::new();
    for (i, doc) in docs.iter().enumerate() {
        let problem = if doc.doc_id.trim().is_empty() {
            Some("doc_id is empty".to_string())
        } else if doc.text.trim().is_empty() {
            Some("text is empty".to_string())
        } else if !seen.insert(doc.doc_id.as_str()) {
            Some(format!("duplicate doc_id `{}`", doc.doc_id))
        } else {
            None
        };
        if let Some(message) = problem {
            return Err(Error::MalformedLine {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            });
        }
    }
    Ok(docs)
}
