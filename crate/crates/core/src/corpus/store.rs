use std::cmp::Ordering;
use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llm::Tokenizer;
use crate::reducer::{Context, SentenceSegmenter};
use crate::vector::{check_dim, cosine, norm};

use super::{split_document, Chunk, ChunkConfig, Document, Embedder};

const NORM_TOLERANCE: f64 = 1e-6;

/// Exact (brute-force) in-memory vector index.
///
/// Ingestion takes `&mut self`; once built the store is `Sync` and can serve
/// any number of concurrent readers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorStore {
    dimension: usize,
    config: ChunkConfig,
    chunks: Vec<Chunk>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IngestSummary {
    pub documents: usize,
    pub chunks: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Retrieved<'a> {
    pub chunk: &'a Chunk,
    pub similarity: f64,
}

impl VectorStore {
    pub fn new(dimension: usize, config: ChunkConfig) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig(
                "store dimension must be positive".into(),
            ));
        }
        config.validate()?;
        Ok(Self {
            dimension,
            config,
            chunks: Vec::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn config(&self) -> &ChunkConfig {
        &self.config
    }

    pub fn chunks(&self) -> &[Chunk] {
        &self.chunks
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    /// Splits and embeds every document. Nothing is added if any document
    /// fails.
    pub fn ingest(
        &mut self,
        docs: &[Document],
        embedder: &dyn Embedder,
        tokenizer: &dyn Tokenizer,
    ) -> Result<IngestSummary> {
        check_dim(self.dimension, embedder.dimension())?;
        let mut seen: HashSet<&str> = self.chunks.iter().map(|c| c.doc_id.as_str()).collect();
        let mut staged = Vec::new();
        for doc in docs {
            if doc.doc_id.is_empty() {
                return Err(Error::InvalidConfig("doc_id must be non-empty".into()));
            }
            if !seen.insert(&doc.doc_id) {
                return Err(Error::DuplicateDocument(doc.doc_id.clone()));
            }
            for piece in split_document(doc, &self.config, tokenizer)? {
                let embedding = embedder.embed(&piece.text)?;
                staged.push(Chunk {
                    chunk_id: format!("{}#{}", doc.doc_id, piece.seq_index),
                    doc_id: doc.doc_id.clone(),
                    seq_index: piece.seq_index,
                    text: piece.text,
                    embedding,
                });
            }
        }
        for chunk in &staged {
            self.validate_chunk(chunk)?;
        }
        let summary = IngestSummary {
            documents: docs.len(),
            chunks: staged.len(),
        };
        self.chunks.extend(staged);
        Ok(summary)
    }

    fn validate_chunk(&self, chunk: &Chunk) -> Result<()> {
        check_dim(self.dimension, chunk.embedding.len())?;
        let n = norm(&chunk.embedding);
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::CorruptStore(format!(
                "chunk {} has embedding norm {n}",
                chunk.chunk_id
            )));
        }
        Ok(())
    }

    /// Global top-`n` by cosine similarity, ties broken by `(doc_id, seq_index)`.
    pub fn retrieve_top_n(&self, query_embedding: &[f64], n: usize) -> Result<Vec<Retrieved<'_>>> {
        if self.chunks.is_empty() {
            return Err(Error::EmptyStore);
        }
        check_dim(self.dimension, query_embedding.len())?;
        if n == 0 {
            return Err(Error::InvalidConfig(
                "number of chunks to retrieve must be positive".into(),
            ));
        }
        let mut scored: Vec<Retrieved<'_>> = self
            .chunks
            .iter()
            .map(|chunk| Retrieved {
                chunk,
                similarity: cosine(&chunk.embedding, query_embedding),
            })
            .collect();
        scored.sort_by(|a, b| {
            b.similarity
                .total_cmp(&a.similarity)
                .then_with(|| document_order(a.chunk, b.chunk))
        });
        scored.truncate(n);
        Ok(scored)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let store: VectorStore = serde_json::from_str(&text)
            .map_err(|e| Error::CorruptStore(format!("{}: {e}", path.display())))?;
        store.config.validate()?;
        for chunk in &store.chunks {
            store.validate_chunk(chunk)?;
        }
        Ok(store)
    }
}

fn document_order(a: &Chunk, b: &Chunk) -> Ordering {
    a.doc_id.cmp(&b.doc_id).then(a.seq_index.cmp(&b.seq_index))
}

/// Retrieves the top-`n` chunks for an already-embedded query and joins their
/// sentences in document order, whatever their similarity rank.
pub fn assemble_context(
    store: &VectorStore,
    query_embedding: &[f64],
    n: usize,
    segmenter: &SentenceSegmenter,
) -> Result<Context> {
    let mut hits: Vec<&Chunk> = store
        .retrieve_top_n(query_embedding, n)?
        .into_iter()
        .map(|r| r.chunk)
        .collect();
    hits.sort_by(|a, b| document_order(a, b));
    let sentences = hits
        .iter()
        .flat_map(|c| segmenter.segment(&c.text))
        .collect();
    let source_chunk_ids = hits.iter().map(|c| c.chunk_id.clone()).collect();
    Ok(Context {
        query_id: String::new(),
        sentences,
        source_chunk_ids,
    })
}

pub fn build_context(
    store: &VectorStore,
    embedder: &dyn Embedder,
    segmenter: &SentenceSegmenter,
    query: &str,
    n: usize,
) -> Result<Context> {
    let query_embedding = embedder.embed(query)?;
    assemble_context(store, &query_embedding, n, segmenter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::HashEmbedder;
    use crate::llm::RuleTokenizer;

    fn store_with(vectors: &[(&str, usize, Vec<f64>)]) -> VectorStore {
        let dim = vectors[0].2.len();
        let mut store = VectorStore::new(dim, ChunkConfig::default()).unwrap();
        for (doc, seq, v) in vectors {
            store.chunks.push(Chunk {
                chunk_id: format!("{doc}#{seq}"),
                doc_id: doc.to_string(),
                seq_index: *seq,
                text: format!("Chunk {doc} {seq}."),
                embedding: v.clone(),
            });
        }
        store
    }

    #[test]
    fn self_similarity_first() {
        let store = store_with(&[
            ("a", 0, vec![1.0, 0.0, 0.0]),
            ("b", 0, vec![0.0, 1.0, 0.0]),
            ("c", 0, vec![0.0, 0.0, 1.0]),
        ]);
        let hits = store.retrieve_top_n(&[0.0, 1.0, 0.0], 2).unwrap();
        assert_eq!(hits[0].chunk.doc_id, "b");
        assert_eq!(hits[0].similarity, 1.0);
        // a and c tie at 0; doc_id order decides
        assert_eq!(hits[1].chunk.doc_id, "a");
    }

    #[test]
    fn n_exceeds_store() {
        let store = store_with(&[
            ("a", 0, vec![1.0, 0.0]),
            ("a", 1, vec![0.0, 1.0]),
            ("b", 0, vec![0.6, 0.8]),
            ("c", 0, vec![0.8, 0.6]),
        ]);
        assert_eq!(store.retrieve_top_n(&[1.0, 0.0], 10).unwrap().len(), 4);
    }

    #[test]
    fn retrieval_errors() {
        let empty = VectorStore::new(2, ChunkConfig::default()).unwrap();
        assert!(matches!(
            empty.retrieve_top_n(&[1.0, 0.0], 1),
            Err(Error::EmptyStore)
        ));
        let store = store_with(&[("a", 0, vec![1.0, 0.0])]);
        assert!(matches!(
            store.retrieve_top_n(&[1.0, 0.0, 0.0], 1),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn context_follows_document_order() {
        // c1 ranks below c3 but comes first in the document
        let store = store_with(&[
            ("d", 0, vec![0.0, 1.0]),
            ("d", 1, vec![0.6, 0.8]),
            ("d", 3, vec![1.0, 0.0]),
        ]);
        let hits = store.retrieve_top_n(&[1.0, 0.0], 2).unwrap();
        assert_eq!(hits[0].chunk.seq_index, 3);
        let ctx = assemble_context(&store, &[1.0, 0.0], 2, &SentenceSegmenter::default()).unwrap();
        assert_eq!(ctx.source_chunk_ids, ["d#1", "d#3"]);
        assert_eq!(ctx.sentences, ["Chunk d 1.", "Chunk d 3."]);
    }

    #[test]
    fn ingest_rejects_duplicates_atomically() {
        let mut store = VectorStore::new(64, ChunkConfig::default()).unwrap();
        let docs = [
            Document::new("x", "One. Two."),
            Document::new("x", "Three."),
        ];
        assert!(matches!(
            store.ingest(&docs, &HashEmbedder::default(), &RuleTokenizer),
            Err(Error::DuplicateDocument(_))
        ));
        assert!(store.is_empty());
    }

    #[test]
    fn single_chunk_context_is_its_segmentation() {
        let mut store = VectorStore::new(64, ChunkConfig::default()).unwrap();
        let text = "Rust is fast. Dr. Ferris agrees! Is it safe? Yes.";
        store
            .ingest(
                &[Document::new("only", text)],
                &HashEmbedder::default(),
                &RuleTokenizer,
            )
            .unwrap();
        let seg = SentenceSegmenter::default();
        let ctx = build_context(&store, &HashEmbedder::default(), &seg, "is rust safe", 4).unwrap();
        assert_eq!(ctx.sentences, seg.segment(text));
    }

    #[test]
    fn snapshot_round_trip() {
        let mut store = VectorStore::new(
            64,
            ChunkConfig::new(8, 2, crate::corpus::ChunkUnit::Tokens).unwrap(),
        )
        .unwrap();
        store
            .ingest(
                &[Document::new(
                    "a",
                    "the quick brown fox jumps over the lazy dog again and again",
                )],
                &HashEmbedder::default(),
                &RuleTokenizer,
            )
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.json");
        store.save(&path).unwrap();
        assert_eq!(VectorStore::load(&path).unwrap(), store);

        fs::write(&path, "{\"dimension\": 3").unwrap();
        assert!(matches!(
            VectorStore::load(&path),
            Err(Error::CorruptStore(_))
        ));
    }
}
