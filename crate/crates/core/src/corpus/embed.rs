use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::llm::{words, OpenAiClient};
use crate::vector::normalized;

pub const DEFAULT_DIMENSION: usize = 64;

/// Maps text to a unit-norm vector of fixed dimension.
pub trait Embedder: Send + Sync {
    fn dimension(&self) -> usize;

    fn embed(&self, text: &str) -> Result<Vec<f64>>;
}

impl<E: Embedder + ?Sized> Embedder for Arc<E> {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>> {
        (**self).embed(text)
    }
}

pub fn embed_text(embedder: &dyn Embedder, text: &str) -> Result<Vec<f64>> {
    embedder.embed(text)
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Feature-hashed bag of words: each lowercased word adds one to bucket
/// `fnv1a(word) % d`, then the vector is L2-normalized. Text without any word
/// characters is hashed as a single feature.
#[derive(Debug, Clone, Copy)]
pub struct HashEmbedder {
    dimension: usize,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        Self {
            dimension: DEFAULT_DIMENSION,
        }
    }
}

impl HashEmbedder {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig(
                "embedding dimension must be positive".into(),
            ));
        }
        Ok(Self { dimension })
    }

    fn bucket(&self, feature: &str) -> usize {
        (fnv1a(feature.as_bytes()) % self.dimension as u64) as usize
    }
}

impl Embedder for HashEmbedder {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut v = vec![0.0; self.dimension];
        let mut any = false;
        for word in words(text) {
            v[self.bucket(&word)] += 1.0;
            any = true;
        }
        if !any {
            v[self.bucket(text)] = 1.0;
        }
        Ok(normalized(v).expect("at least one bucket is set"))
    }
}

/// Embeddings from an OpenAI-compatible `/v1/embeddings` endpoint.
pub struct HttpEmbedder {
    client: Arc<OpenAiClient>,
    dimension: usize,
}

impl HttpEmbedder {
    pub fn new(client: Arc<OpenAiClient>, dimension: usize) -> Self {
        Self { client, dimension }
    }
}

impl Embedder for HttpEmbedder {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>> {
        if text.trim().is_empty() {
            return Err(Error::EmptyInput);
        }
        let body = json!({"model": self.client.config().model, "input": text});
        let response = self.client.post_json("/v1/embeddings", &body)?;
        let raw = response
            .pointer("/data/0/embedding")
            .and_then(Value::as_array)
            .ok_or_else(|| {
                Error::provider("embedding response has no data[0].embedding", None, false)
            })?;
        let v = raw
            .iter()
            .map(|x| {
                x.as_f64()
                    .ok_or_else(|| Error::provider("non-numeric embedding value", None, false))
            })
            .collect::<Result<Vec<f64>>>()?;
        crate::vector::check_dim(self.dimension, v.len())?;
        normalized(v).ok_or_else(|| Error::provider("zero embedding vector", None, false))
    }
}
