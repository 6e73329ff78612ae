use serde::{Deserialize, Serialize};

use crate::corpus::Embedder;
use crate::error::{Error, Result};
use crate::vector::{check_dim, cosine};

pub const MAX_THRESHOLD: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedSentence {
    pub index: usize,
    pub similarity: f64,
}

/// Orders every sentence by cosine similarity to the query, most similar
/// first, lower index first on ties.
pub fn rank_sentences(
    sentences: &[String],
    query_embedding: &[f64],
    embedder: &dyn Embedder,
) -> Result<Vec<RankedSentence>> {
    if sentences.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_dim(embedder.dimension(), query_embedding.len())?;
    let mut ranked = sentences
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let v = embedder.embed(s)?;
            check_dim(query_embedding.len(), v.len())?;
            Ok(RankedSentence {
                index,
                similarity: cosine(&v, query_embedding),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| {
        b.similarity
            .total_cmp(&a.similarity)
            .then(a.index.cmp(&b.index))
    });
    Ok(ranked)
}

/// Number of sentences kept verbatim for threshold `theta` over `n` sentences.
pub fn top_k_count(theta: f64, n: usize) -> Result<usize> {
    if !(0.0..=MAX_THRESHOLD).contains(&theta) {
        return Err(Error::InvalidThreshold(theta));
    }
    if theta == 0.0 || n == 0 {
        return Ok(0);
    }
    Ok(((theta * n as f64).round() as usize).clamp(1, n))
}

/// Indices of the `k` best-ranked sentences, ascending.
pub fn select_top_k(ranked: &[RankedSentence], theta: f64, n: usize) -> Result<Vec<usize>> {
    let k = top_k_count(theta, n)?.min(ranked.len());
    let mut kept: Vec<usize> = ranked[..k].iter().map(|r| r.index).collect();
    kept.sort_unstable();
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::HashEmbedder;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn query_sentence_ranks_first() {
        let e = HashEmbedder::default();
        let sentences = strings(&[
            "Bananas are yellow.",
            "The moon orbits Earth.",
            "Cats chase mice.",
        ]);
        let q = e.embed("The moon orbits Earth.").unwrap();
        let ranked = rank_sentences(&sentences, &q, &e).unwrap();
        assert_eq!(ranked[0].index, 1);
        assert!((ranked[0].similarity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let e = HashEmbedder::default();
        let sentences = strings(&["Other words here.", "Same text.", "Same text."]);
        let q = e.embed("same text").unwrap();
        let ranked = rank_sentences(&sentences, &q, &e).unwrap();
        assert_eq!((ranked[0].index, ranked[1].index), (1, 2));
    }

    #[test]
    fn rank_errors() {
        let e = HashEmbedder::default();
        assert!(matches!(
            rank_sentences(&[], &[0.0; 64], &e),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            rank_sentences(&strings(&["a"]), &[1.0; 3], &e),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn ranked_identity(n: usize) -> Vec<RankedSentence> {
        (0..n)
            .rev()
            .map(|index| RankedSentence {
                index,
                similarity: index as f64,
            })
            .collect()
    }

    #[test]
    fn k_rounding() {
        assert!(select_top_k(&ranked_identity(10), 0.0, 10)
            .unwrap()
            .is_empty());
        assert_eq!(select_top_k(&ranked_identity(10), 0.1, 10).unwrap(), [9]);
        assert_eq!(top_k_count(0.4, 7).unwrap(), 3);
        assert_eq!(
            select_top_k(&ranked_identity(7), 0.4, 7).unwrap(),
            [4, 5, 6]
        );
        assert_eq!(top_k_count(0.05, 3).unwrap(), 1);
        assert_eq!(top_k_count(0.4, 0).unwrap(), 0);
    }

    #[test]
    fn threshold_range() {
        for bad in [-0.01, 0.41, f64::NAN] {
            assert!(matches!(
                top_k_count(bad, 10),
                Err(Error::InvalidThreshold(_))
            ));
        }
    }
}
