use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{check_dim, cosine, squared_distance};

/// How a (context, query) embedding pair becomes a state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateVariant {
    /// `v_c - v_q`
    #[default]
    Subtract,
    /// `v_c ⊕ v_q`
    Concat,
    /// `[cos(v_c, v_q)]`
    Cosine,
}

impl StateVariant {
    pub fn state_dimension(self, embedding_dimension: usize) -> usize {
        match self {
            StateVariant::Subtract => embedding_dimension,
            StateVariant::Concat => 2 * embedding_dimension,
            StateVariant::Cosine => 1,
        }
    }
}

impl std::str::FromStr for StateVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subtract" => Ok(StateVariant::Subtract),
            "concat" => Ok(StateVariant::Concat),
            "cosine" => Ok(StateVariant::Cosine),
            other => Err(Error::InvalidConfig(format!(
                "unknown state variant `{other}`"
            ))),
        }
    }
}

pub fn state_vector(context: &[f64], query: &[f64], variant: StateVariant) -> Result<Vec<f64>> {
    check_dim(context.len(), query.len())?;
    Ok(match variant {
        StateVariant::Subtract => context.iter().zip(query).map(|(c, q)| c - q).collect(),
        StateVariant::Concat => context.iter().chain(query).copied().collect(),
        StateVariant::Cosine => vec![cosine(context, query)],
    })
}

/// K-means centroids over state vectors; the nearest centroid is the state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateModel {
    pub variant: StateVariant,
    pub embedding_dimension: usize,
    pub centroids: Vec<Vec<f64>>,
}

impl StateModel {
    pub fn new(
        variant: StateVariant,
        embedding_dimension: usize,
        centroids: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if centroids.is_empty() {
            return Err(Error::InvalidConfig(
                "state model needs at least one centroid".into(),
            ));
        }
        let dim = variant.state_dimension(embedding_dimension);
        for c in &centroids {
            check_dim(dim, c.len())?;
        }
        Ok(Self {
            variant,
            embedding_dimension,
            centroids,
        })
    }

    pub fn states(&self) -> usize {
        self.centroids.len()
    }

    /// Index of the nearest centroid to `v`; lower index wins ties.
    pub fn nearest(&self, v: &[f64]) -> Result<usize> {
        check_dim(
            self.variant.state_dimension(self.embedding_dimension),
            v.len(),
        )?;
        Ok(nearest_centroid(&self.centroids, v))
    }

    pub fn get_state(&self, context: &[f64], query: &[f64]) -> Result<usize> {
        check_dim(self.embedding_dimension, context.len())?;
        check_dim(self.embedding_dimension, query.len())?;
        self.nearest(&state_vector(context, query, self.variant)?)
    }
}

pub(crate) fn nearest_centroid(centroids: &[Vec<f64>], v: &[f64]) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(c, v);
        if d < best_dist {
            best = i;
            best_dist = d;
        }
    }
    best
}

pub fn get_state(model: &StateModel, context: &[f64], query: &[f64]) -> Result<usize> {
    model.get_state(context, query)
}
