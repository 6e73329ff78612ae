//! Application configuration, loaded from a single JSON file.
//!
//! Every section is optional and falls back to its defaults; unknown keys are
//! rejected. The only secret, the API key, comes from `LEANCTX_API_KEY`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{ChunkConfig, DEFAULT_DIMENSION};
use crate::error::{Error, Result};
use crate::llm::OpenAiConfig;
use crate::reducer::DEFAULT_RATE;
use crate::rl::{
    ActionSet, RewardReference, StateVariant, TrainConfig, DEFAULT_ALPHA, DEFAULT_CLUSTERS,
};

pub const DEFAULT_N_CHUNKS: usize = 4;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppConfig {
    #[serde(default)]
    pub store: ChunkConfig,
    #[serde(default)]
    pub embedder: EmbedderConfig,
    #[serde(default)]
    pub llm: LlmConfig,
    #[serde(default)]
    pub reducer: ReducerConfig,
    #[serde(default)]
    pub rl: RlConfig,
    #[serde(default)]
    pub retrieval: RetrievalConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EmbedderConfig {
    Hash {
        dimension: usize,
    },
    Http {
        dimension: usize,
        endpoint: OpenAiConfig,
    },
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        EmbedderConfig::Hash {
            dimension: DEFAULT_DIMENSION,
        }
    }
}

impl EmbedderConfig {
    pub fn dimension(&self) -> usize {
        match self {
            EmbedderConfig::Hash { dimension } | EmbedderConfig::Http { dimension, .. } => {
                *dimension
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LlmConfig {
    #[default]
    Mock,
    Http {
        endpoint: OpenAiConfig,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducerConfig {
    #[serde(default = "default_rate")]
    pub rate: f64,
}

fn default_rate() -> f64 {
    DEFAULT_RATE
}

impl Default for ReducerConfig {
    fn default() -> Self {
        Self { rate: DEFAULT_RATE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RlConfig {
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub state: StateVariant,
    #[serde(default)]
    pub reward_reference: RewardReference,
}

fn default_thresholds() -> Vec<f64> {
    ActionSet::default().into()
}
fn default_clusters() -> usize {
    DEFAULT_CLUSTERS
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

impl Default for RlConfig {
    fn default() -> Self {
        Self {
            thresholds: default_thresholds(),
            clusters: DEFAULT_CLUSTERS,
            alpha: DEFAULT_ALPHA,
            seed: 0,
            state: StateVariant::default(),
            reward_reference: RewardReference::default(),
        }
    }
}

impl RlConfig {
    pub fn train_config(&self) -> Result<TrainConfig> {
        Ok(TrainConfig {
            variant: self.state,
            actions: ActionSet::new(self.thresholds.clone())?,
            clusters: self.clusters,
            alpha: self.alpha,
            seed: self.seed,
            reward_reference: self.reward_reference,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrievalConfig {
    #[serde(default = "default_n_chunks")]
    pub n_chunks: usize,
}

fn default_n_chunks() -> usize {
    DEFAULT_N_CHUNKS
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            n_chunks: DEFAULT_N_CHUNKS,
        }
    }
}

impl AppConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: AppConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::InvalidConfig(msg) => Error::InvalidConfig(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.store.validate()?;
        if self.embedder.dimension() == 0 {
            return Err(Error::InvalidConfig(
                "embedder dimension must be positive".into(),
            ));
        }
        if let EmbedderConfig::Http { endpoint, .. } = &self.embedder {
            endpoint.validate()?;
        }
        if let LlmConfig::Http { endpoint } = &self.llm {
            endpoint.validate()?;
        }
        if !(0.0..1.0).contains(&self.reducer.rate) {
            return Err(Error::InvalidRate(self.reducer.rate));
        }
        let train = self.rl.train_config()?;
        if train.clusters == 0 {
            return Err(Error::InvalidConfig("rl.clusters must be positive".into()));
        }
        if !(0.0..=1.0).contains(&train.alpha) {
            return Err(Error::InvalidConfig(format!(
                "rl.alpha {} is outside [0, 1]",
                train.alpha
            )));
        }
        if self.retrieval.n_chunks == 0 {
            return Err(Error::InvalidConfig(
                "retrieval.n_chunks must be positive".into(),
            ));
        }
        Ok(())
    }
}
