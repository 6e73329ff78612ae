use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reducer::MAX_THRESHOLD;

use super::{QTable, StateModel, StateVariant};

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_CLUSTERS: usize = 8;

/// Candidate top-k thresholds, strictly increasing within `[0, 0.4]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ActionSet(Vec<f64>);

impl ActionSet {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.len() < 2 {
            return Err(Error::InvalidConfig("need at least two thresholds".into()));
        }
        if let Some(&bad) = thresholds
            .iter()
            .find(|t| !(0.0..=MAX_THRESHOLD).contains(*t))
        {
            return Err(Error::InvalidThreshold(bad));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "thresholds must be strictly increasing".into(),
            ));
        }
        Ok(Self(thresholds))
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `{0.00, 0.05, …, 0.40}`
impl Default for ActionSet {
    fn default() -> Self {
        Self((0..=8).map(|i| i as f64 / 20.0).collect())
    }
}

impl TryFrom<Vec<f64>> for ActionSet {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ActionSet> for Vec<f64> {
    fn from(a: ActionSet) -> Self {
        a.0
    }
}

/// A state model, threshold actions and the Q-table learned over them.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub(crate) state_model: StateModel,
    pub(crate) actions: ActionSet,
    pub(crate) q: QTable,
    pub(crate) alpha: f64,
}

impl Agent {
    pub fn new(state_model: StateModel, actions: ActionSet, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha {alpha} is outside [0, 1]"
            )));
        }
        let q = QTable::new(state_model.states(), actions.len());
        Ok(Self {
            state_model,
            actions,
            q,
            alpha,
        })
    }

    pub fn state_model(&self) -> &StateModel {
        &self.state_model
    }

    pub fn actions(&self) -> &ActionSet {
        &self.actions
    }

    pub fn q_table(&self) -> &QTable {
        &self.q
    }

    pub fn q_table_mut(&mut self) -> &mut QTable {
        &mut self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn get_state(&self, context: &[f64], query: &[f64]) -> Result<usize> {
        self.state_model.get_state(context, query)
    }

    /// Greedy action index; the smallest threshold wins ties.
    pub fn best_action(&self, state: usize) -> Result<usize> {
        let row = self
            .q
            .row(state)
            .ok_or_else(|| Error::InvalidIndex(format!("state {state} of {}", self.q.states())))?;
        let mut best = 0;
        for (a, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = a;
            }
        }
        Ok(best)
    }

    pub fn policy(&self, state: usize) -> Result<f64> {
        Ok(self.actions.thresholds()[self.best_action(state)?])
    }

    pub fn to_file(&self) -> AgentFile {
        AgentFile {
            variant: self.state_model.variant,
            alpha: self.alpha,
            thresholds: self.actions.thresholds().to_vec(),
            centroids: self.state_model.centroids.clone(),
            q_values: self.q.values().to_vec(),
            q_counts: self.q.counts().to_vec(),
            embedder_dimension: self.state_model.embedding_dimension,
        }
    }

    pub fn from_file(file: AgentFile) -> Result<Self> {
        let corrupt = |e: Error| Error::CorruptAgentFile(e.to_string());
        let model = StateModel::new(file.variant, file.embedder_dimension, file.centroids)
            .map_err(corrupt)?;
        let actions = ActionSet::new(file.thresholds).map_err(corrupt)?;
        let mut agent = Agent::new(model, actions, file.alpha).map_err(corrupt)?;
        let q = QTable::from_parts(file.q_values, file.q_counts)?;
        if q.states() != agent.state_model.states() || q.actions() != agent.actions.len() {
            return Err(Error::CorruptAgentFile(format!(
                "q table is {}x{}, expected {}x{}",
                q.states(),
                q.actions(),
                agent.state_model.states(),
                agent.actions.len()
            )));
        }
        agent.q = q;
        Ok(agent)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(&self.to_file())?;
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: AgentFile = serde_json::from_str(&text)
            .map_err(|e| Error::CorruptAgentFile(format!("{}: {e}", path.display())))?;
        Self::from_file(file)
    }
}

/// On-disk agent layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentFile {
    pub variant: StateVariant,
    pub alpha: f64,
    pub thresholds: Vec<f64>,
    pub centroids: Vec<Vec<f64>>,
    pub q_values: Vec<Vec<f64>>,
    pub q_counts: Vec<Vec<u64>>,
    pub embedder_dimension: usize,
}

pub fn save_agent(agent: &Agent, path: impl AsRef<Path>) -> Result<()> {
    agent.save(path)
}

pub fn load_agent(path: impl AsRef<Path>) -> Result<Agent> {
    Agent::load(path)
}
