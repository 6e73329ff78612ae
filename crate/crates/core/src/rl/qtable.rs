use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Q-values as incremental sample means, one row per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    values: Vec<Vec<f64>>,
    counts: Vec<Vec<u64>>,
}

impl QTable {
    pub fn new(states: usize, actions: usize) -> Self {
        Self {
            values: vec![vec![0.0; actions]; states],
            counts: vec![vec![0; actions]; states],
        }
    }

    pub(crate) fn from_parts(values: Vec<Vec<f64>>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let vshape: Vec<usize> = values.iter().map(Vec::len).collect();
        let cshape: Vec<usize> = counts.iter().map(Vec::len).collect();
        if vshape != cshape || vshape.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::CorruptAgentFile(
                "q_values and q_counts shapes differ".into(),
            ));
        }
        Ok(Self { values, counts })
    }

    pub fn states(&self) -> usize {
        self.values.len()
    }

    pub fn actions(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn value(&self, state: usize, action: usize) -> Option<f64> {
        self.values.get(state)?.get(action).copied()
    }

    pub fn row(&self, state: usize) -> Option<&[f64]> {
        self.values.get(state).map(Vec::as_slice)
    }

    /// `Q ← Q + (reward − Q) / n` with `n` the new visit count.
    pub fn update(&mut self, state: usize, action: usize, reward: f64) -> Result<()> {
        let (states, actions) = (self.states(), self.actions());
        let out_of_range =
            || Error::InvalidIndex(format!("({state}, {action}) in a {states}x{actions} table"));
        let q = self
            .values
            .get_mut(state)
            .and_then(|r| r.get_mut(action))
            .ok_or_else(out_of_range)?;
        let n = &mut self.counts[state][action];
        *n += 1;
        *q += (reward - *q) / *n as f64;
        Ok(())
    }

    /// Total visits per state.
    pub fn state_visits(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }
}

pub fn update_q(q: &mut QTable, state: usize, action: usize, reward: f64) -> Result<()> {
    q.update(state, action, reward)
}
