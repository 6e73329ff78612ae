//! Adaptive top-k selection as a tabular contextual bandit.
//!
//! States are K-means clusters of (context, query) embedding pairs, actions
//! are top-k thresholds, and Q-values are sample means of the reward
//! `α(2r − r*) − (1 − α)τ` collected by trying every action on every
//! training sample.

mod agent;
mod kmeans;
mod qtable;
mod reward;
mod state;
mod train;

pub use agent::{
    load_agent, save_agent, ActionSet, Agent, AgentFile, DEFAULT_ALPHA, DEFAULT_CLUSTERS,
};
pub use kmeans::{fit_states, objective, KMeansFit, MAX_ITERATIONS};
pub use qtable::{update_q, QTable};
pub use reward::compute_reward;
pub use state::{get_state, state_vector, StateModel, StateVariant};
pub use train::{
    fit_agent, fit_and_train, infer, infer_embedded, train, Inference, RewardReference,
    TrainConfig, TrainingReport, TrainingSample,
};
