use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::rouge_n;
use crate::llm::{CompletionProvider, CompletionRecord, PromptTemplate};
use crate::reducer::{Context, ReducedContext, Reducer};

use super::{compute_reward, fit_states, state_vector, ActionSet, Agent, KMeansFit, StateVariant};

/// One training query with its retrieved context and ground-truth answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub query: String,
    pub reference_answer: String,
    pub context: Context,
}

/// What the reduced-context answer is scored against when computing `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardReference {
    /// Both `r` and `r*` are ROUGE-1 F1 against the reference answer.
    #[default]
    GroundTruth,
    /// `r` is scored against the full-context answer; `r*` stays against
    /// the reference answer.
    FullContextAnswer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub variant: StateVariant,
    pub actions: ActionSet,
    pub clusters: usize,
    pub alpha: f64,
    pub seed: u64,
    pub reward_reference: RewardReference,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            variant: StateVariant::Subtract,
            actions: ActionSet::default(),
            clusters: super::DEFAULT_CLUSTERS,
            alpha: super::DEFAULT_ALPHA,
            seed: 0,
            reward_reference: RewardReference::GroundTruth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub samples: usize,
    pub actions: usize,
    pub states: usize,
    pub exploration_calls: usize,
    pub full_context_calls: usize,
    pub q_updates: usize,
    pub state_visits: Vec<u64>,
}

struct Embedded {
    context: Vec<f64>,
    query: Vec<f64>,
}

fn embed_samples(samples: &[TrainingSample], reducer: &Reducer) -> Result<Vec<Embedded>> {
    samples
        .iter()
        .map(|s| {
            Ok(Embedded {
                context: reducer.embedder().embed(&s.context.text())?,
                query: reducer.embedder().embed(&s.query)?,
            })
        })
        .collect()
}

fn fit_embedded(
    config: &TrainConfig,
    embedded: &[Embedded],
    dimension: usize,
) -> Result<KMeansFit> {
    let states = embedded
        .iter()
        .map(|e| state_vector(&e.context, &e.query, config.variant))
        .collect::<Result<Vec<_>>>()?;
    // fewer samples than clusters would leave states that can never be visited
    let clusters = config.clusters.min(states.len());
    fit_states(config.variant, dimension, &states, clusters, config.seed)
}

/// Builds the state model from the training set: embeds each (context,
/// query) pair, forms state vectors and clusters them.
pub fn fit_agent(
    config: &TrainConfig,
    samples: &[TrainingSample],
    reducer: &Reducer,
) -> Result<(Agent, KMeansFit)> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("training set is empty".into()));
    }
    let embedded = embed_samples(samples, reducer)?;
    let fit = fit_embedded(config, &embedded, reducer.embedder().dimension())?;
    let agent = Agent::new(fit.model.clone(), config.actions.clone(), config.alpha)?;
    Ok((agent, fit))
}

/// Fits the state model and then trains with full exploration.
pub fn fit_and_train(
    config: &TrainConfig,
    samples: &[TrainingSample],
    llm: &dyn CompletionProvider,
    reducer: &Reducer,
) -> Result<(Agent, TrainingReport)> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("training set is empty".into()));
    }
    let embedded = embed_samples(samples, reducer)?;
    let fit = fit_embedded(config, &embedded, reducer.embedder().dimension())?;
    let mut agent = Agent::new(fit.model, config.actions.clone(), config.alpha)?;
    let report = train_embedded(
        &mut agent,
        samples,
        &embedded,
        llm,
        reducer,
        config.reward_reference,
    )?;
    Ok((agent, report))
}

/// Full-exploration training over an agent whose state model is already
/// fitted.
///
/// Each sample is answered once from its full context to get `r*`, then once
/// per threshold from the reduced context to get `r`; every (state, action)
/// pair visited receives the reward as a sample-mean update. On a provider
/// failure the agent keeps the updates applied so far.
pub fn train(
    agent: &mut Agent,
    samples: &[TrainingSample],
    llm: &dyn CompletionProvider,
    reducer: &Reducer,
    reference: RewardReference,
) -> Result<TrainingReport> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("training set is empty".into()));
    }
    let embedded = embed_samples(samples, reducer)?;
    train_embedded(agent, samples, &embedded, llm, reducer, reference)
}

fn ask(llm: &dyn CompletionProvider, context: &str, query: &str) -> Result<CompletionRecord> {
    llm.complete(&PromptTemplate::Qa.render(context, Some(query))?)
}

fn train_embedded(
    agent: &mut Agent,
    samples: &[TrainingSample],
    embedded: &[Embedded],
    llm: &dyn CompletionProvider,
    reducer: &Reducer,
    reference: RewardReference,
) -> Result<TrainingReport> {
    let thresholds = agent.actions.thresholds().to_vec();
    let mut report = TrainingReport {
        samples: samples.len(),
        actions: thresholds.len(),
        states: agent.state_model.states(),
        exploration_calls: 0,
        full_context_calls: 0,
        q_updates: 0,
        state_visits: Vec::new(),
    };

    for (done, (sample, emb)) in samples.iter().zip(embedded).enumerate() {
        let abort = |updates: usize, e: Error| Error::TrainingAborted {
            samples_completed: done,
            updates_applied: updates,
            source: Box::new(e),
        };
        let state = agent.get_state(&emb.context, &emb.query)?;
        let ranked = reducer.rank(&sample.context, &emb.query)?;

        let full = ask(llm, &sample.context.text(), &sample.query)
            .map_err(|e| abort(report.q_updates, e))?;
        report.full_context_calls += 1;
        let r_star = rouge_n(&full.answer, &sample.reference_answer, 1).f1;
        let r_reference = match reference {
            RewardReference::GroundTruth => sample.reference_answer.as_str(),
            RewardReference::FullContextAnswer => full.answer.as_str(),
        };

        // LLM calls for the actions of one sample run concurrently; the
        // updates below are applied in action order.
        let outcomes: Vec<Result<(ReducedContext, CompletionRecord)>> = thresholds
            .par_iter()
            .map(|&theta| {
                let reduced = reducer.reduce_ranked(&sample.context, &ranked, theta)?;
                let answer = ask(llm, &reduced.text, &sample.query)?;
                Ok((reduced, answer))
            })
            .collect();
        for (action, outcome) in outcomes.into_iter().enumerate() {
            let (reduced, answer) = outcome.map_err(|e| abort(report.q_updates, e))?;
            report.exploration_calls += 1;
            let r = rouge_n(&answer.answer, r_reference, 1).f1;
            let reward = compute_reward(r, r_star, reduced.tau, agent.alpha)?;
            agent.q.update(state, action, reward)?;
            report.q_updates += 1;
        }
    }
    report.state_visits = agent.q.state_visits();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inference {
    pub state: usize,
    pub theta: f64,
    pub reduced: ReducedContext,
    pub completion: CompletionRecord,
}

/// Greedy inference: state from the embeddings, threshold from the Q-table,
/// reduce, then ask.
pub fn infer(
    agent: &Agent,
    query: &str,
    context: &Context,
    llm: &dyn CompletionProvider,
    reducer: &Reducer,
) -> Result<Inference> {
    let query_embedding = reducer.embedder().embed(query)?;
    infer_embedded(agent, query, &query_embedding, context, llm, reducer)
}

pub fn infer_embedded(
    agent: &Agent,
    query: &str,
    query_embedding: &[f64],
    context: &Context,
    llm: &dyn CompletionProvider,
    reducer: &Reducer,
) -> Result<Inference> {
    let context_embedding = reducer.embedder().embed(&context.text())?;
    let state = agent.get_state(&context_embedding, query_embedding)?;
    let theta = agent.policy(state)?;
    let reduced = reducer.reduce(context, query_embedding, theta)?;
    let completion = ask(llm, &reduced.text, query)?;
    Ok(Inference {
        state,
        theta,
        reduced,
        completion,
    })
}
