//! The four stream summarizers. All of them apply the edge change to the
//! summary first and then run trials for the first endpoint, then the
//! second.

mod greedy;
mod mcmc;
mod mosso;
mod simple;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cluster::ClusterIndex;
use crate::error::SummaryError;
use crate::summary::Summary;
use crate::types::{Destination, NodeId, StreamEvent};

pub use greedy::{best_destination, greedy_step};
pub use mcmc::{mcmc_acceptance, mcmc_step, proposal_distribution, sample_proposal};
pub use mosso::mosso_step;
pub use simple::mosso_simple_step;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Mosso,
    MossoSimple,
    Greedy,
    Mcmc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Mosso,
        Algorithm::MossoSimple,
        Algorithm::Greedy,
        Algorithm::Mcmc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mosso => "mosso",
            Algorithm::MossoSimple => "mosso-simple",
            Algorithm::Greedy => "greedy",
            Algorithm::Mcmc => "mcmc",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| ConfigError(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Probability of proposing a fresh singleton instead of a candidate.
    pub escape_prob: f64,
    /// Neighbors sampled per input node.
    pub sample_count: usize,
    pub mcmc_beta: f64,
    pub mcmc_epsilon: f64,
    pub seed: u64,
    /// Min-hash seed; falls back to `seed` when unset.
    pub hash_seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::Mosso,
            escape_prob: 0.3,
            sample_count: 120,
            mcmc_beta: 10.0,
            mcmc_epsilon: 1.0,
            seed: 0,
            hash_seed: None,
        }
    }
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        RunConfig {
            algorithm,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..1.0).contains(&self.escape_prob) {
            return Err(ConfigError(format!(
                "escape probability {} not in [0, 1)",
                self.escape_prob
            )));
        }
        if self.sample_count == 0 {
            return Err(ConfigError("sample count must be positive".into()));
        }
        if !(self.mcmc_beta >= 0.0 && self.mcmc_beta.is_finite()) {
            return Err(ConfigError(format!("beta {} must be >= 0", self.mcmc_beta)));
        }
        if !(self.mcmc_epsilon > 0.0 && self.mcmc_epsilon.is_finite()) {
            return Err(ConfigError(format!(
                "epsilon {} must be > 0",
                self.mcmc_epsilon
            )));
        }
        Ok(())
    }

    pub fn effective_hash_seed(&self) -> u64 {
        self.hash_seed.unwrap_or(self.seed)
    }
}

/// Record of one proposed relocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub testing_node: NodeId,
    pub proposal: Destination,
    pub delta: i64,
    pub accepted: bool,
}

/// Owns one summary together with the auxiliary state its algorithm needs.
#[derive(Clone, Debug)]
pub struct Summarizer {
    config: RunConfig,
    state: Summary,
    index: ClusterIndex,
    rng: ChaCha8Rng,
}

impl Summarizer {
    pub fn new(config: RunConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Summarizer {
            index: ClusterIndex::new(config.effective_hash_seed()),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            state: Summary::new(),
            config,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn state(&self) -> &Summary {
        &self.state
    }

    pub fn cluster_index(&self) -> &ClusterIndex {
        &self.index
    }

    pub fn into_state(self) -> Summary {
        self.state
    }

    /// Processes one event, appending every trial outcome to `outcomes`.
    pub fn process_into(
        &mut self,
        event: &StreamEvent,
        outcomes: &mut Vec<TrialOutcome>,
    ) -> Result<(), SummaryError> {
        let Summarizer {
            config,
            state,
            index,
            rng,
        } = self;
        match config.algorithm {
            Algorithm::Mosso => mosso_step(state, index, config, event, rng, outcomes),
            Algorithm::MossoSimple => mosso_simple_step(state, config, event, rng, outcomes),
            Algorithm::Greedy => greedy_step(state, event, outcomes),
            Algorithm::Mcmc => mcmc_step(state, config, event, rng, outcomes),
        }
    }

    pub fn process(&mut self, event: &StreamEvent) -> Result<Vec<TrialOutcome>, SummaryError> {
        let mut out = Vec::new();
        self.process_into(event, &mut out)?;
        Ok(out)
    }
}

/// Runs the `Δφ ≤ 0` gate on one proposal and commits it if accepted.
pub(crate) fn try_move(
    state: &mut Summary,
    y: NodeId,
    proposal: Destination,
) -> Result<TrialOutcome, SummaryError> {
    let (delta, accepted) = state.move_if_not_worse(y, proposal)?;
    Ok(TrialOutcome {
        testing_node: y,
        proposal,
        delta,
        accepted,
    })
}
