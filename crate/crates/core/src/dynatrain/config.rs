use serde::{Deserialize, Serialize};

use crate::deliberation::AgentConfig;
use crate::error::{Error, Result};
use crate::traces::WmVariant;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dit,
    Rft,
    DdtNext,
    DdtDelta,
    DdtCritic,
    VanillaDyna,
    Iterate,
    IterateHint,
}

impl Method {
    pub fn wm_variant(self) -> Option<WmVariant> {
        match self {
            Method::DdtNext => Some(WmVariant::NextState),
            Method::DdtDelta => Some(WmVariant::StateDelta),
            Method::DdtCritic => Some(WmVariant::Critique),
            _ => None,
        }
    }
}

/// Knobs shared by every training method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Rollouts per task in rejection sampling.
    pub bon_k: usize,
    /// Outer iterations (sample, then train).
    pub iterations: usize,
    pub epochs_wm: usize,
    pub epochs_policy: usize,
    pub lr_wm: f64,
    pub lr_policy: f64,
    pub batch_size: usize,
    /// Base seed for rollouts and data shuffling.
    pub seed: u64,
    /// Inject only `wait` critiques.
    pub wait_only: bool,
    pub workers: usize,
    pub agent: AgentConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            bon_k: 3,
            iterations: 1,
            epochs_wm: 2,
            epochs_policy: 3,
            lr_wm: 0.05,
            lr_policy: 0.02,
            batch_size: 1,
            seed: 1,
            wait_only: false,
            workers: 1,
            agent: AgentConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.agent.validate()?;
        if self.bon_k == 0 || self.batch_size == 0 {
            return Err(Error::Config("bon_k and batch_size must be at least 1".into()));
        }
        for lr in [self.lr_wm, self.lr_policy] {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(Error::InvalidLearningRate(lr));
            }
        }
        Ok(())
    }

    /// Distinct rollout seeds for one sampling round.
    pub fn rollout_seeds(&self, round: usize) -> Vec<u64> {
        let base = self.seed.wrapping_mul(1_000_003).wrapping_add((round * self.bon_k) as u64);
        (0..self.bon_k as u64).map(|j| base + j).collect()
    }

    /// Seeds for evaluation runs, disjoint from every sampling round.
    pub fn eval_seeds(&self) -> Vec<u64> {
        (0..self.bon_k as u64).map(|j| u64::MAX - j).collect()
    }
}
