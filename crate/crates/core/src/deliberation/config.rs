use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traces::SegmentCosts;
use crate::worldsim::STEP_BUDGET;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThinkMode {
    DynaThink,
    NoThink,
    VerboseExpert,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    /// Candidates simulated per step; values above the action count mean all.
    pub top_k: usize,
    /// Weight of simulated goal overlap in the selection score.
    pub beta: f64,
    /// Overlap credit for `done` once every rendered atom is believed to
    /// hold. Any positive value lets an untrained agent stop; kept small so
    /// a learned preference for another action can still win.
    pub done_credit: f64,
    pub think_mode: ThinkMode,
    pub budget: u32,
    /// Deterministic candidate choice instead of sampling from the policy.
    pub greedy: bool,
    pub costs: SegmentCosts,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            top_k: 3,
            beta: 1.0,
            done_credit: 0.1,
            think_mode: ThinkMode::DynaThink,
            budget: STEP_BUDGET,
            greedy: false,
            costs: SegmentCosts::default(),
        }
    }
}

impl AgentConfig {
    pub fn mode(think_mode: ThinkMode) -> Self {
        AgentConfig { think_mode, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.top_k == 0 {
            return Err(Error::Config("top_k must be at least 1".into()));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!("beta must be a finite non-negative number, got {}", self.beta)));
        }
        if !(self.done_credit > 0.0 && self.done_credit.is_finite()) {
            return Err(Error::Config(format!("done_credit must be finite and positive, got {}", self.done_credit)));
        }
        if self.budget == 0 || self.budget > STEP_BUDGET {
            return Err(Error::Config(format!("budget must be in 1..={STEP_BUDGET}")));
        }
        Ok(())
    }
}
