use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::segment::ActionRecord;
use crate::worldsim::{infer_effects, Action, EffectSet, Observation};

pub const TRACE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndReason {
    /// The agent emitted `done`.
    Done,
    /// The step budget ran out.
    Budget,
    /// The rollout was cut short (e.g. a simulated rollout diverged).
    Aborted,
}

/// `observations[i]` precedes `records[i]`; the final observation follows the
/// last record, so `observations.len() == records.len() + 1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub schema_version: u32,
    pub task_id: String,
    pub seed: u64,
    pub observations: Vec<Observation>,
    pub records: Vec<ActionRecord>,
    pub reward: u8,
    pub end: EndReason,
    pub terminated_within_budget: bool,
    /// Rolled out against a learned model instead of the simulator.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub simulated: bool,
}

impl Trajectory {
    pub fn new(task_id: &str, seed: u64, o0: Observation) -> Self {
        Trajectory {
            schema_version: TRACE_SCHEMA_VERSION,
            task_id: task_id.to_string(),
            seed,
            observations: vec![o0],
            records: Vec::new(),
            reward: 0,
            end: EndReason::Aborted,
            terminated_within_budget: false,
            simulated: false,
        }
    }

    pub fn push(&mut self, record: ActionRecord, next: Observation) {
        self.records.push(record);
        self.observations.push(next);
    }

    pub fn finish(&mut self, end: EndReason, reward: u8) {
        self.end = end;
        self.reward = reward;
        self.terminated_within_budget = end != EndReason::Aborted;
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn success(&self) -> bool {
        self.reward == 1
    }

    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.records.iter().map(|r| &r.action)
    }

    /// Effects of step `i`, read off the observation that followed it.
    pub fn effects(&self, i: usize) -> EffectSet {
        infer_effects(&self.records[i].action, &self.observations[i + 1])
    }

    pub fn cost(&self) -> u32 {
        self.records.iter().map(|r| r.cost()).sum()
    }

    /// Hex sha256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("trajectory serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
