//! Rejection sampling and dataset construction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cogmodel::PolicyExample;
use crate::deliberation::{rollout_many, Agent};
use crate::traces::{replay_contexts, Trajectory, WmOptions, WmSample, WmVariant};
use crate::worldsim::TaskSpec;

/// Hint-free tasks by id; every dataset is rebuilt against these.
#[derive(Clone, Debug, Default)]
pub struct TaskIndex(BTreeMap<String, TaskSpec>);

impl TaskIndex {
    pub fn new<'a>(tasks: impl IntoIterator<Item = &'a TaskSpec>) -> Self {
        TaskIndex(tasks.into_iter().map(|t| (t.id.clone(), t.strip_hints())).collect())
    }

    pub fn get(&self, id: &str) -> Option<&TaskSpec> {
        self.0.get(id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Rollouts {
    /// At most one reward-1 trajectory per task: the first in seed order.
    pub successes: Vec<Trajectory>,
    /// Every trajectory that terminated within budget.
    pub all: Vec<Trajectory>,
}

impl Rollouts {
    /// Hash over every trajectory, identifying the data a run consumed.
    pub fn parity_hash(&self) -> String {
        let mut h = Sha256::new();
        for t in &self.all {
            h.update(t.hash());
        }
        h.update(b"|");
        for t in &self.successes {
            h.update(t.hash());
        }
        hex::encode(h.finalize())
    }

    pub fn extend(&mut self, other: Rollouts) {
        self.successes.extend(other.successes);
        self.all.extend(other.all);
    }
}

/// `seeds.len()` rollouts per task (`k = seeds.len()`).
pub fn rejection_sample(agent: &Agent<'_>, tasks: &[TaskSpec], seeds: &[u64], workers: usize) -> Rollouts {
    let runs = rollout_many(agent, tasks, seeds, workers);
    let mut out = Rollouts::default();
    for per_task in runs {
        if let Some(s) = per_task.iter().find(|t| t.success()) {
            out.successes.push(s.clone());
        }
        out.all.extend(per_task.into_iter().filter(|t| t.terminated_within_budget));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub task_id: String,
    pub seed: u64,
    pub trajectory_hash: String,
}

#[derive(Clone, Debug, Default)]
pub struct DatasetBundle {
    pub policy_set: Vec<PolicyExample>,
    pub policy_trajectories: usize,
    pub wm_set: Vec<WmSample>,
    pub provenance: Vec<Provenance>,
    /// Critique samples skipped because the step had no simulation.
    pub no_simulation: usize,
}

/// Behaviour-cloning examples (reward 1) for every step of every trajectory,
/// with contexts rebuilt from the hint-free task.
pub fn policy_examples(index: &TaskIndex, trajectories: &[Trajectory]) -> Vec<PolicyExample> {
    let mut out = Vec::new();
    for t in trajectories.iter().filter(|t| t.success()) {
        let task = index.get(&t.task_id).expect("trajectory of an indexed task");
        for (ctx, r) in replay_contexts(task, t).into_iter().zip(&t.records) {
            out.push(PolicyExample { context: ctx, action: r.action.clone(), reward: 1.0 });
        }
    }
    out
}

pub fn wm_set(index: &TaskIndex, trajectories: &[Trajectory], variant: WmVariant, opts: &WmOptions) -> (Vec<WmSample>, usize) {
    let mut samples = Vec::new();
    let mut skipped = 0;
    for t in trajectories {
        let task = index.get(&t.task_id).expect("trajectory of an indexed task");
        let s = crate::traces::wm_samples(task, t, variant, opts);
        samples.extend(s.samples);
        skipped += s.no_simulation;
    }
    (samples, skipped)
}

pub fn build_bundle(index: &TaskIndex, rollouts: &Rollouts, variant: Option<WmVariant>, opts: &WmOptions) -> DatasetBundle {
    let (wm, skipped) = match variant {
        Some(v) => wm_set(index, &rollouts.all, v, opts),
        None => (Vec::new(), 0),
    };
    DatasetBundle {
        policy_set: policy_examples(index, &rollouts.successes),
        policy_trajectories: rollouts.successes.len(),
        wm_set: wm,
        provenance: rollouts
            .all
            .iter()
            .map(|t| Provenance { task_id: t.task_id.clone(), seed: t.seed, trajectory_hash: t.hash() })
            .collect(),
        no_simulation: skipped,
    }
}
