//! Baseline: a separate world model serves as a simulated environment whose
//! judged successes augment the policy data.

use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::dataset::{policy_examples, wm_set, Rollouts, TaskIndex};
use super::loops::{train_policy, train_wm};
use crate::cogmodel::{CogParams, SeparateWm};
use crate::deliberation::{in_pool, simulated_rollout, Agent, WmSource};
use crate::error::Result;
use crate::traces::{EndReason, Trajectory, WmOptions, WmVariant};
use crate::worldsim::TaskSpec;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanillaReport {
    pub parity_hash: String,
    pub wm_samples: usize,
    pub real_successes: usize,
    pub simulated_runs: usize,
    pub simulated_successes: usize,
    /// Simulated rollouts cut short by an inapplicable prediction.
    pub diverged: usize,
    pub policy_examples: usize,
}

/// Rolls the policy out against `env` once per seed; returns every
/// simulated trajectory in `[task][seed]` order.
pub fn simulate_all(agent: &Agent<'_>, env: &SeparateWm, tasks: &[TaskSpec], seeds: &[u64], workers: usize) -> Vec<Trajectory> {
    let jobs: Vec<(usize, u64)> = (0..tasks.len()).flat_map(|i| seeds.iter().map(move |s| (i, *s))).collect();
    in_pool(workers, || jobs.par_iter().map(|(i, s)| simulated_rollout(agent, env, &tasks[*i], *s)).collect())
}

/// `tasks` are both the real tasks behind `rollouts` and the instructions
/// used for simulated rollouts.
pub fn train_vanilla_dyna(
    params: &CogParams,
    tasks: &[TaskSpec],
    rollouts: &Rollouts,
    cfg: &TrainConfig,
) -> Result<(CogParams, SeparateWm, VanillaReport)> {
    cfg.validate()?;
    let index = TaskIndex::new(tasks);
    let opts = WmOptions { wait_only: false, costs: cfg.agent.costs.clone() };
    let (samples, _) = wm_set(&index, &rollouts.all, WmVariant::StateDelta, &opts);
    let mut mu = SeparateWm::zeros(params.hash_seed, params.dim);
    train_wm(&mut mu, &samples, cfg.epochs_wm, cfg.lr_wm, cfg.batch_size, cfg.seed)?;

    let sims = {
        let agent = Agent { params, wm: WmSource::Own, config: &cfg.agent };
        simulate_all(&agent, &mu, tasks, &cfg.rollout_seeds(0), cfg.workers)
    };
    let diverged = sims.iter().filter(|t| t.end == EndReason::Aborted).count();
    let mut judged = Vec::new();
    for t in sims.iter().filter(|t| t.success()) {
        if !judged.iter().any(|j: &Trajectory| j.task_id == t.task_id) {
            judged.push(t.clone());
        }
    }
    let mut data = rollouts.successes.clone();
    data.extend(judged.iter().cloned());
    let examples = policy_examples(&index, &data);
    let mut out = params.clone();
    train_policy(&mut out, &examples, cfg.epochs_policy, cfg.lr_policy, cfg.batch_size, cfg.seed ^ 1)?;
    let report = VanillaReport {
        parity_hash: rollouts.parity_hash(),
        wm_samples: samples.len(),
        real_successes: rollouts.successes.len(),
        simulated_runs: sims.len(),
        simulated_successes: judged.len(),
        diverged,
        policy_examples: examples.len(),
    };
    Ok((out, mu, report))
}
