//! Iterative self-training with optional rationalization: failed tasks are
//! re-sampled with their evaluator appended as hints, and the hints are
//! removed again before training.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::dataset::{policy_examples, rejection_sample, TaskIndex};
use super::loops::train_policy;
use crate::cogmodel::CogParams;
use crate::deliberation::{Agent, WmSource};
use crate::error::Result;
use crate::evalharness::evaluate_policy;
use crate::traces::Trajectory;
use crate::worldsim::TaskSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterMetrics {
    pub iteration: usize,
    /// Distinct train tasks with a collected success so far.
    pub solved_train: usize,
    pub solved_opaque: usize,
    pub hinted_successes: usize,
    pub train_bon: f64,
    pub train_avg: f64,
    pub test_bon: f64,
    pub test_avg: f64,
}

/// Each iteration samples with the current policy, collects successes, then
/// retrains from `init` on every success collected so far.
pub fn iterate_star(
    init: &CogParams,
    train: &[TaskSpec],
    test: &[TaskSpec],
    with_hint: bool,
    cfg: &TrainConfig,
) -> Result<(CogParams, Vec<IterMetrics>)> {
    cfg.validate()?;
    let index = TaskIndex::new(train);
    let plain: Vec<TaskSpec> = train.iter().map(|t| t.strip_hints()).collect();
    let opaque: BTreeMap<&str, bool> = train.iter().map(|t| (t.id.as_str(), t.opaque)).collect();
    let mut collected: BTreeMap<String, Trajectory> = BTreeMap::new();
    let mut cur = init.clone();
    let mut metrics = Vec::new();
    for it in 0..cfg.iterations {
        let seeds = cfg.rollout_seeds(it);
        let mut hinted_successes = 0;
        {
            let agent = Agent { params: &cur, wm: WmSource::Own, config: &cfg.agent };
            let r = rejection_sample(&agent, &plain, &seeds, cfg.workers);
            for t in r.successes {
                collected.entry(t.task_id.clone()).or_insert(t);
            }
            if with_hint {
                let failed: Vec<TaskSpec> = plain
                    .iter()
                    .filter(|t| !collected.contains_key(&t.id))
                    .map(|t| t.with_hints())
                    .collect();
                let r = rejection_sample(&agent, &failed, &seeds, cfg.workers);
                hinted_successes = r.successes.len();
                for t in r.successes {
                    collected.entry(t.task_id.clone()).or_insert(t);
                }
            }
        }
        // Contexts are rebuilt from the hint-free tasks, so hints never reach
        // the training data.
        let data: Vec<Trajectory> = collected.values().cloned().collect();
        let examples = policy_examples(&index, &data);
        cur = init.clone();
        train_policy(&mut cur, &examples, cfg.epochs_policy, cfg.lr_policy, cfg.batch_size, cfg.seed ^ it as u64)?;

        let agent = Agent { params: &cur, wm: WmSource::Own, config: &cfg.agent };
        let eval_seeds = cfg.eval_seeds();
        let (tr, _) = evaluate_policy(&agent, &plain, &eval_seeds, cfg.workers, "");
        let (te, _) = evaluate_policy(&agent, test, &eval_seeds, cfg.workers, "");
        metrics.push(IterMetrics {
            iteration: it + 1,
            solved_train: collected.len(),
            solved_opaque: collected.keys().filter(|k| opaque[k.as_str()]).count(),
            hinted_successes,
            train_bon: tr.bon("all"),
            train_avg: tr.avg("all"),
            test_bon: te.bon("all"),
            test_avg: te.avg("all"),
        });
    }
    Ok((cur, metrics))
}
