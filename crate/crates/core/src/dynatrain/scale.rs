//! World-model scaling on synthetic tasks, followed by one policy round on
//! an unchanged policy set.

use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::dataset::{rejection_sample, wm_set, TaskIndex};
use super::loops::{train_policy, train_wm};
use crate::cogmodel::{weight_hash, CogParams, Head, PolicyExample};
use crate::deliberation::{Agent, WmSource};
use crate::error::Result;
use crate::evalharness::{effect_accuracy, evaluate_policy};
use crate::traces::{WmOptions, WmSample, WmVariant};
use crate::worldsim::{generate_tasks, Domain, GeneratorConfig, Split, TaskSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleConfig {
    pub extra_per_domain: usize,
    pub variant: WmVariant,
    /// Generator seed for the synthetic tasks.
    pub synth_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleReport {
    pub synthetic_tasks: usize,
    pub wm_samples: usize,
    pub heldout_before: f64,
    pub heldout_after: f64,
    pub bon_before: f64,
    pub bon_after: f64,
    /// The world-model stage left the policy head alone.
    pub policy_untouched_by_wm: bool,
}

pub fn synthetic_tasks(count_per_domain: usize, seed: u64) -> Result<Vec<TaskSpec>> {
    let mut out = Vec::new();
    for d in [Domain::Files, Domain::Dirs, Domain::Nav] {
        out.extend(generate_tasks(&GeneratorConfig::new(d, Split::Train, count_per_domain, seed))?);
    }
    Ok(out)
}

/// Rolls the current model out on synthetic tasks, trains the world model on
/// every terminated trajectory regardless of reward, then runs one policy
/// round on `policy_set`. BoN is measured on `eval_tasks` before and after.
pub fn scale_wm(
    params: &CogParams,
    policy_set: &[PolicyExample],
    eval_tasks: &[TaskSpec],
    heldout: &[WmSample],
    scale: &ScaleConfig,
    cfg: &TrainConfig,
) -> Result<(CogParams, ScaleReport)> {
    cfg.validate()?;
    let synth = synthetic_tasks(scale.extra_per_domain, scale.synth_seed)?;
    let index = TaskIndex::new(&synth);
    let eval_seeds = cfg.eval_seeds();
    let (rollouts, bon_before) = {
        let agent = Agent { params, wm: WmSource::Own, config: &cfg.agent };
        let r = rejection_sample(&agent, &synth, &cfg.rollout_seeds(0), cfg.workers);
        (r, evaluate_policy(&agent, eval_tasks, &eval_seeds, cfg.workers, "").0.bon("all"))
    };
    let opts = WmOptions { wait_only: cfg.wait_only, costs: cfg.agent.costs.clone() };
    let (samples, _) = wm_set(&index, &rollouts.all, scale.variant, &opts);

    let mut out = params.clone();
    let policy_hash = weight_hash(&out, Head::Policy);
    train_wm(&mut out, &samples, cfg.epochs_wm, cfg.lr_wm, cfg.batch_size, cfg.seed)?;
    let policy_untouched_by_wm = weight_hash(&out, Head::Policy) == policy_hash;
    train_policy(&mut out, policy_set, cfg.epochs_policy, cfg.lr_policy, cfg.batch_size, cfg.seed ^ 1)?;

    let agent = Agent { params: &out, wm: WmSource::Own, config: &cfg.agent };
    let bon_after = evaluate_policy(&agent, eval_tasks, &eval_seeds, cfg.workers, "").0.bon("all");
    let report = ScaleReport {
        synthetic_tasks: synth.len(),
        wm_samples: samples.len(),
        heldout_before: effect_accuracy(params, heldout),
        heldout_after: effect_accuracy(&out, heldout),
        bon_before,
        bon_after,
        policy_untouched_by_wm,
    };
    Ok((out, report))
}
