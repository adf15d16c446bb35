//! Distillation, critique-based world-model training, and the policy-only
//! baseline.

use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::dataset::{build_bundle, policy_examples, rejection_sample, Rollouts, TaskIndex};
use super::loops::{train_policy, train_wm};
use crate::cogmodel::{CogParams, WeightStore};
use crate::deliberation::{Agent, WmSource};
use crate::error::Result;
use crate::traces::{
    reconstruct_dit, replay_contexts, Payload, Tag, Trajectory, WmOptions, WmSample, WmTarget, WmVariant,
    WM_SCHEMA_VERSION,
};
use crate::worldsim::TaskSpec;

/// What one sample-then-train round consumed and changed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageLog {
    pub round: usize,
    pub parity_hash: String,
    pub wm_samples: usize,
    pub policy_examples: usize,
    pub policy_trajectories: usize,
    pub no_simulation: usize,
    /// Parameter versions before and after the world-model stage.
    pub wm_versions: (u64, u64),
    /// Parameter versions before and after the policy stage.
    pub policy_versions: (u64, u64),
    pub wm_losses: Vec<f64>,
    pub policy_losses: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DitReport {
    pub trajectories: usize,
    pub steps: usize,
    pub wm_samples: usize,
    pub cost_before: u64,
    pub cost_after: u64,
}

/// Trains on reconstructed expert traces: the kept simulation of each executed
/// action becomes a transition sample, and each step a cloning example.
pub fn train_dit(
    params: &CogParams,
    tasks: &[TaskSpec],
    expert: &[Trajectory],
    cfg: &TrainConfig,
) -> Result<(CogParams, DitReport)> {
    cfg.validate()?;
    let index = TaskIndex::new(tasks);
    let mut out = params.clone();
    let mut report = DitReport { trajectories: 0, steps: 0, wm_samples: 0, cost_before: 0, cost_after: 0 };
    let mut samples = Vec::new();
    let mut kept = Vec::new();
    for t in expert.iter().filter(|t| t.success()) {
        let task = index.get(&t.task_id).expect("trajectory of an indexed task");
        let mut r = t.clone();
        for rec in r.records.iter_mut() {
            report.cost_before += rec.cost() as u64;
            *rec = reconstruct_dit(rec);
            report.cost_after += rec.cost() as u64;
        }
        for (i, (ctx, rec)) in replay_contexts(task, &r).into_iter().zip(&r.records).enumerate() {
            for s in rec.trace.iter().filter(|s| s.tag == Tag::Simulation) {
                if let Payload::Effects { effects } = &s.payload {
                    samples.push(WmSample {
                        schema_version: WM_SCHEMA_VERSION,
                        task_id: r.task_id.clone(),
                        seed: r.seed,
                        step: i,
                        context: ctx.clone(),
                        action: rec.action.clone(),
                        target: WmTarget::StateDelta { effects: effects.clone() },
                    });
                }
            }
        }
        report.trajectories += 1;
        report.steps += r.len();
        kept.push(r);
    }
    report.wm_samples = samples.len();
    let seed = cfg.seed;
    train_wm(&mut out, &samples, cfg.epochs_wm, cfg.lr_wm, cfg.batch_size, seed)?;
    let examples = policy_examples(&index, &kept);
    train_policy(&mut out, &examples, cfg.epochs_policy, cfg.lr_policy, cfg.batch_size, seed ^ 1)?;
    Ok((out, report))
}

fn options(cfg: &TrainConfig) -> WmOptions {
    WmOptions { wait_only: cfg.wait_only, costs: cfg.agent.costs.clone() }
}

/// One round on fixed rollouts. With a variant: world-model stage on every
/// terminated trajectory, then the policy stage on the successes. Without
/// one, only the policy stage runs.
pub fn train_round(
    params: &mut CogParams,
    tasks: &TaskIndex,
    rollouts: &Rollouts,
    variant: Option<WmVariant>,
    cfg: &TrainConfig,
    round: usize,
) -> Result<StageLog> {
    let bundle = build_bundle(tasks, rollouts, variant, &options(cfg));
    let seed = cfg.seed.wrapping_add(round as u64 * 7919);
    let v0 = params.version();
    let wm_losses = match variant {
        Some(_) => train_wm(params, &bundle.wm_set, cfg.epochs_wm, cfg.lr_wm, cfg.batch_size, seed)?,
        None => Vec::new(),
    };
    let v1 = params.version();
    let policy_losses =
        train_policy(params, &bundle.policy_set, cfg.epochs_policy, cfg.lr_policy, cfg.batch_size, seed ^ 1)?;
    Ok(StageLog {
        round,
        parity_hash: rollouts.parity_hash(),
        wm_samples: bundle.wm_set.len(),
        policy_examples: bundle.policy_set.len(),
        policy_trajectories: bundle.policy_trajectories,
        no_simulation: bundle.no_simulation,
        wm_versions: (v0, v1),
        policy_versions: (v1, params.version()),
        wm_losses,
        policy_losses,
    })
}

/// Samples with the current model, then trains; repeated `cfg.iterations`
/// times. `variant = None` is rejection-sampling fine-tuning.
pub fn train_iterated(
    params: &CogParams,
    tasks: &[TaskSpec],
    variant: Option<WmVariant>,
    cfg: &TrainConfig,
) -> Result<(CogParams, Vec<StageLog>)> {
    cfg.validate()?;
    let index = TaskIndex::new(tasks);
    let mut cur = params.clone();
    let mut logs = Vec::new();
    for round in 0..cfg.iterations {
        let rollouts = {
            let agent = Agent { params: &cur, wm: WmSource::Own, config: &cfg.agent };
            rejection_sample(&agent, tasks, &cfg.rollout_seeds(round), cfg.workers)
        };
        logs.push(train_round(&mut cur, &index, &rollouts, variant, cfg, round)?);
    }
    Ok((cur, logs))
}

pub fn train_ddt(
    params: &CogParams,
    tasks: &[TaskSpec],
    variant: WmVariant,
    cfg: &TrainConfig,
) -> Result<(CogParams, Vec<StageLog>)> {
    train_iterated(params, tasks, Some(variant), cfg)
}

pub fn train_rft(params: &CogParams, tasks: &[TaskSpec], cfg: &TrainConfig) -> Result<(CogParams, Vec<StageLog>)> {
    train_iterated(params, tasks, None, cfg)
}
