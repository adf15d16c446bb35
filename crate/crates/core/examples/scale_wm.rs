//! More world-model data from synthetic tasks: held-out effect accuracy and
//! test BoN at 1x and 2x extra data, on an unchanged policy set.
//!
//! cargo run --release --example scale_wm [seed]

use dynathink::cogmodel::CogParams;
use dynathink::deliberation::{rollout_many, Agent, AgentConfig, ThinkMode, WmSource};
use dynathink::dynatrain::{
    policy_examples, rejection_sample, scale_wm, train_dit, train_round, wm_set, ScaleConfig, TaskIndex, TrainConfig,
};
use dynathink::runner::{generate_task_set, split_of, test_tasks, TaskSetConfig};
use dynathink::traces::{Trajectory, WmOptions, WmVariant};
use dynathink::worldsim::Split;

fn main() -> dynathink::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let tasks = generate_task_set(&TaskSetConfig::default(), seed)?;
    let (train, test) = (split_of(&tasks, Split::Train), test_tasks(&tasks));
    let cfg = TrainConfig { seed, workers: 4, ..Default::default() };

    let p0 = CogParams::new(seed);
    let ecfg = AgentConfig::mode(ThinkMode::VerboseExpert);
    let expert: Vec<Trajectory> = rollout_many(&Agent { params: &p0, wm: WmSource::Own, config: &ecfg }, &train, &[seed], 4)
        .into_iter()
        .flatten()
        .collect();
    let (p1, _) = train_dit(&p0, &train, &expert, &cfg)?;
    let index = TaskIndex::new(&train);
    let rollouts = rejection_sample(&Agent { params: &p1, wm: WmSource::Own, config: &cfg.agent }, &train, &cfg.rollout_seeds(0), 4);
    let mut p = p1.clone();
    train_round(&mut p, &index, &rollouts, Some(WmVariant::Critique), &cfg, 0)?;
    let policy_set = policy_examples(&index, &rollouts.successes);

    // Held-out transitions: broad rollouts of the untrained model on test tasks.
    let explore = rejection_sample(&Agent { params: &p0, wm: WmSource::Own, config: &cfg.agent }, &test, &cfg.rollout_seeds(7), 4);
    let (heldout, _) = wm_set(&TaskIndex::new(&test), &explore.all, WmVariant::StateDelta, &WmOptions::default());

    for k in [40, 80] {
        let sc = ScaleConfig { extra_per_domain: k, variant: WmVariant::StateDelta, synth_seed: seed + 1000 };
        let (_, r) = scale_wm(&p, &policy_set, &test, &heldout, &sc, &cfg)?;
        println!(
            "{k:>3}/domain: {} synthetic tasks, {} samples  held-out acc {:.3} -> {:.3}  test BoN {:.3} -> {:.3}",
            r.synthetic_tasks, r.wm_samples, r.heldout_before, r.heldout_after, r.bon_before, r.bon_after
        );
    }
    Ok(())
}
