//! Same rollouts, two uses: policy learning only, or a world-model stage
//! (next state, state delta, or critique) followed by the same policy stage.
//!
//! cargo run --release --example ddt_vs_rft [seed]

use dynathink::cogmodel::CogParams;
use dynathink::deliberation::{rollout_many, Agent, AgentConfig, ThinkMode, WmSource};
use dynathink::dynatrain::{rejection_sample, train_dit, train_round, TaskIndex, TrainConfig};
use dynathink::evalharness::evaluate_policy;
use dynathink::runner::{generate_task_set, split_of, test_tasks, TaskSetConfig};
use dynathink::traces::{Trajectory, WmVariant};
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
    let rollouts = rejection_sample(&Agent { params: &p1, wm: WmSource::Own, config: &cfg.agent }, &train, &cfg.rollout_seeds(0), 4);
    println!("rollouts: {} terminated, {} successes, parity {}", rollouts.all.len(), rollouts.successes.len(), &rollouts.parity_hash()[..12]);

    let index = TaskIndex::new(&train);
    let variants = [None, Some(WmVariant::NextState), Some(WmVariant::StateDelta), Some(WmVariant::Critique)];
    for v in variants {
        let mut p = p1.clone();
        let log = train_round(&mut p, &index, &rollouts, v, &cfg, 0)?;
        let agent = Agent { params: &p, wm: WmSource::Own, config: &cfg.agent };
        let (r, _) = evaluate_policy(&agent, &test, &cfg.eval_seeds(), 4, "");
        let name = v.map_or("rft".to_string(), |v| format!("ddt/{v}"));
        println!(
            "{name:<16} wm samples {:>5}  test wm acc {:.3}  BoN {:.3}  Avg {:.3}  parity {}",
            log.wm_samples, r.wm_accuracy, r.bon("all"), r.avg("all"), &log.parity_hash[..12]
        );
    }
    Ok(())
}
