//! Baseline: a separate world model trained on real rollouts stands in for
//! the environment, and its judged successes join the policy data.
//!
//! cargo run --release --example vanilla_dyna [seed]

use dynathink::cogmodel::CogParams;
use dynathink::deliberation::{rollout_many, Agent, AgentConfig, ThinkMode, WmSource};
use dynathink::dynatrain::{rejection_sample, train_dit, train_vanilla_dyna, TrainConfig};
use dynathink::evalharness::evaluate_policy;
use dynathink::runner::{generate_task_set, split_of, test_tasks, TaskSetConfig};
use dynathink::traces::Trajectory;
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
    let (p, _, report) = train_vanilla_dyna(&p1, &train, &rollouts, &cfg)?;
    println!("{report:#?}");
    for (name, q) in [("before", &p1), ("after", &p)] {
        let (r, _) = evaluate_policy(&Agent { params: q, wm: WmSource::Own, config: &cfg.agent }, &test, &cfg.eval_seeds(), 4, "");
        println!("{name:>6}: test BoN {:.3}  Avg {:.3}  wm acc {:.3}", r.bon("all"), r.avg("all"), r.wm_accuracy);
    }
    Ok(())
}
