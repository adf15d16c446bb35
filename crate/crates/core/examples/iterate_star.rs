//! Iterative self-training with and without hinted retries on a task set
//! where a third of the tasks hide one of their goal atoms.
//!
//! cargo run --release --example iterate_star [seed]

use dynathink::cogmodel::CogParams;
use dynathink::deliberation::{rollout_many, Agent, AgentConfig, ThinkMode, WmSource};
use dynathink::dynatrain::{iterate_star, train_dit, TrainConfig};
use dynathink::runner::{generate_task_set, split_of, test_tasks, TaskSetConfig};
use dynathink::traces::Trajectory;
use dynathink::worldsim::Split;

fn main() -> dynathink::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let set = TaskSetConfig { opaque_fraction: 0.35, test_ood: 0, ..Default::default() };
    let tasks = generate_task_set(&set, seed)?;
    let (train, test) = (split_of(&tasks, Split::Train), test_tasks(&tasks));
    println!("{} of {} train tasks are opaque", train.iter().filter(|t| t.opaque).count(), train.len());
    let cfg = TrainConfig { seed, workers: 4, iterations: 5, ..Default::default() };

    let p0 = CogParams::new(seed);
    let ecfg = AgentConfig::mode(ThinkMode::VerboseExpert);
    let expert: Vec<Trajectory> = rollout_many(&Agent { params: &p0, wm: WmSource::Own, config: &ecfg }, &train, &[seed], 4)
        .into_iter()
        .flatten()
        .collect();
    let (p1, _) = train_dit(&p0, &train, &expert, &cfg)?;
    for hint in [false, true] {
        let (_, metrics) = iterate_star(&p1, &train, &test, hint, &cfg)?;
        println!("with_hint = {hint}");
        for m in metrics {
            println!(
                "  iter {}  solved {:>3} (opaque {:>2})  hinted {:>2}  train BoN {:.3}  test BoN {:.3}",
                m.iteration, m.solved_train, m.solved_opaque, m.hinted_successes, m.train_bon, m.test_bon
            );
        }
    }
    Ok(())
}
