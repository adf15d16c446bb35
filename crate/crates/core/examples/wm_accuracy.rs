//! World-model accuracy and its correlation with success, for the same
//! policy simulating with the true simulator and with its own model.
//!
//! cargo run --release --example wm_accuracy [seed]

use dynathink::cogmodel::CogParams;
use dynathink::deliberation::{rollout_many, Agent, AgentConfig, ThinkMode, WmSource};
use dynathink::dynatrain::{train_ddt, train_dit, TrainConfig};
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
    let (p, _) = train_ddt(&p1, &train, WmVariant::Critique, &cfg)?;

    let greedy = AgentConfig { greedy: true, ..cfg.agent.clone() };
    for (name, wm, ac) in [
        ("oracle, sampled", WmSource::Oracle, &cfg.agent),
        ("own, sampled", WmSource::Own, &cfg.agent),
        ("own, greedy", WmSource::Own, &greedy),
    ] {
        let (r, _) = evaluate_policy(&Agent { params: &p, wm, config: ac }, &test, &cfg.eval_seeds(), 4, "");
        let corr = r.pearson_r.map_or("undefined".to_string(), |x| format!("{x:.3}"));
        println!("{name:<16} wm acc {:.3}  BoN {:.3}  Avg {:.3}  r(wm acc, success) {corr}", r.wm_accuracy, r.bon("all"), r.avg("all"));
    }
    Ok(())
}
