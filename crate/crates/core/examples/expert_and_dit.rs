//! The verbose expert explores, recalls and simulates several candidates per
//! step; reconstruction keeps only what bears on the executed action. The
//! compressed traces are then used for imitation.
//!
//! cargo run --release --example expert_and_dit [seed]

use dynathink::cogmodel::CogParams;
use dynathink::deliberation::{rollout_many, Agent, AgentConfig, ThinkMode, WmSource};
use dynathink::dynatrain::{train_dit, TrainConfig};
use dynathink::evalharness::{evaluate_policy, length_stats};
use dynathink::runner::{generate_task_set, split_of, TaskSetConfig};
use dynathink::traces::{reconstruct_dit, ActionRecord, Payload, Trajectory};
use dynathink::worldsim::{format_set, Split};

fn show(r: &ActionRecord) {
    for s in &r.trace {
        let what = match &s.payload {
            Payload::Effects { effects } => format_set(effects),
            Payload::Tokens { tokens } => tokens.join(" "),
            other => format!("{other:?}"),
        };
        let on = s.action_ref.as_ref().map(|a| a.to_string()).unwrap_or_default();
        println!("    [{:>2}] {:<12} {:<28} {}", s.id, s.tag, on, what);
    }
}

fn main() -> dynathink::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let tasks = generate_task_set(&TaskSetConfig::default(), seed)?;
    let train = split_of(&tasks, Split::Train);
    let cfg = TrainConfig { seed, workers: 4, ..Default::default() };

    let p0 = CogParams::new(seed);
    let ecfg = AgentConfig::mode(ThinkMode::VerboseExpert);
    let expert: Vec<Trajectory> = {
        let agent = Agent { params: &p0, wm: WmSource::Own, config: &ecfg };
        rollout_many(&agent, &train, &[seed], cfg.workers).into_iter().flatten().collect()
    };
    let dit: Vec<Trajectory> = expert
        .iter()
        .map(|t| {
            let mut r = t.clone();
            r.records.iter_mut().for_each(|rec| *rec = reconstruct_dit(rec));
            r
        })
        .collect();
    let solved = expert.iter().filter(|t| t.success()).count();
    println!("expert solved {solved}/{}", expert.len());
    println!("first step of {}, verbose:", expert[0].task_id);
    show(&expert[0].records[0]);
    println!("  reconstructed:");
    show(&dit[0].records[0]);

    let (_, p90_e) = length_stats(&expert).expect("steps");
    let (_, p90_d) = length_stats(&dit).expect("steps");
    println!("p90 step cost: expert {p90_e}, reconstructed {p90_d} ({:.2}x)", p90_d as f64 / p90_e as f64);

    let (p1, report) = train_dit(&p0, &train, &expert, &cfg)?;
    println!("imitation: {} trajectories, {} steps, {} transition samples", report.trajectories, report.steps, report.wm_samples);
    for (name, p) in [("untrained", &p0), ("after DIT", &p1)] {
        let agent = Agent { params: p, wm: WmSource::Own, config: &cfg.agent };
        let (r, _) = evaluate_policy(&agent, &tasks, &cfg.eval_seeds(), cfg.workers, "");
        println!("{name:>10}: train BoN {:.3}  test-id BoN {:.3}  test-ood BoN {:.3}", r.bon("train"), r.bon("test-id"), r.bon("test-ood"));
    }
    Ok(())
}
