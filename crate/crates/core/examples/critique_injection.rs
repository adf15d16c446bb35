//! Critique data for the world model: compare the simulation of the executed
//! action with what actually happened, insert the verdict right after that
//! simulation, and train only on the inserted segment.
//!
//! cargo run --example critique_injection

use dynathink::cogmodel::CogParams;
use dynathink::deliberation::{rollout, Agent, AgentConfig, WmSource};
use dynathink::traces::{inject_critique, rule_critic, strip_critiques, SegmentCosts};
use dynathink::worldsim::{format_set, generate_tasks, Domain, GeneratorConfig, Split};

fn main() -> dynathink::Result<()> {
    let task = generate_tasks(&GeneratorConfig::new(Domain::Files, Split::Train, 1, 5))?.remove(0);
    // An untrained model predicts the same effects for everything, so its
    // simulations are wrong often enough to be interesting.
    let p = CogParams::new(5);
    let cfg = AgentConfig::default();
    let traj = rollout(&Agent { params: &p, wm: WmSource::Own, config: &cfg }, &task, 0);
    let costs = SegmentCosts::default();
    for (i, rec) in traj.records.iter().enumerate().take(4) {
        let actual = traj.effects(i);
        let c = rule_critic(rec, &actual)?;
        let injected = inject_critique(rec, &c, &costs)?;
        let mask = injected.mask.as_ref().expect("injection sets a mask");
        println!("step {i}: {}  actual {}", rec.action, format_set(&actual));
        println!("  verdict {:?}, missing {:?}, spurious {:?}", c.verdict, c.correction.missing, c.correction.spurious);
        for (s, m) in injected.trace.iter().zip(mask) {
            let on = s.action_ref.as_ref().map(|a| a.to_string()).unwrap_or_default();
            println!("    {} [{:>2}] {:<12} {on}", if *m { "train" } else { "     " }, s.id, s.tag);
        }
        assert_eq!(mask.iter().filter(|m| **m).count(), 1);
        assert_eq!(&strip_critiques(&injected), rec);
    }
    Ok(())
}
