//! Generates a few tasks per domain and solves each with the scripted planner.
//!
//! cargo run --example gen_tasks

use dynathink::worldsim::planner::solve;
use dynathink::worldsim::{generate_tasks, Domain, GeneratorConfig, Split};

fn main() -> dynathink::Result<()> {
    let sets = [
        (Domain::Files, Split::Train),
        (Domain::Dirs, Split::Train),
        (Domain::Nav, Split::Train),
        (Domain::Archive, Split::TestOod),
    ];
    for (domain, split) in sets {
        let tasks = generate_tasks(&GeneratorConfig::new(domain, split, 4, 7))?;
        for t in &tasks {
            let run = solve(t);
            let instr: Vec<String> = t.instruction.iter().map(|w| w.render()).collect();
            println!("{} opaque={} vocab={} :: {}", t.id, t.opaque, t.vocabulary().paths.len(), instr.join(" "));
            let plan: Vec<String> = run.actions.iter().map(|a| a.to_string()).collect();
            println!("    plan ({} steps): {}", plan.len(), plan.join("; "));
        }
    }
    Ok(())
}
