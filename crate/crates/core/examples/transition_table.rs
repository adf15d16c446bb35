//! Every legal action from one task's start state, with the effect set the
//! simulator produces and what the agent would read off the observation.
//!
//! cargo run --example transition_table [seed]

use dynathink::worldsim::{
    format_set, generate_tasks, infer_effects, legal_actions, transition, Domain, GeneratorConfig, Split,
};

fn main() -> dynathink::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let task = generate_tasks(&GeneratorConfig::new(Domain::Dirs, Split::Train, 1, seed))?.remove(0);
    let state = task.initial_state()?;
    let instr: Vec<String> = task.instruction.iter().map(|t| t.render()).collect();
    println!("{}: {}", task.id, instr.join(" "));
    println!("cwd {}  listing {:?}\n", state.cwd, state.observe().listing.iter().map(|e| e.render()).collect::<Vec<_>>());
    for a in legal_actions(&task.vocabulary()) {
        let t = transition(&state, &a);
        let read = infer_effects(&a, &t.observation);
        assert_eq!(read, t.effects);
        println!("{:<34} {}", a.to_string(), format_set(&t.effects));
    }
    Ok(())
}
