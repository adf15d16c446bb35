//! Episodes: agent and simulator (or a learned model) in alternation.

use rand::SeedableRng;
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::agent::{Agent, StepInput};
use crate::cogmodel::{predict_effects, SeparateWm};
use crate::traces::{EndReason, Replay, Trajectory};
use crate::worldsim::{
    evaluate, infer_effects, transition, Action, Belief, EffectAtom, LastOutput, Observation, TaskSpec,
};

/// RNG seed for one (task, run) pair, so results do not depend on which
/// worker runs which episode.
pub fn episode_seed(task_id: &str, seed: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in task_id.bytes().chain(seed.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Runs `task` with the true simulator until `done` or the step budget.
pub fn rollout(agent: &Agent<'_>, task: &TaskSpec, seed: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(episode_seed(&task.id, seed));
    let mut state = task.initial_state().expect("validated task");
    let o0 = state.observe();
    let mut replay = Replay::new(task, &o0);
    let mut traj = Trajectory::new(&task.id, seed, o0);
    for _ in 0..agent.config.budget {
        let i = traj.records.len();
        let previous = i.checked_sub(1).map(|j| (&traj.records[j], traj.effects(j)));
        let input = StepInput {
            task,
            replay: &replay,
            context: replay.context(&traj.observations[i]),
            previous,
            truth: Some(&state),
        };
        let record = agent.act(&input, &mut rng);
        let t = transition(&state, &record.action);
        replay.advance(&record.action, &t.observation);
        traj.push(record, t.observation);
        state = t.state;
        if t.terminal {
            traj.finish(EndReason::Done, evaluate(&state, &task.evaluator));
            return traj;
        }
    }
    traj.finish(EndReason::Budget, evaluate(&state, &task.evaluator));
    traj
}

/// The observation a shadow state would show after `effects`.
fn shadow_observation(shadow: &Belief, action: &Action, effects: &crate::worldsim::EffectSet, step: u32) -> Observation {
    let listing = shadow.listing();
    let last_output = if effects.contains(&EffectAtom::OutputError) {
        LastOutput::error(action.verb().as_str())
    } else if effects.contains(&EffectAtom::OutputListing) {
        LastOutput::listing(&listing)
    } else {
        LastOutput::empty()
    };
    Observation { cwd: shadow.cwd.clone(), listing, last_output, step }
}

/// Runs `task` against a learned world model: its predicted effects are
/// applied to a shadow state that stands in for the simulator, and success is
/// judged by the evaluator atoms on that shadow state. A prediction that
/// cannot be applied ends the rollout `Aborted` with reward 0.
pub fn simulated_rollout(agent: &Agent<'_>, env: &SeparateWm, task: &TaskSpec, seed: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(episode_seed(&task.id, seed) ^ 0x5eed_d1a5);
    let o0 = task.initial_state().expect("validated task").observe();
    let mut replay = Replay::new(task, &o0);
    let mut shadow = replay.belief().clone();
    let mut traj = Trajectory::new(&task.id, seed, o0);
    traj.simulated = true;
    let judge = |b: &Belief| task.evaluator.iter().all(|g| b.holds(g)) as u8;
    for step in 0..agent.config.budget {
        let i = traj.records.len();
        let previous = i.checked_sub(1).map(|j| (&traj.records[j], traj.effects(j)));
        let ctx = replay.context(&traj.observations[i]);
        let input = StepInput { task, replay: &replay, context: ctx.clone(), previous, truth: None };
        let record = agent.act(&input, &mut rng);
        let effects = predict_effects(env, &ctx, &record.action);
        if shadow.apply(&record.action, &effects).is_err() {
            traj.finish(EndReason::Aborted, 0);
            return traj;
        }
        let obs = shadow_observation(&shadow, &record.action, &effects, step + 1);
        // The agent reads effects off the observation; a prediction it would
        // read differently cannot be replayed and counts as a divergence.
        if infer_effects(&record.action, &obs) != effects {
            traj.finish(EndReason::Aborted, 0);
            return traj;
        }
        replay.advance(&record.action, &obs);
        let done = matches!(record.action, Action::Done);
        traj.push(record, obs);
        if done {
            traj.finish(EndReason::Done, judge(&shadow));
            return traj;
        }
    }
    traj.finish(EndReason::Budget, judge(&shadow));
    traj
}

/// Runs every task once per seed on a pool of `workers` threads. Output is
/// indexed `[task][run]` and does not depend on the worker count.
pub fn rollout_many(agent: &Agent<'_>, tasks: &[TaskSpec], seeds: &[u64], workers: usize) -> Vec<Vec<Trajectory>> {
    let jobs: Vec<(usize, u64)> = (0..tasks.len()).flat_map(|i| seeds.iter().map(move |s| (i, *s))).collect();
    let flat: Vec<Trajectory> = in_pool(workers, || jobs.par_iter().map(|(i, s)| rollout(agent, &tasks[*i], *s)).collect());
    let mut it = flat.into_iter();
    (0..tasks.len()).map(|_| it.by_ref().take(seeds.len()).collect()).collect()
}

/// Runs `f` on a dedicated pool with `workers` threads (at least one).
pub fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}
