//! Scripted planner over the true simulator.
//!
//! Iterative deepening up to [`LOOKAHEAD`] steps: find the shortest action
//! sequence that raises the number of satisfied goal atoms without ever
//! un-satisfying one, and commit to its first action. Error transitions and
//! read-only actions are never expanded.

use super::action::Action;
use super::dynamics::transition;
use super::effects::EffectAtom;
use super::shadow::Belief;
use super::state::WorldState;
use super::task::{legal_actions, GoalAtom, TaskSpec, Vocabulary, STEP_BUDGET};

pub const LOOKAHEAD: usize = 3;

fn satisfied(state: &WorldState, goals: &[GoalAtom]) -> Vec<bool> {
    goals.iter().map(|g| g.holds(state)).collect()
}

fn count(s: &[bool]) -> usize {
    s.iter().filter(|b| **b).count()
}

fn keeps(before: &[bool], after: &[bool]) -> bool {
    before.iter().zip(after).all(|(b, a)| !*b || *a)
}

/// Actions worth expanding: mutating ones that respect the file-name
/// convention, plus `cd` only when a goal constrains the working directory.
fn expandable(actions: &[Action], goals: &[GoalAtom]) -> Vec<Action> {
    let want_cd = goals.iter().any(|g| matches!(g, GoalAtom::CwdIs { .. }));
    actions
        .iter()
        .filter(|a| match a {
            Action::Ls | Action::Done => false,
            Action::Cd(_) => want_cd,
            Action::Mkdir(p) => !p.looks_like_file(),
            Action::Touch(p) => p.looks_like_file(),
            _ => true,
        })
        .cloned()
        .collect()
}

fn search(
    state: &WorldState,
    goals: &[GoalAtom],
    actions: &[Action],
    base: &[bool],
    depth: usize,
) -> Option<Vec<Action>> {
    if depth == 1 {
        // Largest immediate gain wins; ties keep enumeration order.
        let mut best: Option<(usize, &Action)> = None;
        for a in actions {
            let t = transition(state, a);
            if t.effects.contains(&EffectAtom::OutputError) {
                continue;
            }
            let sat = satisfied(&t.state, goals);
            let gain = count(&sat);
            if keeps(base, &sat) && gain > count(base) && best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, a));
            }
        }
        return best.map(|(_, a)| vec![a.clone()]);
    }
    for a in actions {
        let t = transition(state, a);
        if t.effects.contains(&EffectAtom::OutputError) {
            continue;
        }
        let sat = satisfied(&t.state, goals);
        if !keeps(base, &sat) {
            continue;
        }
        if let Some(mut rest) = search(&t.state, goals, actions, &sat, depth - 1) {
            rest.insert(0, a.clone());
            return Some(rest);
        }
    }
    None
}

/// Shortest progress-making prefix (at most [`LOOKAHEAD`] actions), `[done]`
/// when every goal holds, or `None` when no progress is reachable.
pub fn plan_step(state: &WorldState, goals: &[GoalAtom], vocab: &Vocabulary) -> Option<Vec<Action>> {
    let base = satisfied(state, goals);
    if count(&base) == goals.len() {
        return Some(vec![Action::Done]);
    }
    let actions = expandable(&legal_actions(vocab), goals);
    (1..=LOOKAHEAD).find_map(|d| search(state, goals, &actions, &base, d))
}

/// Outcome of driving a task to completion with the planner.
#[derive(Clone, Debug)]
pub struct PlanRun {
    pub actions: Vec<Action>,
    pub solved: bool,
    /// True when no satisfied atom was ever un-satisfied along the way.
    pub monotone: bool,
}

/// Runs the planner against the full evaluator from the task's initial state.
pub fn solve(task: &TaskSpec) -> PlanRun {
    let vocab = task.vocabulary();
    let Ok(mut state) = task.initial_state() else {
        return PlanRun { actions: vec![], solved: false, monotone: false };
    };
    let mut actions = Vec::new();
    let mut monotone = true;
    let mut sat = satisfied(&state, &task.evaluator);
    while actions.len() < STEP_BUDGET as usize {
        let Some(prefix) = plan_step(&state, &task.evaluator, &vocab) else {
            break;
        };
        let a = prefix[0].clone();
        let t = transition(&state, &a);
        actions.push(a);
        if t.terminal {
            return PlanRun { actions, solved: true, monotone };
        }
        state = t.state;
        let next = satisfied(&state, &task.evaluator);
        monotone &= keeps(&sat, &next);
        sat = next;
    }
    PlanRun { actions, solved: false, monotone }
}

/// Runs the selection rule of a deliberating agent that has a perfect world
/// model but only its own belief state: every step picks the legal action
/// whose simulated belief satisfies the most instruction-rendered atoms,
/// counting `done` as one more when every rendered atom already holds; ties
/// go to the earlier action. True when that run ends with full reward.
pub fn greedy_overlap_solves(task: &TaskSpec) -> bool {
    let vocab = task.vocabulary();
    let rendered = task.rendered_atoms();
    let actions = legal_actions(&vocab);
    let Ok(mut state) = task.initial_state() else { return false };
    let mut belief = Belief::from_observation(&state.observe(), &vocab);
    for _ in 0..STEP_BUDGET {
        let mut best: Option<(usize, &Action)> = None;
        for a in &actions {
            let t = transition(&state, a);
            let after = belief.applied(a, &t.effects);
            let mut score = after.satisfied_count(&rendered);
            if matches!(a, Action::Done) && score == rendered.len() {
                score += 1;
            }
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, a));
            }
        }
        let (_, a) = best.expect("ls and done are always legal");
        let t = transition(&state, a);
        if t.terminal {
            return super::task::evaluate(&state, &task.evaluator) == 1;
        }
        belief.apply(a, &t.effects).ok();
        belief.observe(&t.observation, &vocab);
        state = t.state;
    }
    false
}
