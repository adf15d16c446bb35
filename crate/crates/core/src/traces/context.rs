//! What the agent knows at each step, rebuilt deterministically from the task
//! and the observations it has seen.

use serde::{Deserialize, Serialize};

use super::trajectory::Trajectory;
use crate::worldsim::{infer_effects, Action, Belief, GoalAtom, InstrToken, Observation, TaskSpec, Vocabulary};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StepContext {
    pub instruction: Vec<InstrToken>,
    pub vocab: Vocabulary,
    pub observation: Observation,
    pub belief: Belief,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prev_action: Option<Action>,
}

impl StepContext {
    pub fn rendered_atoms(&self) -> Vec<GoalAtom> {
        self.instruction
            .iter()
            .filter_map(|t| match t {
                InstrToken::Goal(g) | InstrToken::Hint(g) => Some(g.clone()),
                InstrToken::Word(_) => None,
            })
            .collect()
    }
}

/// Incremental context builder shared by live agents and offline replay.
#[derive(Clone, Debug)]
pub struct Replay {
    instruction: Vec<InstrToken>,
    vocab: Vocabulary,
    belief: Belief,
    prev_action: Option<Action>,
}

impl Replay {
    pub fn new(task: &TaskSpec, o0: &Observation) -> Self {
        let vocab = task.vocabulary();
        let belief = Belief::from_observation(o0, &vocab);
        Replay { instruction: task.instruction.clone(), vocab, belief, prev_action: None }
    }

    pub fn belief(&self) -> &Belief {
        &self.belief
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn context(&self, obs: &Observation) -> StepContext {
        StepContext {
            instruction: self.instruction.clone(),
            vocab: self.vocab.clone(),
            observation: obs.clone(),
            belief: self.belief.clone(),
            prev_action: self.prev_action.clone(),
        }
    }

    /// Folds in an executed action and the observation that followed it.
    pub fn advance(&mut self, action: &Action, next: &Observation) {
        let effects = infer_effects(action, next);
        self.belief = self.belief.applied(action, &effects);
        self.belief.observe(next, &self.vocab);
        self.prev_action = Some(action.clone());
    }
}

/// One context per action record, in order.
pub fn replay_contexts(task: &TaskSpec, traj: &Trajectory) -> Vec<StepContext> {
    let mut replay = Replay::new(task, &traj.observations[0]);
    let mut out = Vec::with_capacity(traj.records.len());
    for (i, r) in traj.records.iter().enumerate() {
        out.push(replay.context(&traj.observations[i]));
        replay.advance(&r.action, &traj.observations[i + 1]);
    }
    out
}
