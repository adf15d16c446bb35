//! Deterministic file-system POMDP: state, actions, dynamics, tasks, and the
//! synthetic task generator.

mod action;
mod dynamics;
mod effects;
mod generator;
mod path;
pub mod planner;
mod shadow;
mod state;
mod task;

pub use action::{Action, RawAction, Token, Verb, TOKEN_ALPHABET};
pub use dynamics::{error_effects, infer_effects, transition, Transition};
pub use effects::{format_set, is_consistent, EffectAtom, EffectSet, Slot, EFFECT_KINDS};
pub use generator::{generate_tasks, GeneratorConfig};
pub use path::FsPath;
pub use shadow::{Belief, Divergence, Known, Status};
pub use state::{LastOutput, ListingEntry, Node, NodeKind, Observation, OutputClass, WorldState};
pub use task::{
    evaluate, legal_actions, Domain, GoalAtom, InitEntry, InstrToken, Split, TaskSpec, Vocabulary,
    MAX_VOCAB_PATHS, STEP_BUDGET, TASK_SCHEMA_VERSION,
};
