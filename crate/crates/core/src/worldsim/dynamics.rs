//! The transition function of the file-system POMDP.
//!
//! | verb    | succeeds when                                            | effects                                  |
//! |---------|----------------------------------------------------------|------------------------------------------|
//! | `mkdir` | dir-style target absent, parent is a directory           | `Created(ARG1)`, `Output(empty)`         |
//! | `touch` | file-style target absent, parent is a directory          | `Created(ARG1)`, `Output(empty)`         |
//! | `rm`    | target is a file or an empty directory, not cwd          | `Removed(ARG1)`, `Output(empty)`         |
//! | `cp`    | source is a file, file-style destination absent with a   | `Created(ARG2)`, `Output(empty)`         |
//! |         | dir parent                                               |                                          |
//! | `mv`    | source exists and does not contain cwd or destination,   | `Removed(ARG1)`, `Created(ARG2)`,        |
//! |         | destination of the same style absent with a dir parent   | `Output(empty)`                          |
//! | `cd`    | target is a directory                                    | `CwdSet(ARG1)`, `Output(empty)`          |
//! | `ls`    | always                                                   | `Output(listing)`                        |
//! | `write` | target is a file                                         | `ContentSet(ARG1)`, `Output(empty)`      |
//! | `done`  | always (terminal)                                        | `NoChange`, `Output(empty)`              |
//!
//! A name containing '.' is file-style, any other name is dir-style; creating
//! a node whose kind disagrees with its name is an error.
//!
//! Any failed precondition leaves the tree untouched and yields
//! `{Output(error), NoChange}`.

use super::action::{Action, Verb};
use super::effects::{EffectAtom, EffectSet, Slot};
use super::path::FsPath;
use super::state::{LastOutput, Node, Observation, OutputClass, WorldState};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub state: WorldState,
    pub observation: Observation,
    pub effects: EffectSet,
    pub terminal: bool,
}

fn success_effects(verb: Verb) -> EffectSet {
    use EffectAtom::*;
    match verb {
        Verb::Mkdir | Verb::Touch => [Created(Slot::Arg1), OutputEmpty].into(),
        Verb::Rm => [Removed(Slot::Arg1), OutputEmpty].into(),
        Verb::Cp => [Created(Slot::Arg2), OutputEmpty].into(),
        Verb::Mv => [Removed(Slot::Arg1), Created(Slot::Arg2), OutputEmpty].into(),
        Verb::Cd => [CwdSet, OutputEmpty].into(),
        Verb::Ls => [OutputListing].into(),
        Verb::Write => [ContentSet, OutputEmpty].into(),
        Verb::Done => [NoChange, OutputEmpty].into(),
    }
}

pub fn error_effects() -> EffectSet {
    [EffectAtom::OutputError, EffectAtom::NoChange].into()
}

/// Effects the agent can read off the next observation: the output class
/// alone decides between the verb's success set and the error set.
pub fn infer_effects(action: &Action, next: &Observation) -> EffectSet {
    match next.last_output.class {
        OutputClass::Error => error_effects(),
        _ => success_effects(action.verb()),
    }
}

/// Deterministic successor. Pure: `state` is not modified.
pub fn transition(state: &WorldState, action: &Action) -> Transition {
    let mut next = state.clone();
    next.step += 1;
    let ok = apply(&mut next, action);
    let effects = if ok {
        next.last_output = match action {
            Action::Ls => LastOutput::listing(&next.listing()),
            _ => LastOutput::empty(),
        };
        success_effects(action.verb())
    } else {
        next.tree = state.tree.clone();
        next.cwd = state.cwd.clone();
        next.last_output = LastOutput::error(action.verb().as_str());
        error_effects()
    };
    let observation = next.observe();
    Transition {
        state: next,
        observation,
        effects,
        terminal: matches!(action, Action::Done),
    }
}

fn creatable(s: &WorldState, p: &FsPath) -> bool {
    !s.exists(p) && p.parent().is_some_and(|q| s.is_dir(&q))
}

fn apply(s: &mut WorldState, action: &Action) -> bool {
    match action {
        Action::Mkdir(p) => {
            if p.looks_like_file() || !creatable(s, p) {
                return false;
            }
            s.tree.insert(p.clone(), Node::Dir);
        }
        Action::Touch(p) => {
            if !p.looks_like_file() || !creatable(s, p) {
                return false;
            }
            s.tree.insert(p.clone(), Node::File { content: None });
        }
        Action::Rm(p) => {
            let removable = match s.node(p) {
                Some(Node::File { .. }) => true,
                Some(Node::Dir) => !p.is_root() && !s.has_children(p) && s.cwd != *p,
                None => false,
            };
            if !removable {
                return false;
            }
            s.tree.remove(p);
        }
        Action::Cp(src, dst) => {
            if !s.is_file(src) || !dst.looks_like_file() || !creatable(s, dst) {
                return false;
            }
            let node = s.tree[src];
            s.tree.insert(dst.clone(), node);
        }
        Action::Mv(src, dst) => {
            if !s.exists(src)
                || src.is_root()
                || src.is_ancestor_of(dst)
                || s.cwd == *src
                || src.is_ancestor_of(&s.cwd)
                || dst.looks_like_file() != s.is_file(src)
                || !creatable(s, dst)
            {
                return false;
            }
            for (q, node) in s.subtree(src) {
                s.tree.remove(&q);
                s.tree.insert(q.rebase(src, dst), node);
            }
        }
        Action::Cd(p) => {
            if !s.is_dir(p) {
                return false;
            }
            s.cwd = p.clone();
        }
        Action::Ls | Action::Done => {}
        Action::Write(p, tok) => {
            if !s.is_file(p) {
                return false;
            }
            s.tree.insert(p.clone(), Node::File { content: Some(*tok) });
        }
    }
    true
}
