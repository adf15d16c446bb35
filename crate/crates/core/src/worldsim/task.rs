use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::action::{Action, Token, Verb};
use super::path::FsPath;
use super::state::{Node, NodeKind, WorldState};
use crate::error::{Error, Result};

pub const TASK_SCHEMA_VERSION: u32 = 1;

/// Maximum number of distinct paths a task may mention.
pub const MAX_VOCAB_PATHS: usize = 8;

/// Per-episode step budget.
pub const STEP_BUDGET: u32 = 30;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "pred", rename_all = "snake_case")]
pub enum GoalAtom {
    Exists { path: FsPath },
    NotExists { path: FsPath },
    IsDir { path: FsPath },
    Content { path: FsPath, content: Token },
    CwdIs { path: FsPath },
}

impl GoalAtom {
    pub fn path(&self) -> &FsPath {
        match self {
            GoalAtom::Exists { path }
            | GoalAtom::NotExists { path }
            | GoalAtom::IsDir { path }
            | GoalAtom::Content { path, .. }
            | GoalAtom::CwdIs { path } => path,
        }
    }

    pub fn predicate(&self) -> &'static str {
        match self {
            GoalAtom::Exists { .. } => "exists",
            GoalAtom::NotExists { .. } => "not_exists",
            GoalAtom::IsDir { .. } => "is_dir",
            GoalAtom::Content { .. } => "content",
            GoalAtom::CwdIs { .. } => "cwd_is",
        }
    }

    pub fn content(&self) -> Option<Token> {
        match self {
            GoalAtom::Content { content, .. } => Some(*content),
            _ => None,
        }
    }

    pub fn holds(&self, state: &WorldState) -> bool {
        match self {
            GoalAtom::Exists { path } => state.exists(path),
            GoalAtom::NotExists { path } => !state.exists(path),
            GoalAtom::IsDir { path } => state.is_dir(path),
            GoalAtom::Content { path, content } => state.content(path) == Some(*content),
            GoalAtom::CwdIs { path } => state.cwd == *path,
        }
    }
}

impl fmt::Display for GoalAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.content() {
            Some(t) => write!(f, "{}({}, {t})", self.predicate(), self.path()),
            None => write!(f, "{}({})", self.predicate(), self.path()),
        }
    }
}

impl fmt::Debug for GoalAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// 1 iff every atom holds. The empty conjunction holds.
pub fn evaluate(state: &WorldState, evaluator: &[GoalAtom]) -> u8 {
    evaluator.iter().all(|g| g.holds(state)) as u8
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Files,
    Dirs,
    Nav,
    Archive,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Files => "files",
            Domain::Dirs => "dirs",
            Domain::Nav => "nav",
            Domain::Archive => "archive",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "files" => Ok(Domain::Files),
            "dirs" => Ok(Domain::Dirs),
            "nav" => Ok(Domain::Nav),
            "archive" => Ok(Domain::Archive),
            _ => Err(Error::Config(format!("unknown domain `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Split {
    #[serde(rename = "train")]
    Train,
    #[serde(rename = "test-id")]
    TestId,
    #[serde(rename = "test-ood")]
    TestOod,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::TestId => "test-id",
            Split::TestOod => "test-ood",
        }
    }
}

/// One instruction token. `Goal` tokens render an evaluator atom; `Hint`
/// tokens are appended only during rationalization and stripped before any
/// training data is built.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstrToken {
    Word(String),
    Goal(GoalAtom),
    Hint(GoalAtom),
}

impl InstrToken {
    pub fn render(&self) -> String {
        match self {
            InstrToken::Word(w) => w.clone(),
            InstrToken::Goal(g) => format!("[{g}]"),
            InstrToken::Hint(g) => format!("[hint {g}]"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct InitEntry {
    pub path: FsPath,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content: Option<Token>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TaskSpec {
    pub schema_version: u32,
    pub id: String,
    pub domain: Domain,
    pub split: Split,
    pub instruction: Vec<InstrToken>,
    pub init: Vec<InitEntry>,
    pub evaluator: Vec<GoalAtom>,
    pub opaque: bool,
}

/// Paths and content tokens an agent may name in actions.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Vocabulary {
    pub paths: Vec<FsPath>,
    pub tokens: Vec<Token>,
}

impl Vocabulary {
    pub fn contains_path(&self, p: &FsPath) -> bool {
        self.paths.binary_search(p).is_ok()
    }

    pub fn admits(&self, action: &Action) -> bool {
        action.paths().all(|p| self.contains_path(p))
            && action.token().is_none_or(|t| self.tokens.binary_search(&t).is_ok())
    }
}

impl TaskSpec {
    /// Goal atoms rendered in the instruction, hints included.
    pub fn rendered_atoms(&self) -> Vec<GoalAtom> {
        self.instruction
            .iter()
            .filter_map(|t| match t {
                InstrToken::Goal(g) | InstrToken::Hint(g) => Some(g.clone()),
                InstrToken::Word(_) => None,
            })
            .collect()
    }

    pub fn has_hints(&self) -> bool {
        self.instruction.iter().any(|t| matches!(t, InstrToken::Hint(_)))
    }

    /// Appends every evaluator atom not already rendered as a hint token.
    pub fn with_hints(&self) -> TaskSpec {
        let rendered: BTreeSet<GoalAtom> = self.rendered_atoms().into_iter().collect();
        let mut out = self.clone();
        out.instruction.extend(
            self.evaluator
                .iter()
                .filter(|g| !rendered.contains(g))
                .cloned()
                .map(InstrToken::Hint),
        );
        out
    }

    pub fn strip_hints(&self) -> TaskSpec {
        let mut out = self.clone();
        out.instruction.retain(|t| !matches!(t, InstrToken::Hint(_)));
        out
    }

    pub fn vocabulary(&self) -> Vocabulary {
        let mut paths = BTreeSet::new();
        let mut tokens = BTreeSet::new();
        let mut add_goal = |g: &GoalAtom, paths: &mut BTreeSet<FsPath>| {
            paths.insert(g.path().clone());
            if let Some(t) = g.content() {
                tokens.insert(t);
            }
        };
        for t in &self.instruction {
            if let InstrToken::Goal(g) | InstrToken::Hint(g) = t {
                add_goal(g, &mut paths);
            }
        }
        for g in &self.evaluator {
            add_goal(g, &mut paths);
        }
        for e in &self.init {
            paths.insert(e.path.clone());
            if let Some(t) = e.content {
                tokens.insert(t);
            }
        }
        paths.remove(&FsPath::root());
        Vocabulary { paths: paths.into_iter().collect(), tokens: tokens.into_iter().collect() }
    }

    pub fn initial_state(&self) -> Result<WorldState> {
        let mut s = WorldState::new();
        for e in &self.init {
            let node = match e.kind {
                NodeKind::Dir => Node::Dir,
                NodeKind::File => Node::File { content: e.content },
            };
            s.insert(e.path.clone(), node)?;
        }
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != TASK_SCHEMA_VERSION {
            return Err(Error::SchemaVersion { found: self.schema_version, expected: TASK_SCHEMA_VERSION });
        }
        self.initial_state()?;
        if self.domain == Domain::Archive && self.split != Split::TestOod {
            return Err(Error::HeldOutDomain(self.split.as_str().into()));
        }
        let rendered: BTreeSet<GoalAtom> = self.strip_hints().rendered_atoms().into_iter().collect();
        let hidden = self.evaluator.iter().any(|g| !rendered.contains(g));
        if hidden != self.opaque {
            return Err(Error::InvalidTask(format!(
                "{}: opaque flag {} disagrees with rendered atoms",
                self.id, self.opaque
            )));
        }
        if self.vocabulary().paths.len() > MAX_VOCAB_PATHS {
            return Err(Error::InvalidTask(format!("{}: more than {MAX_VOCAB_PATHS} paths", self.id)));
        }
        Ok(())
    }
}

/// Every well-formed action over the vocabulary, in verb order then
/// lexicographic argument order. `ls` and `done` are always present.
pub fn legal_actions(vocab: &Vocabulary) -> Vec<Action> {
    let mut out = Vec::new();
    for verb in Verb::ALL {
        match verb {
            Verb::Mkdir | Verb::Touch | Verb::Rm | Verb::Cd => {
                for p in &vocab.paths {
                    out.push(match verb {
                        Verb::Mkdir => Action::Mkdir(p.clone()),
                        Verb::Touch => Action::Touch(p.clone()),
                        Verb::Rm => Action::Rm(p.clone()),
                        _ => Action::Cd(p.clone()),
                    });
                }
            }
            Verb::Cp | Verb::Mv => {
                for p in &vocab.paths {
                    for q in vocab.paths.iter().filter(|q| *q != p) {
                        out.push(if verb == Verb::Cp {
                            Action::Cp(p.clone(), q.clone())
                        } else {
                            Action::Mv(p.clone(), q.clone())
                        });
                    }
                }
            }
            Verb::Write => {
                for p in &vocab.paths {
                    for t in &vocab.tokens {
                        out.push(Action::Write(p.clone(), *t));
                    }
                }
            }
            Verb::Ls => out.push(Action::Ls),
            Verb::Done => out.push(Action::Done),
        }
    }
    out
}
