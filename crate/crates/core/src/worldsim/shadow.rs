//! Agent-side knowledge of the tree ("shadow state").
//!
//! Built only from observations and the agent's own actions, never from the
//! simulator's hidden state. Predicted effect sets are applied to it to obtain
//! simulated next states; the vanilla-Dyna baseline uses it as the
//! environment when rolling out against a learned world model.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::action::{Action, Token};
use super::effects::{EffectAtom, EffectSet, Slot};
use super::path::FsPath;
use super::state::{ListingEntry, NodeKind, Observation};
use super::task::{GoalAtom, Vocabulary};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "is", rename_all = "lowercase")]
pub enum Known {
    Dir,
    File {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        content: Option<Token>,
    },
    Absent,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Status {
    Dir,
    File,
    Absent,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Dir => "dir",
            Status::File => "file",
            Status::Absent => "absent",
            Status::Unknown => "unknown",
        }
    }

    pub fn is_present(self) -> bool {
        matches!(self, Status::Dir | Status::File)
    }
}

/// Why a predicted effect set could not be applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence(pub String);

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Belief {
    pub known: BTreeMap<FsPath, Known>,
    pub cwd: FsPath,
    /// Directories whose full child list is known (listed while cwd, or
    /// created empty by the agent).
    #[serde(default)]
    pub explored: BTreeSet<FsPath>,
}

impl Belief {
    pub fn from_observation(obs: &Observation, vocab: &Vocabulary) -> Self {
        let mut b = Belief { known: BTreeMap::new(), cwd: obs.cwd.clone(), explored: BTreeSet::new() };
        b.observe(obs, vocab);
        b
    }

    pub fn status(&self, p: &FsPath) -> Status {
        if p.is_root() {
            return Status::Dir;
        }
        let mut cur = p.parent();
        while let Some(a) = cur {
            if matches!(self.known.get(&a), Some(Known::Absent) | Some(Known::File { .. })) {
                return Status::Absent;
            }
            cur = a.parent();
        }
        match self.known.get(p) {
            Some(Known::Dir) => Status::Dir,
            Some(Known::File { .. }) => Status::File,
            Some(Known::Absent) => Status::Absent,
            None => Status::Unknown,
        }
    }

    pub fn content(&self, p: &FsPath) -> Option<Token> {
        match self.known.get(p) {
            Some(Known::File { content }) if self.status(p) == Status::File => *content,
            _ => None,
        }
    }

    /// Whether `p` is known to have at least one present child.
    pub fn has_known_children(&self, p: &FsPath) -> bool {
        self.known
            .iter()
            .any(|(q, k)| q.parent().as_ref() == Some(p) && !matches!(k, Known::Absent))
            && self.status(p) == Status::Dir
    }

    /// `Some(true)` when `p` is an explored directory with no children,
    /// `Some(false)` when it has a known child, `None` otherwise.
    pub fn known_empty(&self, p: &FsPath) -> Option<bool> {
        if self.has_known_children(p) {
            Some(false)
        } else if self.explored.contains(p) && self.status(p) == Status::Dir {
            Some(true)
        } else {
            None
        }
    }

    fn mark_present(&mut self, p: &FsPath, k: Known) {
        let mut cur = p.parent();
        while let Some(a) = cur {
            if !a.is_root() {
                self.known.insert(a.clone(), Known::Dir);
            }
            cur = a.parent();
        }
        if !p.is_root() {
            self.known.insert(p.clone(), k);
        }
    }

    fn mark_absent(&mut self, p: &FsPath) {
        self.known.retain(|q, _| !p.is_ancestor_of(q));
        self.explored.retain(|q| q != p && !p.is_ancestor_of(q));
        self.known.insert(p.clone(), Known::Absent);
    }

    /// Folds in what an observation reveals: cwd and its ancestors are
    /// directories, listed children are present, vocabulary paths directly
    /// under cwd that are not listed are absent.
    pub fn observe(&mut self, obs: &Observation, vocab: &Vocabulary) {
        self.cwd = obs.cwd.clone();
        self.mark_present(&obs.cwd, Known::Dir);
        self.explored.insert(obs.cwd.clone());
        let listed: BTreeSet<&str> = obs.listing.iter().map(|e| e.name.as_str()).collect();
        for e in &obs.listing {
            let p = obs.cwd.join(&e.name);
            let k = match (e.kind, self.known.get(&p)) {
                (NodeKind::Dir, _) => Known::Dir,
                (NodeKind::File, Some(Known::File { content })) => Known::File { content: *content },
                (NodeKind::File, _) => Known::File { content: None },
            };
            self.known.insert(p, k);
        }
        for p in &vocab.paths {
            if p.parent().as_ref() == Some(&obs.cwd) && !listed.contains(p.name()) {
                self.mark_absent(p);
            }
        }
    }

    fn slot_path<'a>(action: &'a Action, slot: Slot) -> Option<&'a FsPath> {
        match slot {
            Slot::Arg1 => action.arg1(),
            Slot::Arg2 => action.arg2(),
        }
    }

    /// Applies an effect set for `action`. Fails without modifying `self` when
    /// the effects are inapplicable (creating a known-present path, removing a
    /// known-absent one, mixing outputs, ...).
    pub fn apply(&mut self, action: &Action, effects: &EffectSet) -> Result<(), Divergence> {
        let outputs = effects.iter().filter(|a| a.is_output()).count();
        if outputs != 1 {
            return Err(Divergence(format!("{outputs} output atoms")));
        }
        if effects.contains(&EffectAtom::OutputError) || effects.contains(&EffectAtom::NoChange) {
            if effects.iter().any(|a| a.is_mutation()) {
                return Err(Divergence("NoChange with mutation".into()));
            }
            return Ok(());
        }
        let mut next = self.clone();
        // Capture sources before anything is removed.
        let moved_explored: Vec<FsPath> = match action {
            Action::Mv(src, _) => {
                self.explored.iter().filter(|q| *q == src || src.is_ancestor_of(q)).cloned().collect()
            }
            _ => Vec::new(),
        };
        let moved: Vec<(FsPath, Known)> = match (action, effects.contains(&EffectAtom::Created(Slot::Arg2))) {
            (Action::Mv(src, _), true) => next
                .known
                .iter()
                .filter(|(q, _)| *q == src || src.is_ancestor_of(q))
                .map(|(q, k)| (q.clone(), *k))
                .collect(),
            _ => Vec::new(),
        };
        for atom in effects {
            match *atom {
                EffectAtom::Created(slot) => {
                    let p = Self::slot_path(action, slot)
                        .ok_or_else(|| Divergence(format!("{atom} without argument")))?;
                    if self.status(p).is_present() {
                        return Err(Divergence(format!("{p} already present")));
                    }
                    let k = match action {
                        Action::Mkdir(_) => Known::Dir,
                        Action::Touch(_) => Known::File { content: None },
                        Action::Cp(src, _) => Known::File { content: self.content(src) },
                        Action::Mv(src, _) => match self.status(src) {
                            Status::Dir => Known::Dir,
                            Status::File => Known::File { content: self.content(src) },
                            _ if p.looks_like_file() => Known::File { content: None },
                            _ => Known::Dir,
                        },
                        _ if p.looks_like_file() => Known::File { content: None },
                        _ => Known::Dir,
                    };
                    next.mark_present(p, k);
                    if matches!(action, Action::Mkdir(_)) {
                        next.explored.insert(p.clone());
                    }
                }
                EffectAtom::Removed(slot) => {
                    let p = Self::slot_path(action, slot)
                        .ok_or_else(|| Divergence(format!("{atom} without argument")))?;
                    if self.status(p) == Status::Absent || p.is_root() {
                        return Err(Divergence(format!("{p} already absent")));
                    }
                    next.mark_absent(p);
                }
                EffectAtom::CwdSet => {
                    let p = action.arg1().ok_or_else(|| Divergence("CwdSet without argument".into()))?;
                    if matches!(self.status(p), Status::Absent | Status::File) {
                        return Err(Divergence(format!("cd into non-directory {p}")));
                    }
                    next.mark_present(p, Known::Dir);
                    next.cwd = p.clone();
                }
                EffectAtom::ContentSet => {
                    let (p, tok) = match action {
                        Action::Write(p, t) => (p, *t),
                        _ => return Err(Divergence("ContentSet without write".into())),
                    };
                    if matches!(self.status(p), Status::Absent | Status::Dir) {
                        return Err(Divergence(format!("write to non-file {p}")));
                    }
                    next.mark_present(p, Known::File { content: Some(tok) });
                }
                EffectAtom::OutputListing | EffectAtom::OutputEmpty => {}
                EffectAtom::OutputError | EffectAtom::NoChange => unreachable!(),
            }
        }
        if let Action::Mv(src, dst) = action {
            if effects.contains(&EffectAtom::Created(Slot::Arg2)) {
                for (q, k) in moved {
                    if q != *src {
                        next.known.insert(q.rebase(src, dst), k);
                    }
                }
                for q in moved_explored {
                    next.explored.insert(q.rebase(src, dst));
                }
            }
        }
        *self = next;
        Ok(())
    }

    /// Like [`Belief::apply`] but leaves `self` unchanged on divergence.
    pub fn applied(&self, action: &Action, effects: &EffectSet) -> Belief {
        let mut b = self.clone();
        if b.apply(action, effects).is_err() {
            return self.clone();
        }
        b
    }

    /// Unknown facts never satisfy an atom.
    pub fn holds(&self, g: &GoalAtom) -> bool {
        match g {
            GoalAtom::Exists { path } => self.status(path).is_present(),
            GoalAtom::NotExists { path } => self.status(path) == Status::Absent,
            GoalAtom::IsDir { path } => self.status(path) == Status::Dir,
            GoalAtom::Content { path, content } => self.content(path) == Some(*content),
            GoalAtom::CwdIs { path } => self.cwd == *path,
        }
    }

    pub fn satisfied_count(&self, atoms: &[GoalAtom]) -> usize {
        atoms.iter().filter(|g| self.holds(g)).count()
    }

    /// Known present children of cwd.
    pub fn listing(&self) -> BTreeSet<ListingEntry> {
        self.known
            .iter()
            .filter(|(q, _)| q.parent().as_ref() == Some(&self.cwd))
            .filter_map(|(q, k)| {
                let kind = match k {
                    Known::Dir => NodeKind::Dir,
                    Known::File { .. } => NodeKind::File,
                    Known::Absent => return None,
                };
                Some(ListingEntry { name: q.name().to_string(), kind })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldsim::{transition, WorldState};

    fn p(s: &str) -> FsPath {
        FsPath::parse(s).unwrap()
    }

    fn vocab(paths: &[&str]) -> Vocabulary {
        let mut paths: Vec<FsPath> = paths.iter().map(|s| p(s)).collect();
        paths.sort();
        Vocabulary { paths, tokens: vec![] }
    }

    #[test]
    fn observation_marks_unlisted_vocab_absent() {
        let s = transition(&WorldState::new(), &"mkdir /a".parse().unwrap()).state;
        let b = Belief::from_observation(&s.observe(), &vocab(&["/a", "/b", "/a/x.txt"]));
        assert_eq!(b.status(&p("/a")), Status::Dir);
        assert_eq!(b.status(&p("/b")), Status::Absent);
        assert_eq!(b.status(&p("/a/x.txt")), Status::Unknown);
        assert_eq!(b.status(&p("/b/y.txt")), Status::Absent);
    }

    #[test]
    fn apply_rejects_impossible_effects() {
        let s = transition(&WorldState::new(), &"mkdir /a".parse().unwrap()).state;
        let mut b = Belief::from_observation(&s.observe(), &vocab(&["/a"]));
        let created: EffectSet = [EffectAtom::Created(Slot::Arg1), EffectAtom::OutputEmpty].into();
        assert!(b.apply(&"mkdir /a".parse().unwrap(), &created).is_err());
        let no_output: EffectSet = [EffectAtom::Created(Slot::Arg1)].into();
        assert!(b.apply(&"mkdir /a/b".parse().unwrap(), &no_output).is_err());
        b.apply(&"mkdir /a/b".parse().unwrap(), &created).unwrap();
        assert_eq!(b.status(&p("/a/b")), Status::Dir);
    }

    #[test]
    fn mv_carries_known_subtree() {
        let mut b = Belief { known: BTreeMap::new(), cwd: FsPath::root(), explored: BTreeSet::new() };
        b.mark_present(&p("/a/x.txt"), Known::File { content: Some(Token::new(2).unwrap()) });
        let eff: EffectSet = [
            EffectAtom::Removed(Slot::Arg1),
            EffectAtom::Created(Slot::Arg2),
            EffectAtom::OutputEmpty,
        ]
        .into();
        b.apply(&"mv /a /b".parse().unwrap(), &eff).unwrap();
        assert_eq!(b.status(&p("/a/x.txt")), Status::Absent);
        assert_eq!(b.content(&p("/b/x.txt")), Some(Token::new(2).unwrap()));
    }
}
