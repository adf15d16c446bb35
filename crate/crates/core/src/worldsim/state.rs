use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::action::Token;
use super::path::FsPath;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Dir,
    File,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Dir,
    File {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        content: Option<Token>,
    },
}

impl Node {
    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Dir => NodeKind::Dir,
            Node::File { .. } => NodeKind::File,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputClass {
    Listing,
    Error,
    Empty,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LastOutput {
    pub class: OutputClass,
    #[serde(default)]
    pub payload: Vec<String>,
}

impl LastOutput {
    pub fn empty() -> Self {
        LastOutput { class: OutputClass::Empty, payload: Vec::new() }
    }

    pub fn error(verb: &str) -> Self {
        LastOutput { class: OutputClass::Error, payload: vec![verb.to_string()] }
    }

    pub fn listing(entries: &BTreeSet<ListingEntry>) -> Self {
        LastOutput {
            class: OutputClass::Listing,
            payload: entries.iter().map(ListingEntry::render).collect(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct ListingEntry {
    pub name: String,
    pub kind: NodeKind,
}

impl ListingEntry {
    pub fn render(&self) -> String {
        match self.kind {
            NodeKind::Dir => format!("{}/", self.name),
            NodeKind::File => self.name.clone(),
        }
    }
}

/// What the agent sees: the current directory only.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Observation {
    pub cwd: FsPath,
    pub listing: BTreeSet<ListingEntry>,
    pub last_output: LastOutput,
    pub step: u32,
}

/// Full simulator state.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WorldState {
    pub tree: BTreeMap<FsPath, Node>,
    pub cwd: FsPath,
    pub last_output: LastOutput,
    pub step: u32,
}

impl Default for WorldState {
    fn default() -> Self {
        Self::new()
    }
}

impl WorldState {
    /// A tree holding only the root directory.
    pub fn new() -> Self {
        let mut tree = BTreeMap::new();
        tree.insert(FsPath::root(), Node::Dir);
        WorldState { tree, cwd: FsPath::root(), last_output: LastOutput::empty(), step: 0 }
    }

    pub fn node(&self, p: &FsPath) -> Option<&Node> {
        self.tree.get(p)
    }

    pub fn exists(&self, p: &FsPath) -> bool {
        self.tree.contains_key(p)
    }

    pub fn is_dir(&self, p: &FsPath) -> bool {
        matches!(self.tree.get(p), Some(Node::Dir))
    }

    pub fn is_file(&self, p: &FsPath) -> bool {
        matches!(self.tree.get(p), Some(Node::File { .. }))
    }

    pub fn content(&self, p: &FsPath) -> Option<Token> {
        match self.tree.get(p) {
            Some(Node::File { content }) => *content,
            _ => None,
        }
    }

    /// Inserts a node whose parent must already be a directory.
    pub fn insert(&mut self, p: FsPath, node: Node) -> Result<()> {
        let parent = p.parent().ok_or_else(|| Error::InvalidPath(p.to_string()))?;
        if !self.is_dir(&parent) {
            return Err(Error::InvalidTask(format!("parent of {p} is not a directory")));
        }
        if self.exists(&p) {
            return Err(Error::InvalidTask(format!("{p} already exists")));
        }
        self.tree.insert(p, node);
        Ok(())
    }

    pub fn children(&self, p: &FsPath) -> impl Iterator<Item = (&FsPath, &Node)> {
        let p = p.clone();
        self.tree
            .iter()
            .filter(move |(q, _)| q.parent().as_ref() == Some(&p))
    }

    pub fn has_children(&self, p: &FsPath) -> bool {
        self.children(p).next().is_some()
    }

    /// `p` and everything beneath it.
    pub fn subtree(&self, p: &FsPath) -> Vec<(FsPath, Node)> {
        self.tree
            .iter()
            .filter(|(q, _)| *q == p || p.is_ancestor_of(q))
            .map(|(q, n)| (q.clone(), *n))
            .collect()
    }

    pub fn listing(&self) -> BTreeSet<ListingEntry> {
        self.children(&self.cwd)
            .map(|(q, n)| ListingEntry { name: q.name().to_string(), kind: n.kind() })
            .collect()
    }

    pub fn observe(&self) -> Observation {
        Observation {
            cwd: self.cwd.clone(),
            listing: self.listing(),
            last_output: self.last_output.clone(),
            step: self.step,
        }
    }

    pub fn check_invariants(&self) -> Result<()> {
        if !self.is_dir(&FsPath::root()) {
            return Err(Error::InvalidTask("root missing".into()));
        }
        if !self.is_dir(&self.cwd) {
            return Err(Error::InvalidTask(format!("cwd {} is not a directory", self.cwd)));
        }
        for p in self.tree.keys() {
            if let Some(parent) = p.parent() {
                if !self.is_dir(&parent) {
                    return Err(Error::InvalidTask(format!("orphan {p}")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observation_hides_other_subtrees() {
        let mut a = WorldState::new();
        a.insert(FsPath::parse("/x").unwrap(), Node::Dir).unwrap();
        let mut b = a.clone();
        b.insert(FsPath::parse("/x/deep.txt").unwrap(), Node::File { content: None }).unwrap();
        assert_eq!(a.observe(), b.observe());
    }

    #[test]
    fn insert_requires_parent_dir() {
        let mut s = WorldState::new();
        assert!(s.insert(FsPath::parse("/a/b").unwrap(), Node::Dir).is_err());
        s.insert(FsPath::parse("/a.txt").unwrap(), Node::File { content: None }).unwrap();
        assert!(s.insert(FsPath::parse("/a.txt/b").unwrap(), Node::Dir).is_err());
    }
}
