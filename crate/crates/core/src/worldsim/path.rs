use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute path in the simulated file system.
///
/// Always starts with `/`, never ends with one (except the root itself), and
/// has no empty, `.` or `..` components. Names containing a `.` are files by
/// convention; the generator never violates this, and shadow states rely on it
/// when the kind of a node cannot be observed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FsPath(String);

impl FsPath {
    pub fn root() -> Self {
        FsPath("/".to_string())
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "/" {
            return Ok(Self::root());
        }
        if !s.starts_with('/') || s.ends_with('/') {
            return Err(Error::InvalidPath(s.to_string()));
        }
        for comp in s[1..].split('/') {
            if comp.is_empty() || comp == "." || comp == ".." || comp.contains(char::is_whitespace) {
                return Err(Error::InvalidPath(s.to_string()));
            }
        }
        Ok(FsPath(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0 == "/"
    }

    pub fn parent(&self) -> Option<FsPath> {
        if self.is_root() {
            return None;
        }
        let idx = self.0.rfind('/').expect("absolute path");
        if idx == 0 {
            Some(Self::root())
        } else {
            Some(FsPath(self.0[..idx].to_string()))
        }
    }

    pub fn name(&self) -> &str {
        if self.is_root() {
            return "/";
        }
        let idx = self.0.rfind('/').expect("absolute path");
        &self.0[idx + 1..]
    }

    pub fn join(&self, name: &str) -> FsPath {
        if self.is_root() {
            FsPath(format!("/{name}"))
        } else {
            FsPath(format!("{}/{name}", self.0))
        }
    }

    /// Strict ancestry: a path is not its own ancestor.
    pub fn is_ancestor_of(&self, other: &FsPath) -> bool {
        if self == other {
            return false;
        }
        if self.is_root() {
            return true;
        }
        other.0.starts_with(&self.0) && other.0.as_bytes().get(self.0.len()) == Some(&b'/')
    }

    pub fn depth(&self) -> usize {
        if self.is_root() {
            0
        } else {
            self.0.matches('/').count()
        }
    }

    pub fn looks_like_file(&self) -> bool {
        self.name().contains('.')
    }

    /// Re-roots `self` from under `from` to under `to`. `self` must be `from`
    /// or a descendant of it.
    pub fn rebase(&self, from: &FsPath, to: &FsPath) -> FsPath {
        if self == from {
            return to.clone();
        }
        debug_assert!(from.is_ancestor_of(self));
        let rest = if from.is_root() { &self.0[1..] } else { &self.0[from.0.len() + 1..] };
        let mut out = to.clone();
        for comp in rest.split('/') {
            out = out.join(comp);
        }
        out
    }
}

impl fmt::Display for FsPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for FsPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl TryFrom<String> for FsPath {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        FsPath::parse(&s)
    }
}

impl From<FsPath> for String {
    fn from(p: FsPath) -> String {
        p.0
    }
}
