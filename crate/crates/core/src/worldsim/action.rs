use std::fmt;

use serde::{Deserialize, Serialize};

use super::path::FsPath;
use crate::error::{Error, Result};

/// Size of the content-token alphabet.
pub const TOKEN_ALPHABET: u8 = 16;

/// Opaque file content, one of `c0..c15`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(u8);

impl Token {
    pub fn new(v: u8) -> Result<Self> {
        if v < TOKEN_ALPHABET {
            Ok(Token(v))
        } else {
            Err(Error::MalformedAction(format!("content token {v} out of range")))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.strip_prefix('c')
            .and_then(|n| n.parse::<u8>().ok())
            .ok_or_else(|| Error::MalformedAction(format!("bad content token `{s}`")))
            .and_then(Token::new)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl TryFrom<String> for Token {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Token::parse(&s)
    }
}

impl From<Token> for String {
    fn from(t: Token) -> String {
        t.to_string()
    }
}

/// Verbs in their declared order; `legal_actions` enumerates in this order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Mkdir,
    Touch,
    Rm,
    Cp,
    Mv,
    Cd,
    Ls,
    Write,
    Done,
}

impl Verb {
    pub const ALL: [Verb; 9] = [
        Verb::Mkdir,
        Verb::Touch,
        Verb::Rm,
        Verb::Cp,
        Verb::Mv,
        Verb::Cd,
        Verb::Ls,
        Verb::Write,
        Verb::Done,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Verb::Mkdir => "mkdir",
            Verb::Touch => "touch",
            Verb::Rm => "rm",
            Verb::Cp => "cp",
            Verb::Mv => "mv",
            Verb::Cd => "cd",
            Verb::Ls => "ls",
            Verb::Write => "write",
            Verb::Done => "done",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Verb::Ls | Verb::Done => 0,
            Verb::Mkdir | Verb::Touch | Verb::Rm | Verb::Cd => 1,
            Verb::Cp | Verb::Mv | Verb::Write => 2,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Verb::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::MalformedAction(format!("unknown verb `{s}`")))
    }
}

/// Untyped wire form of an action. Conversion to [`Action`] is where arity and
/// path syntax are enforced.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RawAction {
    pub verb: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg2: Option<String>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAction", into = "RawAction")]
pub enum Action {
    Mkdir(FsPath),
    Touch(FsPath),
    Rm(FsPath),
    Cp(FsPath, FsPath),
    Mv(FsPath, FsPath),
    Cd(FsPath),
    Ls,
    Write(FsPath, Token),
    Done,
}

impl Action {
    pub fn verb(&self) -> Verb {
        match self {
            Action::Mkdir(_) => Verb::Mkdir,
            Action::Touch(_) => Verb::Touch,
            Action::Rm(_) => Verb::Rm,
            Action::Cp(..) => Verb::Cp,
            Action::Mv(..) => Verb::Mv,
            Action::Cd(_) => Verb::Cd,
            Action::Ls => Verb::Ls,
            Action::Write(..) => Verb::Write,
            Action::Done => Verb::Done,
        }
    }

    /// First path argument, if any.
    pub fn arg1(&self) -> Option<&FsPath> {
        match self {
            Action::Mkdir(p) | Action::Touch(p) | Action::Rm(p) | Action::Cd(p) => Some(p),
            Action::Cp(p, _) | Action::Mv(p, _) | Action::Write(p, _) => Some(p),
            Action::Ls | Action::Done => None,
        }
    }

    /// Second argument when it is a path (`cp`, `mv`).
    pub fn arg2(&self) -> Option<&FsPath> {
        match self {
            Action::Cp(_, q) | Action::Mv(_, q) => Some(q),
            _ => None,
        }
    }

    pub fn token(&self) -> Option<Token> {
        match self {
            Action::Write(_, t) => Some(*t),
            _ => None,
        }
    }

    pub fn paths(&self) -> impl Iterator<Item = &FsPath> {
        self.arg1().into_iter().chain(self.arg2())
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.verb().as_str())?;
        if let Some(p) = self.arg1() {
            write!(f, " {p}")?;
        }
        if let Some(q) = self.arg2() {
            write!(f, " {q}")?;
        }
        if let Some(t) = self.token() {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl TryFrom<RawAction> for Action {
    type Error = Error;

    fn try_from(raw: RawAction) -> Result<Self> {
        let verb = Verb::parse(&raw.verb)?;
        let given = raw.arg1.is_some() as usize + raw.arg2.is_some() as usize;
        if given != verb.arity() || (raw.arg1.is_none() && raw.arg2.is_some()) {
            return Err(Error::MalformedAction(format!(
                "`{}` takes {} argument(s), got {given}",
                verb.as_str(),
                verb.arity()
            )));
        }
        let path = |s: &Option<String>| FsPath::parse(s.as_deref().unwrap_or_default());
        let two_paths = || -> Result<(FsPath, FsPath)> {
            let (a, b) = (path(&raw.arg1)?, path(&raw.arg2)?);
            if a == b {
                return Err(Error::MalformedAction(format!(
                    "`{}` needs two distinct paths",
                    verb.as_str()
                )));
            }
            Ok((a, b))
        };
        Ok(match verb {
            Verb::Mkdir => Action::Mkdir(path(&raw.arg1)?),
            Verb::Touch => Action::Touch(path(&raw.arg1)?),
            Verb::Rm => Action::Rm(path(&raw.arg1)?),
            Verb::Cd => Action::Cd(path(&raw.arg1)?),
            Verb::Cp => {
                let (a, b) = two_paths()?;
                Action::Cp(a, b)
            }
            Verb::Mv => {
                let (a, b) = two_paths()?;
                Action::Mv(a, b)
            }
            Verb::Write => Action::Write(
                path(&raw.arg1)?,
                Token::parse(raw.arg2.as_deref().unwrap_or_default())?,
            ),
            Verb::Ls => Action::Ls,
            Verb::Done => Action::Done,
        })
    }
}

impl From<Action> for RawAction {
    fn from(a: Action) -> RawAction {
        RawAction {
            verb: a.verb().as_str().to_string(),
            arg1: a.arg1().map(|p| p.to_string()),
            arg2: a
                .arg2()
                .map(|p| p.to_string())
                .or_else(|| a.token().map(|t| t.to_string())),
        }
    }
}

impl std::str::FromStr for Action {
    type Err = Error;

    /// Parses the shell-like form produced by `Display`, e.g. `cp /a/x.txt /b`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let verb = parts
            .next()
            .ok_or_else(|| Error::MalformedAction("empty action".into()))?;
        let raw = RawAction {
            verb: verb.to_string(),
            arg1: parts.next().map(str::to_string),
            arg2: parts.next().map(str::to_string),
        };
        if parts.next().is_some() {
            return Err(Error::MalformedAction(format!("too many arguments in `{s}`")));
        }
        Action::try_from(raw)
    }
}
