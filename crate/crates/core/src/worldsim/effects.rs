//! Slot-relative effect atoms: the discrete codomain of the world model.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Slot {
    Arg1,
    Arg2,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum EffectAtom {
    Created(Slot),
    Removed(Slot),
    CwdSet,
    ContentSet,
    OutputListing,
    OutputError,
    OutputEmpty,
    NoChange,
}

/// Number of distinct effect kinds.
pub const EFFECT_KINDS: usize = 10;

impl EffectAtom {
    pub const ALL: [EffectAtom; EFFECT_KINDS] = [
        EffectAtom::Created(Slot::Arg1),
        EffectAtom::Created(Slot::Arg2),
        EffectAtom::Removed(Slot::Arg1),
        EffectAtom::Removed(Slot::Arg2),
        EffectAtom::CwdSet,
        EffectAtom::ContentSet,
        EffectAtom::OutputListing,
        EffectAtom::OutputError,
        EffectAtom::OutputEmpty,
        EffectAtom::NoChange,
    ];

    pub fn index(self) -> usize {
        match self {
            EffectAtom::Created(Slot::Arg1) => 0,
            EffectAtom::Created(Slot::Arg2) => 1,
            EffectAtom::Removed(Slot::Arg1) => 2,
            EffectAtom::Removed(Slot::Arg2) => 3,
            EffectAtom::CwdSet => 4,
            EffectAtom::ContentSet => 5,
            EffectAtom::OutputListing => 6,
            EffectAtom::OutputError => 7,
            EffectAtom::OutputEmpty => 8,
            EffectAtom::NoChange => 9,
        }
    }

    pub fn is_mutation(self) -> bool {
        matches!(
            self,
            EffectAtom::Created(_) | EffectAtom::Removed(_) | EffectAtom::CwdSet | EffectAtom::ContentSet
        )
    }

    pub fn is_output(self) -> bool {
        matches!(
            self,
            EffectAtom::OutputListing | EffectAtom::OutputError | EffectAtom::OutputEmpty
        )
    }
}

impl fmt::Display for EffectAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let slot = |s: &Slot| match s {
            Slot::Arg1 => "ARG1",
            Slot::Arg2 => "ARG2",
        };
        match self {
            EffectAtom::Created(s) => write!(f, "Created({})", slot(s)),
            EffectAtom::Removed(s) => write!(f, "Removed({})", slot(s)),
            EffectAtom::CwdSet => f.write_str("CwdSet(ARG1)"),
            EffectAtom::ContentSet => f.write_str("ContentSet(ARG1)"),
            EffectAtom::OutputListing => f.write_str("Output(listing)"),
            EffectAtom::OutputError => f.write_str("Output(error)"),
            EffectAtom::OutputEmpty => f.write_str("Output(empty)"),
            EffectAtom::NoChange => f.write_str("NoChange"),
        }
    }
}

impl fmt::Debug for EffectAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl TryFrom<String> for EffectAtom {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        EffectAtom::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown effect atom `{s}`")))
    }
}

impl From<EffectAtom> for String {
    fn from(a: EffectAtom) -> String {
        a.to_string()
    }
}

pub type EffectSet = BTreeSet<EffectAtom>;

/// `NoChange` never co-occurs with a mutation atom.
pub fn is_consistent(effects: &EffectSet) -> bool {
    !(effects.contains(&EffectAtom::NoChange) && effects.iter().any(|a| a.is_mutation()))
}

pub fn format_set(effects: &EffectSet) -> String {
    let parts: Vec<String> = effects.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_a_bijection() {
        let idx: BTreeSet<usize> = EffectAtom::ALL.iter().map(|a| a.index()).collect();
        assert_eq!(idx, (0..EFFECT_KINDS).collect());
        for a in EffectAtom::ALL {
            assert_eq!(EffectAtom::ALL[a.index()], a);
        }
    }

    #[test]
    fn string_form_round_trips() {
        for a in EffectAtom::ALL {
            assert_eq!(EffectAtom::try_from(a.to_string()).unwrap(), a);
        }
    }

    #[test]
    fn consistency_rule() {
        let bad: EffectSet = [EffectAtom::NoChange, EffectAtom::Created(Slot::Arg1)].into();
        let ok: EffectSet = [EffectAtom::NoChange, EffectAtom::OutputError].into();
        assert!(!is_consistent(&bad));
        assert!(is_consistent(&ok));
    }
}
