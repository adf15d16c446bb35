use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::worldsim::{Action, EffectSet};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Verification,
    Exploration,
    Knowledge,
    Simulation,
    Critique,
    Decision,
}

impl Tag {
    pub const ALL: [Tag; 6] =
        [Tag::Verification, Tag::Exploration, Tag::Knowledge, Tag::Simulation, Tag::Critique, Tag::Decision];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Verification => "verification",
            Tag::Exploration => "exploration",
            Tag::Knowledge => "knowledge",
            Tag::Simulation => "simulation",
            Tag::Critique => "critique",
            Tag::Decision => "decision",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Token-count proxy per segment tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentCosts {
    pub verification: u32,
    pub exploration: u32,
    pub knowledge: u32,
    pub simulation: u32,
    pub critique: u32,
    pub decision: u32,
}

impl Default for SegmentCosts {
    fn default() -> Self {
        SegmentCosts { verification: 3, exploration: 5, knowledge: 4, simulation: 4, critique: 3, decision: 1 }
    }
}

impl SegmentCosts {
    pub fn of(&self, tag: Tag) -> u32 {
        match tag {
            Tag::Verification => self.verification,
            Tag::Exploration => self.exploration,
            Tag::Knowledge => self.knowledge,
            Tag::Simulation => self.simulation,
            Tag::Critique => self.critique,
            Tag::Decision => self.decision,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    Wait,
}

/// Symmetric difference between a predicted and an actual effect set.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Correction {
    /// Actual atoms the prediction left out.
    pub missing: EffectSet,
    /// Predicted atoms that did not happen.
    pub spurious: EffectSet,
}

impl Correction {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.spurious.is_empty()
    }

    pub fn len(&self) -> usize {
        self.missing.len() + self.spurious.len()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Payload {
    Tokens { tokens: Vec<String> },
    Effects { effects: EffectSet },
    Critique { verdict: Verdict, correction: Correction },
}

impl Payload {
    pub fn tokens<I: IntoIterator<Item = S>, S: Into<String>>(it: I) -> Self {
        Payload::Tokens { tokens: it.into_iter().map(Into::into).collect() }
    }

    pub fn effects(&self) -> Option<&EffectSet> {
        match self {
            Payload::Effects { effects } => Some(effects),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TraceSegment {
    pub id: u32,
    pub tag: Tag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_ref: Option<Action>,
    pub payload: Payload,
    pub cost: u32,
}

impl TraceSegment {
    pub fn new(tag: Tag, action_ref: Option<Action>, payload: Payload, costs: &SegmentCosts) -> Self {
        TraceSegment { id: 0, tag, action_ref, payload, cost: costs.of(tag) }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ActionRecord {
    pub trace: Vec<TraceSegment>,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<bool>>,
}

impl ActionRecord {
    /// Builds a record from segments in order, numbering ids from 1.
    pub fn new(trace: Vec<TraceSegment>, action: Action) -> Self {
        let mut r = ActionRecord { trace, action, mask: None };
        r.renumber();
        r
    }

    pub fn renumber(&mut self) {
        for (i, s) in self.trace.iter_mut().enumerate() {
            s.id = i as u32 + 1;
        }
    }

    pub fn cost(&self) -> u32 {
        self.trace.iter().map(|s| s.cost).sum()
    }

    pub fn segment(&self, id: u32) -> Option<&TraceSegment> {
        self.trace.iter().find(|s| s.id == id)
    }

    /// Last simulation segment whose action is the executed action.
    pub fn final_simulation(&self) -> Option<&TraceSegment> {
        self.trace
            .iter()
            .rev()
            .find(|s| s.tag == Tag::Simulation && s.action_ref.as_ref() == Some(&self.action))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTrace(m));
        for (i, s) in self.trace.iter().enumerate() {
            if s.id != i as u32 + 1 {
                return bad(format!("segment {} has id {}", i + 1, s.id));
            }
            if matches!(s.tag, Tag::Simulation | Tag::Decision) && s.action_ref.is_none() {
                return bad(format!("{} segment {} without action_ref", s.tag, s.id));
            }
            if s.tag == Tag::Critique && (i == 0 || self.trace[i - 1].tag != Tag::Simulation) {
                return bad(format!("critique {} does not follow a simulation", s.id));
            }
        }
        let decisions = self.trace.iter().filter(|s| s.tag == Tag::Decision).count();
        match self.trace.last() {
            Some(last) if decisions == 1 && last.tag == Tag::Decision => {
                if last.action_ref.as_ref() != Some(&self.action) {
                    return bad("decision does not name the executed action".into());
                }
            }
            _ => return bad(format!("{decisions} decision segments, or decision not last")),
        }
        if let Some(m) = &self.mask {
            if m.len() != self.trace.len() {
                return Err(Error::LengthMismatch(m.len(), self.trace.len()));
            }
        }
        Ok(())
    }
}
