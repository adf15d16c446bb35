//! Distillation-trace compression: keep what relates to the final action.

use super::segment::{ActionRecord, Tag};

/// Records cheaper than this are left untouched.
pub const DEFAULT_SKIP_BELOW: u32 = 12;

pub fn reconstruct_dit(record: &ActionRecord) -> ActionRecord {
    reconstruct_dit_with(record, DEFAULT_SKIP_BELOW)
}

/// Keeps verification segments, simulations of the executed action, critiques
/// that follow a kept simulation, and the decision. Order is preserved and ids
/// are renumbered; the action never changes.
pub fn reconstruct_dit_with(record: &ActionRecord, skip_below: u32) -> ActionRecord {
    if record.cost() < skip_below {
        return record.clone();
    }
    let mut keep = vec![false; record.trace.len()];
    for (i, s) in record.trace.iter().enumerate() {
        keep[i] = match s.tag {
            Tag::Verification | Tag::Decision => true,
            Tag::Simulation => s.action_ref.as_ref() == Some(&record.action),
            Tag::Critique => i > 0 && keep[i - 1] && record.trace[i - 1].tag == Tag::Simulation,
            Tag::Exploration | Tag::Knowledge => false,
        };
    }
    let trace = record.trace.iter().zip(&keep).filter(|(_, k)| **k).map(|(s, _)| s.clone()).collect();
    let mask = record
        .mask
        .as_ref()
        .map(|m| m.iter().zip(&keep).filter(|(_, k)| **k).map(|(b, _)| *b).collect());
    let mut out = ActionRecord { trace, action: record.action.clone(), mask };
    out.renumber();
    out
}
