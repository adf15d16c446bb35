//! Exact critic and critique injection with a single-segment training mask.

use serde::{Deserialize, Serialize};

use super::segment::{ActionRecord, Correction, Payload, SegmentCosts, Tag, TraceSegment, Verdict};
use crate::error::{Error, Result};
use crate::worldsim::EffectSet;

/// The critic is exact, so confidence is always the maximum.
pub const RULE_CONFIDENCE: u8 = 5;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Critique {
    pub verdict: Verdict,
    pub correction: Correction,
    pub target_segment: u32,
    pub confidence: u8,
}

pub fn judge(predicted: &EffectSet, actual: &EffectSet) -> (Verdict, Correction) {
    let correction = Correction {
        missing: actual.difference(predicted).copied().collect(),
        spurious: predicted.difference(actual).copied().collect(),
    };
    let verdict = if correction.is_empty() { Verdict::Yes } else { Verdict::Wait };
    (verdict, correction)
}

/// Compares the simulation of the executed action with what happened.
pub fn rule_critic(record: &ActionRecord, actual: &EffectSet) -> Result<Critique> {
    let sim = record.final_simulation().ok_or(Error::NoSimulation)?;
    let predicted = sim.payload.effects().ok_or(Error::NoSimulation)?;
    let (verdict, correction) = judge(predicted, actual);
    Ok(Critique { verdict, correction, target_segment: sim.id, confidence: RULE_CONFIDENCE })
}

/// Inserts the critique right after its target and masks every other segment.
pub fn inject_critique(record: &ActionRecord, critique: &Critique, costs: &SegmentCosts) -> Result<ActionRecord> {
    let pos = record
        .trace
        .iter()
        .position(|s| s.id == critique.target_segment)
        .ok_or(Error::MissingSegment(critique.target_segment))?;
    let target = &record.trace[pos];
    if target.tag != Tag::Simulation {
        return Err(Error::InvalidTrace(format!("critique target {} is a {} segment", target.id, target.tag)));
    }
    let seg = TraceSegment::new(
        Tag::Critique,
        target.action_ref.clone(),
        Payload::Critique { verdict: critique.verdict, correction: critique.correction.clone() },
        costs,
    );
    let mut out = record.clone();
    out.trace.insert(pos + 1, seg);
    out.renumber();
    let mut mask = vec![false; out.trace.len()];
    mask[pos + 1] = true;
    out.mask = Some(mask);
    Ok(out)
}

/// Removes critique segments and the mask.
pub fn strip_critiques(record: &ActionRecord) -> ActionRecord {
    let mut out = record.clone();
    out.trace.retain(|s| s.tag != Tag::Critique);
    out.mask = None;
    out.renumber();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldsim::EffectAtom::*;
    use crate::worldsim::Slot;

    fn record(pred: EffectSet) -> ActionRecord {
        let a: crate::worldsim::Action = "mkdir /a".parse().unwrap();
        let c = SegmentCosts::default();
        ActionRecord::new(
            vec![
                TraceSegment::new(Tag::Verification, None, Payload::tokens(["consistent"]), &c),
                TraceSegment::new(Tag::Simulation, Some(a.clone()), Payload::Effects { effects: pred }, &c),
                TraceSegment::new(Tag::Decision, Some(a.clone()), Payload::tokens(["act"]), &c),
            ],
            a,
        )
    }

    #[test]
    fn critic_examples() {
        let ok: EffectSet = [Created(Slot::Arg1), OutputEmpty].into();
        let c = rule_critic(&record(ok.clone()), &ok).unwrap();
        assert_eq!((c.verdict, c.correction.is_empty(), c.target_segment), (Verdict::Yes, true, 2));

        let c = rule_critic(&record([Created(Slot::Arg1)].into()), &[OutputError, NoChange].into()).unwrap();
        assert_eq!(c.verdict, Verdict::Wait);
        assert_eq!(c.correction.missing, [OutputError, NoChange].into());
        assert_eq!(c.correction.spurious, [Created(Slot::Arg1)].into());

        let c = rule_critic(&record(EffectSet::new()), &EffectSet::new()).unwrap();
        assert_eq!(c.verdict, Verdict::Yes);
    }

    #[test]
    fn injection_places_and_masks() {
        let r = record([OutputEmpty].into());
        let c = rule_critic(&r, &[OutputEmpty].into()).unwrap();
        let inj = inject_critique(&r, &c, &SegmentCosts::default()).unwrap();
        assert_eq!(inj.trace.iter().map(|s| s.id).collect::<Vec<_>>(), [1, 2, 3, 4]);
        assert_eq!(inj.trace[2].tag, Tag::Critique);
        assert_eq!(inj.mask, Some(vec![false, false, true, false]));
        inj.validate().unwrap();
        assert_eq!(strip_critiques(&inj), r);
        let missing = Critique { target_segment: 9, ..c };
        assert!(matches!(inject_critique(&r, &missing, &SegmentCosts::default()), Err(Error::MissingSegment(9))));
    }
}
