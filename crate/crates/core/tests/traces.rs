//! Trace algorithms over real rollout corpora, plus an exhaustive sweep of
//! the critic over small effect sets.

mod common;

use std::collections::BTreeSet;

use common::{expert_rollouts, small_tasks, WORKERS};
use dynathink::cogmodel::CogParams;
use dynathink::deliberation::{rollout_many, Agent, AgentConfig, WmSource};
use dynathink::dynatrain::TaskIndex;
use dynathink::traces::{
    inject_critique, reconstruct_dit, rule_critic, strip_critiques, wm_samples, ActionRecord, Payload, SegmentCosts,
    Tag, TraceSegment, Trajectory, Verdict, WmOptions, WmTarget, WmVariant,
};
use dynathink::worldsim::{Action, EffectAtom, EffectSet};

fn untrained_rollouts(seed: u64) -> (Vec<dynathink::worldsim::TaskSpec>, Vec<Trajectory>) {
    let tasks = small_tasks(3, seed);
    let p = CogParams::new(seed);
    let cfg = AgentConfig::default();
    let agent = Agent { params: &p, wm: WmSource::Own, config: &cfg };
    let trajs = rollout_many(&agent, &tasks, &[seed, seed + 1], WORKERS).into_iter().flatten().collect();
    (tasks, trajs)
}

fn is_subsequence(short: &[TraceSegment], long: &[TraceSegment]) -> bool {
    let mut it = long.iter();
    short.iter().all(|s| it.any(|l| l.tag == s.tag && l.action_ref == s.action_ref && l.payload == s.payload))
}

#[test]
fn reconstruction_is_idempotent_and_keeps_the_action() {
    let corpus = expert_rollouts(&small_tasks(4, 11), 11);
    let (mut before, mut after) = (0u64, 0u64);
    for t in &corpus {
        for r in &t.records {
            let d = reconstruct_dit(r);
            d.validate().unwrap();
            assert_eq!(d.action, r.action);
            assert_eq!(reconstruct_dit(&d), d);
            assert!(is_subsequence(&d.trace, &r.trace));
            let chosen = |x: &ActionRecord| {
                x.trace.iter().filter(|s| s.tag == Tag::Simulation && s.action_ref.as_ref() == Some(&x.action)).count()
            };
            assert_eq!(chosen(&d), chosen(r));
            assert_eq!(d.trace.iter().filter(|s| s.tag == Tag::Verification).count(), r.trace.iter().filter(|s| s.tag == Tag::Verification).count());
            assert!(d.trace.iter().all(|s| !matches!(s.tag, Tag::Exploration | Tag::Knowledge)));
            let dropped = r.trace.iter().any(|s| matches!(s.tag, Tag::Exploration | Tag::Knowledge));
            if dropped {
                assert!(d.cost() < r.cost());
            }
            before += r.cost() as u64;
            after += d.cost() as u64;
        }
    }
    assert!(after < before);
}

#[test]
fn injection_round_trips_and_masks_one_segment() {
    let (_, corpus) = untrained_rollouts(3);
    let costs = SegmentCosts::default();
    let mut checked = 0;
    for t in &corpus {
        for (i, r) in t.records.iter().enumerate() {
            let c = rule_critic(r, &t.effects(i)).unwrap();
            let x = inject_critique(r, &c, &costs).unwrap();
            x.validate().unwrap();
            let mask = x.mask.as_ref().unwrap();
            assert_eq!(mask.len(), x.trace.len());
            let on: Vec<_> = x.trace.iter().zip(mask).filter(|(_, m)| **m).map(|(s, _)| s).collect();
            assert_eq!(on.len(), 1);
            assert_eq!(on[0].tag, Tag::Critique);
            let pos = x.trace.iter().position(|s| s.tag == Tag::Critique).unwrap();
            assert_eq!(x.trace[pos - 1].id, c.target_segment);
            assert_eq!(x.trace[pos - 1].tag, Tag::Simulation);
            assert_eq!(x.trace.iter().map(|s| s.id).collect::<Vec<_>>(), (1..=x.trace.len() as u32).collect::<Vec<_>>());
            assert_eq!(serde_json::to_vec(&strip_critiques(&x)).unwrap(), serde_json::to_vec(r).unwrap());
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn reconstruction_keeps_a_critique_exactly_when_its_simulation_survives() {
    let corpus = expert_rollouts(&small_tasks(7, 5), 5);
    let costs = SegmentCosts::default();
    let mut n = 0;
    for t in corpus.iter().take(20) {
        for (i, r) in t.records.iter().enumerate() {
            // Critique every simulation, chosen or not.
            let sims: Vec<u32> = r.trace.iter().filter(|s| s.tag == Tag::Simulation).map(|s| s.id).collect();
            for target in sims {
                let seg = r.segment(target).unwrap();
                let mut c = rule_critic(r, &t.effects(i)).unwrap();
                c.target_segment = target;
                let x = inject_critique(r, &c, &costs).unwrap();
                let d = reconstruct_dit(&x);
                let kept = d.trace.iter().any(|s| s.tag == Tag::Critique);
                assert_eq!(kept, seg.action_ref.as_ref() == Some(&r.action), "{}", r.action);
                n += 1;
            }
        }
    }
    assert!(n >= 20);
}

#[test]
fn verification_tags_are_honest_and_simulation_precedes_decision() {
    let (_, corpus) = untrained_rollouts(8);
    for t in &corpus {
        for (i, r) in t.records.iter().enumerate() {
            let d = r.trace.iter().position(|s| s.tag == Tag::Decision).unwrap();
            assert_eq!(d, r.trace.len() - 1);
            assert!(r.trace[..d].iter().any(|s| s.tag == Tag::Simulation && s.action_ref.as_ref() == Some(&r.action)));
            if i == 0 {
                continue;
            }
            let prev = &t.records[i - 1];
            let predicted = prev.final_simulation().unwrap().payload.effects().unwrap();
            let honest = if *predicted == t.effects(i - 1) { "consistent" } else { "inconsistent" };
            let v = r.trace.iter().find(|s| s.tag == Tag::Verification).unwrap();
            assert_eq!(v.payload, Payload::tokens([honest]));
        }
    }
}

#[test]
fn state_delta_samples_carry_simulator_effects() {
    let (tasks, corpus) = untrained_rollouts(4);
    let index = TaskIndex::new(&tasks);
    for t in corpus.iter().filter(|t| t.terminated_within_budget) {
        let task = index.get(&t.task_id).unwrap();
        let s = wm_samples(task, t, WmVariant::StateDelta, &WmOptions::default());
        assert_eq!(s.samples.len(), t.records.len());
        let mut state = task.initial_state().unwrap();
        for (sample, rec) in s.samples.iter().zip(&t.records) {
            let x = dynathink::worldsim::transition(&state, &rec.action);
            assert_eq!(sample.target, WmTarget::StateDelta { effects: x.effects.clone() });
            assert_eq!((sample.task_id.as_str(), sample.seed), (t.task_id.as_str(), t.seed));
            state = x.state;
        }
        let c = wm_samples(task, t, WmVariant::Critique, &WmOptions { wait_only: true, ..Default::default() });
        for sample in &c.samples {
            let WmTarget::Critique { critique, record } = &sample.target else { panic!() };
            assert_eq!(critique.verdict, Verdict::Wait);
            assert_eq!(record.mask.as_ref().unwrap().iter().filter(|m| **m).count(), 1);
        }
    }
}

fn subsets_up_to(n: usize) -> Vec<EffectSet> {
    let mut out = Vec::new();
    for bits in 0u32..(1 << EffectAtom::ALL.len()) {
        if bits.count_ones() as usize <= n {
            out.push(EffectAtom::ALL.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, a)| *a).collect());
        }
    }
    out
}

#[test]
fn critic_verdict_is_set_equality_over_all_small_sets() {
    let sets = subsets_up_to(3);
    assert_eq!(sets.len(), 1 + 10 + 45 + 120);
    let a: Action = "mkdir /a".parse().unwrap();
    let costs = SegmentCosts::default();
    for predicted in &sets {
        let r = ActionRecord::new(
            vec![
                TraceSegment::new(Tag::Verification, None, Payload::tokens(["consistent"]), &costs),
                TraceSegment::new(Tag::Simulation, Some(a.clone()), Payload::Effects { effects: predicted.clone() }, &costs),
                TraceSegment::new(Tag::Decision, Some(a.clone()), Payload::tokens(["act"]), &costs),
            ],
            a.clone(),
        );
        for actual in &sets {
            let c = rule_critic(&r, actual).unwrap();
            assert_eq!(c.verdict == Verdict::Yes, predicted == actual);
            let missing: BTreeSet<_> = actual.iter().filter(|x| !predicted.contains(x)).copied().collect();
            let spurious: BTreeSet<_> = predicted.iter().filter(|x| !actual.contains(x)).copied().collect();
            assert_eq!(c.correction.missing, missing);
            assert_eq!(c.correction.spurious, spurious);
            assert_eq!((c.target_segment, c.confidence), (2, 5));
        }
    }
    let bare = ActionRecord::new(vec![TraceSegment::new(Tag::Decision, Some(a.clone()), Payload::tokens(["act"]), &costs)], a);
    assert_eq!(rule_critic(&bare, &EffectSet::new()).unwrap_err().kind(), "invalid_data");
}
