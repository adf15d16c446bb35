//! Action selection for the three thinking modes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::{AgentConfig, ThinkMode};
use crate::cogmodel::{policy_logits, predict_effects, CogParams, SeparateWm};
use crate::traces::{ActionRecord, Payload, Replay, StepContext, Tag, TraceSegment};
use crate::worldsim::planner::plan_step;
use crate::worldsim::{legal_actions, transition, Action, Belief, EffectSet, GoalAtom, TaskSpec, WorldState};

/// Where simulated effects come from.
#[derive(Clone, Copy, Debug)]
pub enum WmSource<'a> {
    /// The transition head of the acting model.
    Own,
    /// An independent world model.
    Separate(&'a SeparateWm),
    /// The true simulator.
    Oracle,
}

pub struct Agent<'a> {
    pub params: &'a CogParams,
    pub wm: WmSource<'a>,
    pub config: &'a AgentConfig,
}

/// Per-step inputs beyond the model itself.
pub struct StepInput<'a> {
    pub task: &'a TaskSpec,
    pub replay: &'a Replay,
    pub context: StepContext,
    /// The previous record and the effects observed after it.
    pub previous: Option<(&'a ActionRecord, EffectSet)>,
    /// Simulator state; required by the oracle world model and the expert.
    pub truth: Option<&'a WorldState>,
}

/// Goal overlap of a simulated belief, plus `done_credit` for a predicted
/// terminal success: `done` after a belief where every rendered atom holds.
pub fn goal_overlap(after: &Belief, action: &Action, rendered: &[GoalAtom], done_credit: f64) -> f64 {
    let n = after.satisfied_count(rendered);
    let finished = matches!(action, Action::Done) && n == rendered.len();
    n as f64 + if finished { done_credit } else { 0.0 }
}

/// Indices of the `k` best keys, ties to the lower index.
fn top_k(keys: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
    idx.truncate(k.min(keys.len()));
    idx
}

fn gumbel(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    -(-u.ln()).ln()
}

/// Greedy: best logits. Otherwise Gumbel-top-k, i.e. sampling without
/// replacement from the softmax policy.
fn candidates(logits: &[f64], k: usize, greedy: bool, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if greedy {
        top_k(logits, k)
    } else {
        let keys: Vec<f64> = logits.iter().map(|z| z + gumbel(rng)).collect();
        top_k(&keys, k)
    }
}

impl Agent<'_> {
    fn simulate(&self, ctx: &StepContext, action: &Action, truth: Option<&WorldState>) -> EffectSet {
        match self.wm {
            WmSource::Own => predict_effects(self.params, ctx, action),
            WmSource::Separate(wm) => predict_effects(wm, ctx, action),
            WmSource::Oracle => transition(truth.expect("oracle world model needs the simulator state"), action).effects,
        }
    }

    fn verification(&self, previous: &Option<(&ActionRecord, EffectSet)>) -> Option<TraceSegment> {
        let (rec, observed) = previous.as_ref()?;
        let tag = match rec.final_simulation().and_then(|s| s.payload.effects()) {
            Some(p) if p == observed => "consistent",
            Some(_) => "inconsistent",
            None => "unchecked",
        };
        Some(TraceSegment::new(Tag::Verification, None, Payload::tokens([tag]), &self.config.costs))
    }

    pub fn act(&self, input: &StepInput<'_>, rng: &mut ChaCha8Rng) -> ActionRecord {
        match self.config.think_mode {
            ThinkMode::NoThink => self.act_no_think(input, rng),
            ThinkMode::DynaThink => self.act_dyna(input, rng),
            ThinkMode::VerboseExpert => self.act_expert(input, rng),
        }
    }

    fn decision(&self, a: &Action) -> TraceSegment {
        TraceSegment::new(Tag::Decision, Some(a.clone()), Payload::tokens([a.to_string()]), &self.config.costs)
    }

    fn act_no_think(&self, input: &StepInput<'_>, rng: &mut ChaCha8Rng) -> ActionRecord {
        let actions = legal_actions(input.replay.vocab());
        let logits = policy_logits(self.params, &input.context, &actions);
        let a = actions[candidates(&logits, 1, self.config.greedy, rng)[0]].clone();
        ActionRecord::new(vec![self.decision(&a)], a)
    }

    fn act_dyna(&self, input: &StepInput<'_>, rng: &mut ChaCha8Rng) -> ActionRecord {
        let ctx = &input.context;
        let actions = legal_actions(input.replay.vocab());
        let logits = policy_logits(self.params, ctx, &actions);
        let rendered = ctx.rendered_atoms();
        let mut trace: Vec<TraceSegment> = self.verification(&input.previous).into_iter().collect();
        let mut best: Option<(f64, usize)> = None;
        for i in candidates(&logits, self.config.top_k, self.config.greedy, rng) {
            let a = &actions[i];
            let predicted = self.simulate(ctx, a, input.truth);
            let after = ctx.belief.applied(a, &predicted);
            let score = logits[i] + self.config.beta * goal_overlap(&after, a, &rendered, self.config.done_credit);
            if best.is_none_or(|(s, j)| score > s || (score == s && i < j)) {
                best = Some((score, i));
            }
            trace.push(TraceSegment::new(
                Tag::Simulation,
                Some(a.clone()),
                Payload::Effects { effects: predicted },
                &self.config.costs,
            ));
        }
        let chosen = actions[best.expect("at least one candidate").1].clone();
        trace.push(self.decision(&chosen));
        ActionRecord::new(trace, chosen)
    }

    fn act_expert(&self, input: &StepInput<'_>, rng: &mut ChaCha8Rng) -> ActionRecord {
        let truth = input.truth.expect("the expert plans on the simulator state");
        let task = input.task;
        let vocab = input.replay.vocab();
        let chosen = plan_step(truth, &task.evaluator, vocab).map_or(Action::Done, |p| p[0].clone());
        let actions = legal_actions(vocab);
        let others: Vec<&Action> = actions.iter().filter(|a| **a != chosen).collect();
        let alt = others[rng.gen_range(0..others.len())].clone();
        let probe = others[rng.gen_range(0..others.len())].to_string();
        let c = &self.config.costs;
        let goal = task.evaluator.get(rng.gen_range(0..task.evaluator.len().max(1))).map(|g| g.to_string());
        let mut trace: Vec<TraceSegment> = self.verification(&input.previous).into_iter().collect();
        trace.push(TraceSegment::new(
            Tag::Knowledge,
            None,
            Payload::tokens(["recall", goal.as_deref().unwrap_or("none")]),
            c,
        ));
        trace.push(TraceSegment::new(Tag::Exploration, None, Payload::tokens(["consider", &probe]), c));
        trace.push(TraceSegment::new(Tag::Knowledge, None, Payload::tokens(["cwd", truth.cwd.as_str()]), c));
        trace.push(TraceSegment::new(
            Tag::Simulation,
            Some(alt.clone()),
            Payload::Effects { effects: transition(truth, &alt).effects },
            c,
        ));
        trace.push(TraceSegment::new(
            Tag::Simulation,
            Some(chosen.clone()),
            Payload::Effects { effects: transition(truth, &chosen).effects },
            c,
        ));
        trace.push(self.decision(&chosen));
        ActionRecord::new(trace, chosen)
    }
}
