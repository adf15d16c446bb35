//! Seeded hashed features.
//!
//! Every feature is a conjunction of small symbolic parts hashed with FNV-1a
//! into `[0, dim)`. World-model features describe what the agent believes
//! about the action's arguments; policy features relate the action to the
//! instruction's goal atoms.

use crate::traces::StepContext;
use crate::worldsim::{Action, Belief, EffectAtom, EffectSet, FsPath, GoalAtom, InstrToken, Status};

pub const DEFAULT_DIM: usize = 1 << 16;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureHasher {
    pub seed: u64,
    pub dim: usize,
}

/// FNV-1a state for one feature.
#[derive(Clone, Copy)]
pub struct Fnv(u64);

impl Fnv {
    fn byte(mut self, b: u8) -> Self {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(FNV_PRIME);
        self
    }

    pub fn str(mut self, s: &str) -> Self {
        for b in s.bytes() {
            self = self.byte(b);
        }
        self.byte(0xff)
    }

    pub fn num(mut self, v: u64) -> Self {
        for b in v.to_le_bytes() {
            self = self.byte(b);
        }
        self
    }

    pub fn flag(self, v: bool) -> Self {
        self.byte(v as u8)
    }
}

impl FeatureHasher {
    pub fn new(seed: u64, dim: usize) -> Self {
        FeatureHasher { seed, dim }
    }

    pub fn start(&self, template: &str) -> Fnv {
        Fnv(FNV_OFFSET).num(self.seed).str(template)
    }

    pub fn index(&self, h: Fnv) -> u32 {
        // Final avalanche so low bits depend on every input byte.
        let mut x = h.0;
        x ^= x >> 33;
        x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
        x ^= x >> 33;
        (x % self.dim as u64) as u32
    }
}

fn status_of(b: &Belief, p: Option<&FsPath>) -> Status {
    p.map_or(Status::Unknown, |p| b.status(p))
}

fn parent_status(b: &Belief, p: Option<&FsPath>) -> Status {
    match p.and_then(|p| p.parent()) {
        Some(q) => b.status(&q),
        None => Status::Unknown,
    }
}

fn style(p: Option<&FsPath>) -> u64 {
    match p {
        None => 0,
        Some(p) if p.looks_like_file() => 1,
        Some(_) => 2,
    }
}

fn emptiness(b: &Belief, p: Option<&FsPath>) -> u64 {
    match p.and_then(|p| b.known_empty(p)) {
        None => 0,
        Some(true) => 1,
        Some(false) => 2,
    }
}

/// Predicate of the first rendered goal naming `p`, if any.
fn goal_pred<'a>(atoms: &'a [GoalAtom], p: Option<&FsPath>) -> &'a str {
    p.and_then(|p| atoms.iter().find(|g| g.path() == p)).map_or("none", |g| g.predicate())
}

fn parent_is(p: Option<&FsPath>, q: &FsPath) -> bool {
    p.and_then(|p| p.parent()).as_ref() == Some(q)
}

/// Features for the transition, next-state, and critic heads.
pub fn wm_features(h: &FeatureHasher, ctx: &StepContext, action: &Action) -> Vec<u32> {
    let b = &ctx.belief;
    let v = action.verb().as_str();
    let (a1, a2) = (action.arg1(), action.arg2());
    let (s1, s2) = (status_of(b, a1), status_of(b, a2));
    let (p1, p2) = (parent_status(b, a1), parent_status(b, a2));
    let (st1, st2) = (style(a1), style(a2));
    let e1 = emptiness(b, a1);
    let cwd = &b.cwd;
    let a1_cwd = a1 == Some(cwd);
    let a1_above_cwd = a1.is_some_and(|p| p.is_ancestor_of(cwd));
    let a2_below_a1 = matches!((a1, a2), (Some(x), Some(y)) if x.is_ancestor_of(y));
    let a1_in_cwd = parent_is(a1, cwd);
    let a2_in_cwd = parent_is(a2, cwd);
    let atoms = ctx.rendered_atoms();
    let (g1, g2) = (goal_pred(&atoms, a1), goal_pred(&atoms, a2));
    let listed = ctx.observation.listing.len().min(2) as u64;
    let s = |x: Status| x.as_str();

    let feats = [
        h.start("wv").str(v),
        h.start("w1").str(v).str(s(s1)).str(s(p1)).num(st1),
        h.start("w2").str(v).str(s(s2)).str(s(p2)).num(st2),
        h.start("w12").str(v).str(s(s1)).str(s(s2)).str(s(p2)).num(st1).num(st2),
        h.start("wfull")
            .str(v)
            .str(s(s1))
            .str(s(p1))
            .num(st1)
            .str(s(s2))
            .str(s(p2))
            .num(st2)
            .num(e1)
            .flag(a1_cwd)
            .flag(a1_above_cwd)
            .flag(a2_below_a1),
        h.start("wgoal").str(v).str(s(s1)).str(g1).str(s(s2)).str(g2),
        h.start("wgoalp").str(v).str(s(s1)).str(s(p1)).str(g1).str(s(s2)).str(s(p2)).str(g2),
        h.start("wcwd").str(v).str(s(s1)).str(s(s2)).flag(a1_in_cwd).flag(a2_in_cwd).num(listed).flag(a1_cwd),
    ];
    let mut out: Vec<u32> = feats.into_iter().map(|f| h.index(f)).collect();
    // Shared by every verb that creates a node, so what one creating verb
    // teaches about missing parents carries over to the others.
    let created = match action {
        Action::Mkdir(p) | Action::Touch(p) | Action::Cp(_, p) | Action::Mv(_, p) => Some(p),
        _ => None,
    };
    if let Some(p) = created {
        let (sc, pc) = (status_of(b, Some(p)), parent_status(b, Some(p)));
        out.push(h.index(h.start("wmk").str(s(sc)).str(s(pc))));
    }
    out
}

/// World-model features plus the simulated atoms the critique is about.
pub fn critic_features(h: &FeatureHasher, ctx: &StepContext, action: &Action, predicted: &EffectSet) -> Vec<u32> {
    let mut out = wm_features(h, ctx, action);
    let v = action.verb().as_str();
    for atom in EffectAtom::ALL {
        let on = predicted.contains(&atom);
        out.push(h.index(h.start("cpred").str(v).num(atom.index() as u64).flag(on)));
    }
    out.push(h.index(h.start("cset").str(v).num(predicted.iter().fold(0, |m, a| m | 1 << a.index()))));
    out
}

/// Replicas of the memorization feature. Each replica gets its own weight,
/// so one update moves the memorized action's logit this many times as far
/// as a single shared feature would.
const MEMO_COPIES: u64 = 32;

/// Key identifying a task's instruction for memorization features. Hint
/// tokens are ignored so hinted and hint-free contexts share the key.
pub fn instruction_key(instr: &[InstrToken]) -> u64 {
    let mut h = Fnv(FNV_OFFSET);
    for t in instr {
        if !matches!(t, InstrToken::Hint(_)) {
            h = h.str(&t.render());
        }
    }
    h.0
}

/// Features for the policy head.
pub fn policy_features(h: &FeatureHasher, ctx: &StepContext, action: &Action) -> Vec<u32> {
    let b = &ctx.belief;
    let v = action.verb().as_str();
    let (a1, a2) = (action.arg1(), action.arg2());
    let (s1, s2) = (status_of(b, a1), status_of(b, a2));
    let st1 = style(a1);
    let atoms = ctx.rendered_atoms();
    let all_sat = atoms.iter().all(|g| b.holds(g));
    let repeat = ctx.prev_action.as_ref() == Some(action);
    let out_class = ctx.observation.last_output.class as u64;
    let mut out = vec![
        h.index(h.start("pv").str(v)),
        h.index(h.start("ps").str(v).str(s1.as_str()).str(s2.as_str()).num(st1)),
        h.index(h.start("pall").str(v).flag(all_sat)),
        h.index(h.start("prep").str(v).flag(repeat).num(out_class)),
    ];
    let key = instruction_key(&ctx.instruction);
    let a = action.to_string();
    for c in 0..MEMO_COPIES {
        out.push(h.index(h.start("pmem").num(key).num(ctx.observation.step as u64).str(&a).num(c)));
    }
    for g in &atoms {
        let gp = g.path();
        let slot = if a1 == Some(gp) {
            "a1"
        } else if a2 == Some(gp) {
            "a2"
        } else if a1.is_some_and(|p| p.is_ancestor_of(gp)) {
            "anc1"
        } else {
            continue;
        };
        let tok_match = match (action.token(), g.content()) {
            (Some(t), Some(c)) => 1 + (t == c) as u64,
            _ => 0,
        };
        let sat = b.holds(g);
        out.push(h.index(h.start("pg").str(g.predicate()).str(slot).str(v).flag(sat).num(tok_match).str(s1.as_str())));
        out.push(h.index(h.start("pgs").str(g.predicate()).str(slot).str(v).flag(sat).num(tok_match)));
    }
    out
}
