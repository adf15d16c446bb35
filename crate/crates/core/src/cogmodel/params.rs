//! Parameter stores and the scoring functions of each head.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::features::{critic_features, policy_features, wm_features, FeatureHasher, DEFAULT_DIM};
use crate::traces::{ObsField, StepContext, Verdict, OBS_FIELDS};
use crate::worldsim::{Action, EffectAtom, EffectSet, EFFECT_KINDS};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Head {
    Policy,
    Trans,
    State,
    Critic,
}

impl Head {
    pub const ALL: [Head; 4] = [Head::Policy, Head::Trans, Head::State, Head::Critic];

    /// Outputs per feature.
    pub fn width(self) -> usize {
        match self {
            Head::Policy => 1,
            Head::Trans => EFFECT_KINDS,
            Head::State => OBS_FIELDS,
            Head::Critic => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Head::Policy => "policy",
            Head::Trans => "trans",
            Head::State => "state",
            Head::Critic => "critic",
        }
    }
}

/// Read/write access to whichever heads a store carries.
pub trait WeightStore {
    fn hasher(&self) -> FeatureHasher;
    fn head(&self, head: Head) -> Option<&[f64]>;
    fn head_mut(&mut self, head: Head) -> Option<&mut [f64]>;
    fn version(&self) -> u64;
    fn bump_version(&mut self);
}

/// The shared model: policy and world-model heads over one feature space.
#[derive(Clone, PartialEq, Debug)]
pub struct CogParams {
    pub hash_seed: u64,
    pub dim: usize,
    pub policy_w: Vec<f64>,
    pub trans_w: Vec<f64>,
    pub state_w: Vec<f64>,
    pub critic_w: Vec<f64>,
    pub version: u64,
}

impl CogParams {
    pub fn zeros(hash_seed: u64, dim: usize) -> Self {
        CogParams {
            hash_seed,
            dim,
            policy_w: vec![0.0; dim * Head::Policy.width()],
            trans_w: vec![0.0; dim * Head::Trans.width()],
            state_w: vec![0.0; dim * Head::State.width()],
            critic_w: vec![0.0; dim * Head::Critic.width()],
            version: 0,
        }
    }

    pub fn new(hash_seed: u64) -> Self {
        Self::zeros(hash_seed, DEFAULT_DIM)
    }
}

impl WeightStore for CogParams {
    fn hasher(&self) -> FeatureHasher {
        FeatureHasher::new(self.hash_seed, self.dim)
    }

    fn head(&self, head: Head) -> Option<&[f64]> {
        Some(match head {
            Head::Policy => &self.policy_w,
            Head::Trans => &self.trans_w,
            Head::State => &self.state_w,
            Head::Critic => &self.critic_w,
        })
    }

    fn head_mut(&mut self, head: Head) -> Option<&mut [f64]> {
        Some(match head {
            Head::Policy => &mut self.policy_w,
            Head::Trans => &mut self.trans_w,
            Head::State => &mut self.state_w,
            Head::Critic => &mut self.critic_w,
        })
    }

    fn version(&self) -> u64 {
        self.version
    }

    fn bump_version(&mut self) {
        self.version += 1;
    }
}

/// Stand-alone world model with only a transition head.
#[derive(Clone, PartialEq, Debug)]
pub struct SeparateWm {
    pub hash_seed: u64,
    pub dim: usize,
    pub trans_w: Vec<f64>,
    pub version: u64,
}

impl SeparateWm {
    pub fn zeros(hash_seed: u64, dim: usize) -> Self {
        SeparateWm { hash_seed, dim, trans_w: vec![0.0; dim * Head::Trans.width()], version: 0 }
    }
}

impl WeightStore for SeparateWm {
    fn hasher(&self) -> FeatureHasher {
        FeatureHasher::new(self.hash_seed, self.dim)
    }

    fn head(&self, head: Head) -> Option<&[f64]> {
        (head == Head::Trans).then_some(self.trans_w.as_slice())
    }

    fn head_mut(&mut self, head: Head) -> Option<&mut [f64]> {
        (head == Head::Trans).then_some(self.trans_w.as_mut_slice())
    }

    fn version(&self) -> u64 {
        self.version
    }

    fn bump_version(&mut self) {
        self.version += 1;
    }
}

/// Sparse gradient: head → flat weight index → value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Grad {
    pub heads: BTreeMap<Head, BTreeMap<usize, f64>>,
}

impl Grad {
    pub fn add(&mut self, head: Head, index: usize, v: f64) {
        *self.heads.entry(head).or_default().entry(index).or_insert(0.0) += v;
    }

    /// Adds `scale · 1` for every feature at output `k` of `head`.
    pub fn add_features(&mut self, head: Head, feats: &[u32], k: usize, scale: f64) {
        let w = head.width();
        for &f in feats {
            self.add(head, f as usize * w + k, scale);
        }
    }

    pub fn merge(&mut self, other: &Grad) {
        for (h, m) in &other.heads {
            for (i, v) in m {
                self.add(*h, *i, *v);
            }
        }
    }

    pub fn get(&self, head: Head, index: usize) -> f64 {
        self.heads.get(&head).and_then(|m| m.get(&index)).copied().unwrap_or(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.heads.values().flat_map(|m| m.values()).all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.heads.values().flat_map(|m| m.values()).map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.heads.values().flat_map(|m| m.values()).all(|v| *v == 0.0)
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn dot(w: &[f64], feats: &[u32], width: usize, k: usize) -> f64 {
    feats.iter().map(|&f| w[f as usize * width + k]).sum()
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|z| (z - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

pub fn policy_logits(store: &impl WeightStore, ctx: &StepContext, actions: &[Action]) -> Vec<f64> {
    let h = store.hasher();
    let Some(w) = store.head(Head::Policy) else {
        return vec![0.0; actions.len()];
    };
    actions.iter().map(|a| dot(w, &policy_features(&h, ctx, a), 1, 0)).collect()
}

/// Raw logits of the transition head, one per effect kind.
pub fn effect_logits(store: &impl WeightStore, ctx: &StepContext, action: &Action) -> [f64; EFFECT_KINDS] {
    let mut out = [0.0; EFFECT_KINDS];
    if let Some(w) = store.head(Head::Trans) {
        let feats = wm_features(&store.hasher(), ctx, action);
        for (k, o) in out.iter_mut().enumerate() {
            *o = dot(w, &feats, EFFECT_KINDS, k);
        }
    }
    out
}

const OUTPUTS: [EffectAtom; 3] = [EffectAtom::OutputEmpty, EffectAtom::OutputError, EffectAtom::OutputListing];

/// Thresholds per-kind probabilities at 0.5 (strictly), keeps exactly one
/// output atom (the highest scored, ties to the first in `OUTPUTS`), then
/// resolves a NoChange/mutation clash in favour of the higher-scored side.
pub fn decode_effects(scores: &[f64; EFFECT_KINDS]) -> EffectSet {
    let mut set: EffectSet = EffectAtom::ALL
        .into_iter()
        .filter(|a| !OUTPUTS.contains(a) && scores[a.index()] > 0.5)
        .collect();
    let output = OUTPUTS
        .into_iter()
        .reduce(|best, a| if scores[a.index()] > scores[best.index()] { a } else { best })
        .expect("non-empty");
    set.insert(output);
    let no_change = scores[EffectAtom::NoChange.index()];
    let best_mutation = set
        .iter()
        .filter(|a| a.is_mutation())
        .map(|a| scores[a.index()])
        .fold(f64::NEG_INFINITY, f64::max);
    if set.contains(&EffectAtom::NoChange) && best_mutation > f64::NEG_INFINITY {
        if no_change >= best_mutation {
            set.retain(|a| !a.is_mutation());
        } else {
            set.remove(&EffectAtom::NoChange);
        }
    }
    set
}

pub fn predict_effects(store: &impl WeightStore, ctx: &StepContext, action: &Action) -> EffectSet {
    let z = effect_logits(store, ctx, action);
    decode_effects(&z.map(sigmoid))
}

/// Predicted next-observation fields; empty for stores without that head.
pub fn predict_fields(store: &impl WeightStore, ctx: &StepContext, action: &Action) -> Vec<ObsField> {
    let Some(w) = store.head(Head::State) else { return Vec::new() };
    let feats = wm_features(&store.hasher(), ctx, action);
    ObsField::ALL.into_iter().filter(|f| dot(w, &feats, OBS_FIELDS, f.index()) > 0.0).collect()
}

/// Logits for (yes, wait).
pub fn critic_logits(store: &impl WeightStore, ctx: &StepContext, action: &Action, predicted: &EffectSet) -> [f64; 2] {
    let Some(w) = store.head(Head::Critic) else { return [0.0; 2] };
    let feats = critic_features(&store.hasher(), ctx, action, predicted);
    [dot(w, &feats, 2, 0), dot(w, &feats, 2, 1)]
}

pub fn verdict_index(v: Verdict) -> usize {
    match v {
        Verdict::Yes => 0,
        Verdict::Wait => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uninformed_scores_decode_to_empty_output() {
        assert_eq!(decode_effects(&[0.5; EFFECT_KINDS]), [EffectAtom::OutputEmpty].into());
    }

    #[test]
    fn repair_keeps_higher_side() {
        let mut s = [0.1; EFFECT_KINDS];
        s[EffectAtom::NoChange.index()] = 0.9;
        s[EffectAtom::Created(crate::worldsim::Slot::Arg1).index()] = 0.6;
        s[EffectAtom::OutputError.index()] = 0.7;
        let set = decode_effects(&s);
        assert_eq!(set, [EffectAtom::NoChange, EffectAtom::OutputError].into());
        s[EffectAtom::NoChange.index()] = 0.55;
        let set = decode_effects(&s);
        assert!(!set.contains(&EffectAtom::NoChange));
    }

    #[test]
    fn softmax_is_shift_invariant() {
        let a = softmax(&[0.3, -1.0, 2.0]);
        let b = softmax(&[100.3, 99.0, 102.0]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(softmax(&[5.0]), vec![1.0]);
    }
}
