//! The two training losses. Both are sums over the batch.
//!
//! World-model loss: binary cross-entropy per effect kind (and per
//! next-observation field for `next_state`); for critique samples only the
//! mask-true critique segment contributes, as a verdict cross-entropy on the
//! critic head plus binary cross-entropy on the corrected atoms.
//!
//! Policy loss: `-Σ R · log π(a|ctx)` over legal actions.

use serde::{Deserialize, Serialize};

use super::features::{critic_features, policy_features, wm_features};
use super::params::{dot, sigmoid, softmax, softplus, verdict_index, Grad, Head, WeightStore};
use crate::error::{Error, Result};
use crate::traces::{ObsField, Payload, StepContext, Tag, WmSample, WmTarget};
use crate::worldsim::{legal_actions, Action, EffectAtom, EffectSet};

fn require(store: &impl WeightStore, head: Head) -> Result<&[f64]> {
    store.head(head).ok_or(Error::MissingHead(head.as_str()))
}

/// Binary cross-entropy of one output against `y`; accumulates its gradient.
fn bce(w: &[f64], feats: &[u32], head: Head, k: usize, y: bool, grad: &mut Grad) -> f64 {
    let z = dot(w, feats, head.width(), k);
    let y = y as u8 as f64;
    grad.add_features(head, feats, k, sigmoid(z) - y);
    softplus(z) - y * z
}

fn effects_bce(w: &[f64], feats: &[u32], effects: &EffectSet, grad: &mut Grad) -> f64 {
    EffectAtom::ALL
        .into_iter()
        .map(|a| bce(w, feats, Head::Trans, a.index(), effects.contains(&a), grad))
        .sum()
}

fn sample_loss(store: &impl WeightStore, s: &WmSample, grad: &mut Grad) -> Result<f64> {
    let h = store.hasher();
    match &s.target {
        WmTarget::StateDelta { effects } => {
            let w = require(store, Head::Trans)?;
            Ok(effects_bce(w, &wm_features(&h, &s.context, &s.action), effects, grad))
        }
        WmTarget::NextState { effects, fields } => {
            let w = require(store, Head::Trans)?;
            let ws = require(store, Head::State)?;
            let feats = wm_features(&h, &s.context, &s.action);
            let mut loss = effects_bce(w, &feats, effects, grad);
            for f in ObsField::ALL {
                loss += bce(ws, &feats, Head::State, f.index(), fields.contains(&f), grad);
            }
            Ok(loss)
        }
        WmTarget::Critique { record, .. } => {
            let Some(mask) = &record.mask else { return Ok(0.0) };
            let mut loss = 0.0;
            for (i, seg) in record.trace.iter().enumerate() {
                if !mask.get(i).copied().unwrap_or(false) {
                    continue;
                }
                let (Tag::Critique, Payload::Critique { verdict, correction }) = (seg.tag, &seg.payload) else {
                    return Err(Error::InvalidTrace(format!("mask-true segment {} is not a critique", seg.id)));
                };
                let action = seg.action_ref.as_ref().unwrap_or(&s.action);
                let predicted = i
                    .checked_sub(1)
                    .and_then(|j| record.trace[j].payload.effects())
                    .cloned()
                    .unwrap_or_default();
                let wc = require(store, Head::Critic)?;
                let cf = critic_features(&h, &s.context, action, &predicted);
                let logits = [dot(wc, &cf, 2, 0), dot(wc, &cf, 2, 1)];
                let p = softmax(&logits);
                let y = verdict_index(*verdict);
                loss -= p[y].ln();
                for (k, pk) in p.iter().enumerate() {
                    grad.add_features(Head::Critic, &cf, k, pk - (k == y) as u8 as f64);
                }
                let w = require(store, Head::Trans)?;
                let feats = wm_features(&h, &s.context, action);
                // The critique speaks about every simulated atom (confirmed
                // unless marked spurious) and every missing one.
                for a in predicted.iter().chain(&correction.missing) {
                    let keep = !correction.spurious.contains(a);
                    loss += bce(w, &feats, Head::Trans, a.index(), keep, grad);
                }
            }
            Ok(loss)
        }
    }
}

/// World-model loss and gradient over a single-variant batch.
pub fn lm_loss_and_grad(store: &impl WeightStore, batch: &[WmSample]) -> Result<(f64, Grad)> {
    let first = batch.first().ok_or(Error::EmptyBatch)?;
    if batch.iter().any(|s| s.variant() != first.variant()) {
        return Err(Error::MixedVariants);
    }
    let mut grad = Grad::default();
    let mut loss = 0.0;
    for s in batch {
        loss += sample_loss(store, s, &mut grad)?;
    }
    Ok((loss, grad))
}

/// One policy-learning step: the context, the action taken, and the
/// trajectory's reward.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct PolicyExample {
    pub context: StepContext,
    pub action: Action,
    pub reward: f64,
}

struct Scored {
    feats: Vec<Vec<u32>>,
    probs: Vec<f64>,
    chosen: usize,
}

fn score(store: &impl WeightStore, ctx: &StepContext, action: &Action) -> Result<Scored> {
    let h = store.hasher();
    let w = require(store, Head::Policy)?;
    let actions = legal_actions(&ctx.vocab);
    let chosen = actions
        .iter()
        .position(|a| a == action)
        .ok_or_else(|| Error::OutOfVocabulary(action.to_string()))?;
    let feats: Vec<Vec<u32>> = actions.iter().map(|a| policy_features(&h, ctx, a)).collect();
    let logits: Vec<f64> = feats.iter().map(|f| dot(w, f, 1, 0)).collect();
    Ok(Scored { feats, probs: softmax(&logits), chosen })
}

/// `-Σ R log π(a|ctx)`; steps with `R = 0` contribute nothing.
pub fn policy_loss_and_grad(store: &impl WeightStore, batch: &[PolicyExample]) -> Result<(f64, Grad)> {
    let mut grad = Grad::default();
    let mut loss = 0.0;
    for ex in batch {
        if !(ex.reward == 0.0 || ex.reward == 1.0) {
            return Err(Error::Config(format!("reward must be 0 or 1, got {}", ex.reward)));
        }
        if ex.reward == 0.0 {
            continue;
        }
        let s = score(store, &ex.context, &ex.action)?;
        loss -= ex.reward * s.probs[s.chosen].ln();
        for (j, (f, p)) in s.feats.iter().zip(&s.probs).enumerate() {
            let coef = ex.reward * (p - (j == s.chosen) as u8 as f64);
            grad.add_features(Head::Policy, f, 0, coef);
        }
    }
    Ok((loss, grad))
}

/// Behaviour cloning: cross-entropy of the taken action under the
/// log-softmax, ignoring rewards.
pub fn bc_loss_and_grad(store: &impl WeightStore, batch: &[PolicyExample]) -> Result<(f64, Grad)> {
    let h = store.hasher();
    let w = require(store, Head::Policy)?;
    let mut grad = Grad::default();
    let mut loss = 0.0;
    for ex in batch {
        let actions = legal_actions(&ex.context.vocab);
        let target = actions
            .iter()
            .position(|a| *a == ex.action)
            .ok_or_else(|| Error::OutOfVocabulary(ex.action.to_string()))?;
        let feats: Vec<Vec<u32>> = actions.iter().map(|a| policy_features(&h, &ex.context, a)).collect();
        let z: Vec<f64> = feats.iter().map(|f| dot(w, f, 1, 0)).collect();
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - z[target];
        for (j, f) in feats.iter().enumerate() {
            let onehot = if j == target { 1.0 } else { 0.0 };
            grad.add_features(Head::Policy, f, 0, (z[j] - lse).exp() - onehot);
        }
    }
    Ok((loss, grad))
}

/// Loss only, for finite-difference checks.
pub fn lm_loss(store: &impl WeightStore, batch: &[WmSample]) -> Result<f64> {
    lm_loss_and_grad(store, batch).map(|(l, _)| l)
}

pub fn policy_loss(store: &impl WeightStore, batch: &[PolicyExample]) -> Result<f64> {
    policy_loss_and_grad(store, batch).map(|(l, _)| l)
}
