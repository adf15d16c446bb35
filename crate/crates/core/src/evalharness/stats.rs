//! Metrics over trajectory sets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::cogmodel::{predict_effects, WeightStore};
use crate::traces::{Trajectory, WmSample, WmTarget};

/// Product-moment correlation. Undefined (an error, never a number) when
/// either argument has zero variance.
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Nearest-rank percentile: the value at 1-based rank `ceil(p/100 · n)`.
pub fn nearest_rank(sorted: &[u32], p: f64) -> u32 {
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil().max(1.0) as usize;
    sorted[rank.min(n) - 1]
}

/// 10th and 90th percentile of per-step trace cost.
pub fn length_stats(trajectories: &[Trajectory]) -> Option<(u32, u32)> {
    let mut costs: Vec<u32> = trajectories.iter().flat_map(|t| t.records.iter().map(|r| r.cost())).collect();
    if costs.is_empty() {
        return None;
    }
    costs.sort_unstable();
    Some((nearest_rank(&costs, 10.0), nearest_rank(&costs, 90.0)))
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct WmAccuracy {
    pub acc: f64,
    pub per_task: BTreeMap<String, f64>,
    pub steps: usize,
    pub correct: usize,
    /// Steps whose record had no simulation of the executed action; counted
    /// as incorrect.
    pub no_simulation: usize,
}

/// Exact-match accuracy of the executed action's simulation against the
/// effects that followed, over trajectories that terminated within budget.
pub fn wm_accuracy(trajectories: &[Trajectory]) -> WmAccuracy {
    let mut out = WmAccuracy::default();
    let mut per_task: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for t in trajectories.iter().filter(|t| t.terminated_within_budget) {
        for (i, r) in t.records.iter().enumerate() {
            let hit = match r.final_simulation().and_then(|s| s.payload.effects()) {
                Some(pred) => *pred == t.effects(i),
                None => {
                    out.no_simulation += 1;
                    false
                }
            };
            out.steps += 1;
            out.correct += hit as usize;
            let e = per_task.entry(t.task_id.clone()).or_default();
            e.0 += hit as usize;
            e.1 += 1;
        }
    }
    out.acc = if out.steps == 0 { 0.0 } else { out.correct as f64 / out.steps as f64 };
    out.per_task = per_task.into_iter().map(|(k, (c, n))| (k, c as f64 / n as f64)).collect();
    out
}

/// Exact-match accuracy of a model's predicted effect sets on samples that
/// carry true effects; critique samples are ignored. Zero with no samples.
pub fn effect_accuracy(store: &impl WeightStore, samples: &[WmSample]) -> f64 {
    let (mut n, mut hit) = (0usize, 0usize);
    for s in samples {
        let truth = match &s.target {
            WmTarget::NextState { effects, .. } | WmTarget::StateDelta { effects } => effects,
            WmTarget::Critique { .. } => continue,
        };
        n += 1;
        hit += (predict_effects(store, &s.context, &s.action) == *truth) as usize;
    }
    if n == 0 {
        0.0
    } else {
        hit as f64 / n as f64
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    mean(&xs.iter().map(|x| (x - m) * (x - m)).collect::<Vec<_>>()).sqrt()
}
