use super::params::{Grad, WeightStore};
use crate::error::{Error, Result};

/// `w ← w − lr·g`, then bumps the version. Rejects the step, leaving weights
/// untouched, when `lr ≤ 0`, the gradient is non-finite, or it names a head
/// the store lacks.
pub fn sgd_step(store: &mut impl WeightStore, grad: &Grad, lr: f64) -> Result<()> {
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidLearningRate(lr));
    }
    if !grad.is_finite() {
        return Err(Error::NonFiniteGradient);
    }
    for head in grad.heads.keys() {
        if store.head(*head).is_none() {
            return Err(Error::MissingHead(head.as_str()));
        }
    }
    for (head, entries) in &grad.heads {
        let w = store.head_mut(*head).expect("checked above");
        for (i, g) in entries {
            w[*i] -= lr * g;
        }
    }
    store.bump_version();
    Ok(())
}
