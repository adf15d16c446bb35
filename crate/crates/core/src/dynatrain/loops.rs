//! Epoch loops over shuffled mini-batches.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cogmodel::{lm_loss_and_grad, policy_loss_and_grad, sgd_step, PolicyExample, WeightStore};
use crate::error::Result;
use crate::traces::WmSample;

fn order(n: usize, seed: u64, epoch: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (epoch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    idx.shuffle(&mut rng);
    idx
}

/// Runs `epochs` passes; returns the summed loss of each pass.
fn run<T: Clone>(
    items: &[T],
    epochs: usize,
    batch_size: usize,
    seed: u64,
    mut step: impl FnMut(&[T]) -> Result<f64>,
) -> Result<Vec<f64>> {
    let mut losses = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let idx = order(items.len(), seed, epoch);
        let mut total = 0.0;
        for chunk in idx.chunks(batch_size.max(1)) {
            let batch: Vec<T> = chunk.iter().map(|&i| items[i].clone()).collect();
            total += step(&batch)?;
        }
        losses.push(total);
    }
    Ok(losses)
}

/// World-model training; the loss of each batch is measured before its step.
pub fn train_wm(
    store: &mut impl WeightStore,
    samples: &[WmSample],
    epochs: usize,
    lr: f64,
    batch_size: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    run(samples, epochs, batch_size, seed, |batch| {
        let (loss, grad) = lm_loss_and_grad(store, batch)?;
        sgd_step(store, &grad, lr)?;
        Ok(loss)
    })
}

pub fn train_policy(
    store: &mut impl WeightStore,
    examples: &[PolicyExample],
    epochs: usize,
    lr: f64,
    batch_size: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    run(examples, epochs, batch_size, seed, |batch| {
        let (loss, grad) = policy_loss_and_grad(store, batch)?;
        sgd_step(store, &grad, lr)?;
        Ok(loss)
    })
}
