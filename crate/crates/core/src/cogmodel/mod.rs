//! The shared parameter store: hashed features, policy and world-model
//! heads, the two losses, and plain SGD.

mod checkpoint;
mod features;
mod loss;
mod optim;
mod params;

pub use checkpoint::{weight_hash, Checkpoint, StoreKind, CHECKPOINT_SCHEMA_VERSION};
pub use features::{critic_features, instruction_key, policy_features, wm_features, FeatureHasher, DEFAULT_DIM};
pub use loss::{
    bc_loss_and_grad, lm_loss, lm_loss_and_grad, policy_loss, policy_loss_and_grad, PolicyExample,
};
pub use optim::sgd_step;
pub use params::{
    critic_logits, decode_effects, effect_logits, policy_logits, predict_effects, predict_fields, sigmoid,
    softmax, verdict_index, CogParams, Grad, Head, SeparateWm, WeightStore,
};
