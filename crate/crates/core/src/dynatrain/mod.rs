//! Training orchestration: rejection sampling, imitation of reconstructed
//! expert traces, the two-stage world-model-then-policy loop, baselines,
//! iterative self-training, and world-model scaling.

mod config;
mod dataset;
mod loops;
mod methods;
mod scale;
mod star;
mod vanilla;

pub use config::{Method, TrainConfig};
pub use dataset::{
    build_bundle, policy_examples, rejection_sample, wm_set, DatasetBundle, Provenance, Rollouts, TaskIndex,
};
pub use loops::{train_policy, train_wm};
pub use methods::{train_ddt, train_dit, train_iterated, train_rft, train_round, DitReport, StageLog};
pub use scale::{scale_wm, synthetic_tasks, ScaleConfig, ScaleReport};
pub use star::{iterate_star, IterMetrics};
pub use vanilla::{simulate_all, train_vanilla_dyna, VanillaReport};
