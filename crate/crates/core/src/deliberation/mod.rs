//! Agents that produce thought traces and actions, and the episode loop.

mod agent;
mod config;
mod rollout;

pub use agent::{goal_overlap, Agent, StepInput, WmSource};
pub use config::{AgentConfig, ThinkMode};
pub use rollout::{episode_seed, in_pool, rollout, rollout_many, simulated_rollout};
