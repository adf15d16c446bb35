//! Thought traces and the trace-level data operations: DIT reconstruction,
//! critique injection, and world-model sample extraction.

mod context;
mod critique;
mod reconstruct;
mod segment;
mod trajectory;
mod wm_sample;

pub use context::{replay_contexts, Replay, StepContext};
pub use critique::{inject_critique, judge, rule_critic, strip_critiques, Critique, RULE_CONFIDENCE};
pub use reconstruct::{reconstruct_dit, reconstruct_dit_with, DEFAULT_SKIP_BELOW};
pub use segment::{ActionRecord, Correction, Payload, SegmentCosts, Tag, TraceSegment, Verdict};
pub use trajectory::{EndReason, Trajectory, TRACE_SCHEMA_VERSION};
pub use wm_sample::{
    obs_fields, wm_samples, ObsField, WmOptions, WmSample, WmSamples, WmTarget, WmVariant, OBS_FIELDS,
    WM_SCHEMA_VERSION,
};
