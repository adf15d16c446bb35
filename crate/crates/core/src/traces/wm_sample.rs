//! World-model training items in three forms: full next state, effect delta,
//! and critique of the agent's own simulation.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::context::replay_contexts;
use super::critique::{inject_critique, rule_critic, Critique};
use super::segment::{ActionRecord, SegmentCosts, Verdict};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::worldsim::{Action, EffectSet, Observation, OutputClass, TaskSpec};

pub const WM_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WmVariant {
    NextState,
    StateDelta,
    Critique,
}

impl WmVariant {
    pub const ALL: [WmVariant; 3] = [WmVariant::NextState, WmVariant::StateDelta, WmVariant::Critique];

    pub fn as_str(self) -> &'static str {
        match self {
            WmVariant::NextState => "next_state",
            WmVariant::StateDelta => "state_delta",
            WmVariant::Critique => "critique",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        WmVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown world-model variant `{s}`")))
    }
}

impl fmt::Display for WmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Binary facts about the next observation relative to the current one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObsField {
    CwdChanged,
    ListingGained,
    ListingLost,
    ListingEmpty,
    OutputListing,
    OutputError,
}

pub const OBS_FIELDS: usize = 6;

impl ObsField {
    pub const ALL: [ObsField; OBS_FIELDS] = [
        ObsField::CwdChanged,
        ObsField::ListingGained,
        ObsField::ListingLost,
        ObsField::ListingEmpty,
        ObsField::OutputListing,
        ObsField::OutputError,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

pub fn obs_fields(prev: &Observation, next: &Observation) -> Vec<ObsField> {
    let same_dir = prev.cwd == next.cwd;
    let flags = [
        !same_dir,
        same_dir && next.listing.difference(&prev.listing).next().is_some(),
        same_dir && prev.listing.difference(&next.listing).next().is_some(),
        next.listing.is_empty(),
        next.last_output.class == OutputClass::Listing,
        next.last_output.class == OutputClass::Error,
    ];
    ObsField::ALL.into_iter().zip(flags).filter(|(_, f)| *f).map(|(o, _)| o).collect()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum WmTarget {
    NextState { effects: EffectSet, fields: Vec<ObsField> },
    StateDelta { effects: EffectSet },
    Critique { critique: Critique, record: ActionRecord },
}

impl WmTarget {
    pub fn variant(&self) -> WmVariant {
        match self {
            WmTarget::NextState { .. } => WmVariant::NextState,
            WmTarget::StateDelta { .. } => WmVariant::StateDelta,
            WmTarget::Critique { .. } => WmVariant::Critique,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WmSample {
    pub schema_version: u32,
    pub task_id: String,
    pub seed: u64,
    pub step: usize,
    pub context: super::context::StepContext,
    pub action: Action,
    pub target: WmTarget,
}

impl WmSample {
    pub fn variant(&self) -> WmVariant {
        self.target.variant()
    }
}

#[derive(Clone, Debug, Default)]
pub struct WmOptions {
    /// Only inject critiques whose verdict is `wait`.
    pub wait_only: bool,
    pub costs: SegmentCosts,
}

/// Samples plus the number of steps skipped for lacking a simulation.
#[derive(Clone, Debug, Default)]
pub struct WmSamples {
    pub samples: Vec<WmSample>,
    pub no_simulation: usize,
}

/// One sample per step of a trajectory that terminated within budget; reward
/// is ignored. `task` must be the hint-free task the trajectory was run on.
pub fn wm_samples(task: &TaskSpec, traj: &Trajectory, variant: WmVariant, opts: &WmOptions) -> WmSamples {
    let mut out = WmSamples::default();
    if !traj.terminated_within_budget {
        return out;
    }
    let contexts = replay_contexts(task, traj);
    for (i, (ctx, rec)) in contexts.into_iter().zip(&traj.records).enumerate() {
        let effects = traj.effects(i);
        let target = match variant {
            WmVariant::NextState => WmTarget::NextState {
                effects,
                fields: obs_fields(&traj.observations[i], &traj.observations[i + 1]),
            },
            WmVariant::StateDelta => WmTarget::StateDelta { effects },
            WmVariant::Critique => {
                let Ok(critique) = rule_critic(rec, &effects) else {
                    out.no_simulation += 1;
                    continue;
                };
                if opts.wait_only && critique.verdict == Verdict::Yes {
                    continue;
                }
                let record = inject_critique(rec, &critique, &opts.costs).expect("target taken from the record");
                WmTarget::Critique { critique, record }
            }
        };
        out.samples.push(WmSample {
            schema_version: WM_SCHEMA_VERSION,
            task_id: traj.task_id.clone(),
            seed: traj.seed,
            step: i,
            context: ctx,
            action: rec.action.clone(),
            target,
        });
    }
    out
}
