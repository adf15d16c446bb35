//! Experiment runner: one TOML file per run, seed and worker overrides,
//! staged outputs committed together, and an append-only manifest log.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cogmodel::{Checkpoint, CogParams, SeparateWm};
use crate::deliberation::{rollout_many, Agent, AgentConfig, ThinkMode, WmSource};
use crate::dynatrain::{
    iterate_star, policy_examples, rejection_sample, scale_wm, train_ddt, train_dit, train_rft, train_vanilla_dyna,
    wm_set, ScaleConfig, TaskIndex, TrainConfig,
};
use crate::error::{Error, Result};
use crate::evalharness::{evaluate_policy, length_stats, wm_accuracy, EvalReport};
use crate::io::{append_line, encode_jsonl, read_jsonl, sha256_hex, write_atomic};
use crate::traces::{reconstruct_dit, Trajectory, WmOptions, WmVariant};
use crate::worldsim::{generate_tasks, Domain, GeneratorConfig, Split, TaskSpec};

pub const TASKS: &str = "tasks";
pub const TRAJECTORIES: &str = "trajectories";
pub const MANIFEST_LOG: &str = "manifests.jsonl";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSetConfig {
    /// Domains with train and in-distribution test tasks.
    pub domains: Vec<Domain>,
    pub train_per_domain: usize,
    pub test_id_per_domain: usize,
    /// Held-out archive tasks.
    pub test_ood: usize,
    pub opaque_fraction: f64,
}

impl Default for TaskSetConfig {
    fn default() -> Self {
        TaskSetConfig {
            domains: vec![Domain::Files, Domain::Dirs, Domain::Nav],
            train_per_domain: 40,
            test_id_per_domain: 20,
            test_ood: 20,
            opaque_fraction: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleSection {
    pub extra_per_domain: usize,
    pub variant: WmVariant,
    /// Defaults to the run seed plus 1000.
    pub synth_seed: Option<u64>,
}

impl Default for ScaleSection {
    fn default() -> Self {
        ScaleSection { extra_per_domain: 40, variant: WmVariant::StateDelta, synth_seed: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds task generation and training; overrides `train.seed`.
    pub seed: u64,
    /// World-model objective for `train-ddt`.
    pub variant: WmVariant,
    pub tasks: TaskSetConfig,
    pub train: TrainConfig,
    pub scale: ScaleSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            variant: WmVariant::Critique,
            tasks: TaskSetConfig::default(),
            train: TrainConfig::default(),
            scale: ScaleSection::default(),
        }
    }
}

/// Command-line settings that take precedence over the file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub greedy: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Applies overrides, ties the training seed to the run seed, and
    /// validates everything.
    pub fn resolve(mut self, o: &Overrides) -> Result<Self> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(w) = o.workers {
            self.train.workers = w;
        }
        if o.greedy {
            self.train.agent.greedy = true;
        }
        self.train.seed = self.seed;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if self.train.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let t = &self.tasks;
        if t.domains.is_empty() {
            return Err(Error::Config("tasks.domains is empty".into()));
        }
        if t.domains.contains(&Domain::Archive) {
            return Err(Error::HeldOutDomain("archive".into()));
        }
        if !(0.0..=1.0).contains(&t.opaque_fraction) {
            return Err(Error::Config(format!("opaque_fraction must be in [0, 1], got {}", t.opaque_fraction)));
        }
        Ok(())
    }

    /// Hash of the resolved configuration, independent of file formatting.
    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("config serializes"))
    }

    pub fn synth_seed(&self) -> u64 {
        self.scale.synth_seed.unwrap_or(self.seed + 1000)
    }
}

/// Train tasks per domain, then test-ID per domain, then the archive set.
pub fn generate_task_set(cfg: &TaskSetConfig, seed: u64) -> Result<Vec<TaskSpec>> {
    let mut out = Vec::new();
    let mut add = |domain, split, count| -> Result<()> {
        if count > 0 {
            let g = GeneratorConfig { opaque_fraction: cfg.opaque_fraction, ..GeneratorConfig::new(domain, split, count, seed) };
            out.extend(generate_tasks(&g)?);
        }
        Ok(())
    };
    for &d in &cfg.domains {
        add(d, Split::Train, cfg.train_per_domain)?;
    }
    for &d in &cfg.domains {
        add(d, Split::TestId, cfg.test_id_per_domain)?;
    }
    add(Domain::Archive, Split::TestOod, cfg.test_ood)?;
    Ok(out)
}

pub fn split_of(tasks: &[TaskSpec], split: Split) -> Vec<TaskSpec> {
    tasks.iter().filter(|t| t.split == split).cloned().collect()
}

pub fn test_tasks(tasks: &[TaskSpec]) -> Vec<TaskSpec> {
    tasks.iter().filter(|t| t.split != Split::Train).cloned().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    /// Input path to content hash.
    pub inputs: BTreeMap<String, String>,
    /// Output path to content hash; every file the run wrote.
    pub outputs: BTreeMap<String, String>,
    pub wall_ms: u64,
}

/// Inputs read by a run, with their hashes.
#[derive(Default)]
pub struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn bytes(&mut self, path: &Path) -> Result<Vec<u8>> {
        let b = fs::read(path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
        self.0.insert(path.display().to_string(), sha256_hex(&b));
        Ok(b)
    }

    pub fn tasks(&mut self, path: &Path) -> Result<Vec<TaskSpec>> {
        self.bytes(path)?;
        let tasks: Vec<TaskSpec> = read_jsonl(path, TASKS)?;
        for t in &tasks {
            t.validate()?;
        }
        Ok(tasks)
    }

    pub fn trajectories(&mut self, path: &Path) -> Result<Vec<Trajectory>> {
        self.bytes(path)?;
        read_jsonl(path, TRAJECTORIES)
    }

    pub fn model(&mut self, path: &Path) -> Result<CogParams> {
        let c = Checkpoint::from_json(&self.bytes(path)?)?;
        c.into_cog(c.dim, c.hash_seed)
    }

    /// The checkpoint at `path`, or fresh parameters.
    pub fn model_or_new(&mut self, path: Option<&Path>, seed: u64) -> Result<CogParams> {
        path.map_or_else(|| Ok(CogParams::new(seed)), |p| self.model(p))
    }

    pub fn json<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T> {
        Ok(serde_json::from_slice(&self.bytes(path)?)?)
    }
}

/// Output files held in memory until the whole run has succeeded.
#[derive(Default)]
pub struct Staged(Vec<(String, Vec<u8>)>);

impl Staged {
    pub fn bytes(&mut self, name: &str, bytes: Vec<u8>) {
        self.0.push((name.to_string(), bytes));
    }

    pub fn jsonl<T: Serialize>(&mut self, name: &str, kind: &str, items: &[T]) {
        self.bytes(name, encode_jsonl(kind, items));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut b = serde_json::to_vec_pretty(value).expect("record serializes");
        b.push(b'\n');
        self.bytes(name, b);
    }

    pub fn model(&mut self, name: &str, p: &CogParams) {
        self.bytes(name, Checkpoint::from_cog(p).to_json());
    }

    pub fn separate(&mut self, name: &str, p: &SeparateWm) {
        self.bytes(name, Checkpoint::from_separate(p).to_json());
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(n, _)| n.as_str())
    }

    /// Writes every staged file under `out`, then appends the manifest. If
    /// any write fails, files already written by this run are removed.
    pub fn commit(self, out: &Path, mut manifest: RunManifest) -> Result<RunManifest> {
        let mut written: Vec<PathBuf> = Vec::new();
        for (name, bytes) in &self.0 {
            let p = out.join(name);
            if let Err(e) = write_atomic(&p, bytes) {
                for w in &written {
                    let _ = fs::remove_file(w);
                }
                return Err(e);
            }
            manifest.outputs.insert(p.display().to_string(), sha256_hex(bytes));
            written.push(p);
        }
        append_line(&out.join(MANIFEST_LOG), &manifest)?;
        Ok(manifest)
    }
}

/// What one subcommand needs besides the configuration.
#[derive(Clone, Debug)]
pub enum Job {
    GenTasks,
    ExpertRollout { tasks: PathBuf },
    Reconstruct { trajectories: PathBuf },
    TrainDit { tasks: PathBuf, expert: PathBuf },
    TrainRft { tasks: PathBuf, init: Option<PathBuf> },
    TrainDdt { tasks: PathBuf, init: Option<PathBuf> },
    TrainDyna { tasks: PathBuf, init: Option<PathBuf> },
    Iterate { tasks: PathBuf, init: Option<PathBuf>, hint: bool },
    ScaleWm { tasks: PathBuf, init: Option<PathBuf> },
    Rollout { tasks: PathBuf, model: PathBuf },
    Eval { tasks: PathBuf, model: PathBuf },
    WmAcc { trajectories: PathBuf },
    Report { reports: Vec<PathBuf> },
}

impl Job {
    pub fn command(&self) -> &'static str {
        match self {
            Job::GenTasks => "gen-tasks",
            Job::ExpertRollout { .. } => "expert-rollout",
            Job::Reconstruct { .. } => "reconstruct",
            Job::TrainDit { .. } => "train-dit",
            Job::TrainRft { .. } => "train-rft",
            Job::TrainDdt { .. } => "train-ddt",
            Job::TrainDyna { .. } => "train-dyna",
            Job::Iterate { .. } => "iterate",
            Job::ScaleWm { .. } => "scale-wm",
            Job::Rollout { .. } => "rollout",
            Job::Eval { .. } => "eval",
            Job::WmAcc { .. } => "wm-acc",
            Job::Report { .. } => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructSummary {
    pub trajectories: usize,
    pub steps: usize,
    pub p90_before: u32,
    pub p90_after: u32,
    pub actions_agree: bool,
}

/// Runs `job` and stages its outputs without touching the output directory.
pub fn execute(job: &Job, cfg: &RunConfig) -> Result<(Inputs, Staged)> {
    let mut inp = Inputs::default();
    let mut out = Staged::default();
    let tc = &cfg.train;
    let agent_cfg = &tc.agent;
    match job {
        Job::GenTasks => {
            let tasks = generate_task_set(&cfg.tasks, cfg.seed)?;
            out.jsonl("tasks.jsonl", TASKS, &tasks);
        }
        Job::ExpertRollout { tasks } => {
            let train = split_of(&inp.tasks(tasks)?, Split::Train);
            let p = CogParams::new(cfg.seed);
            let ecfg = AgentConfig { think_mode: ThinkMode::VerboseExpert, ..agent_cfg.clone() };
            let agent = Agent { params: &p, wm: WmSource::Own, config: &ecfg };
            let trajs: Vec<Trajectory> = rollout_many(&agent, &train, &[cfg.seed], tc.workers).into_iter().flatten().collect();
            out.jsonl("expert.jsonl", TRAJECTORIES, &trajs);
        }
        Job::Reconstruct { trajectories } => {
            let before = inp.trajectories(trajectories)?;
            let after: Vec<Trajectory> = before
                .iter()
                .map(|t| {
                    let mut r = t.clone();
                    r.records.iter_mut().for_each(|rec| *rec = reconstruct_dit(rec));
                    r
                })
                .collect();
            let summary = ReconstructSummary {
                trajectories: after.len(),
                steps: after.iter().map(Trajectory::len).sum(),
                p90_before: length_stats(&before).map_or(0, |s| s.1),
                p90_after: length_stats(&after).map_or(0, |s| s.1),
                actions_agree: before.iter().zip(&after).all(|(a, b)| a.actions().eq(b.actions())),
            };
            out.jsonl("dit.jsonl", TRAJECTORIES, &after);
            out.json("reconstruct.json", &summary);
        }
        Job::TrainDit { tasks, expert } => {
            let train = split_of(&inp.tasks(tasks)?, Split::Train);
            let expert = inp.trajectories(expert)?;
            let (p, report) = train_dit(&CogParams::new(cfg.seed), &train, &expert, tc)?;
            out.model("model-dit.json", &p);
            out.json("dit-report.json", &report);
        }
        Job::TrainRft { tasks, init } => {
            let train = split_of(&inp.tasks(tasks)?, Split::Train);
            let p0 = inp.model_or_new(init.as_deref(), cfg.seed)?;
            let (p, logs) = train_rft(&p0, &train, tc)?;
            out.model("model-rft.json", &p);
            out.jsonl("stages-rft.jsonl", "stages", &logs);
        }
        Job::TrainDdt { tasks, init } => {
            let train = split_of(&inp.tasks(tasks)?, Split::Train);
            let p0 = inp.model_or_new(init.as_deref(), cfg.seed)?;
            let (p, logs) = train_ddt(&p0, &train, cfg.variant, tc)?;
            out.model(&format!("model-ddt-{}.json", cfg.variant), &p);
            out.jsonl(&format!("stages-ddt-{}.jsonl", cfg.variant), "stages", &logs);
        }
        Job::TrainDyna { tasks, init } => {
            let train = split_of(&inp.tasks(tasks)?, Split::Train);
            let p0 = inp.model_or_new(init.as_deref(), cfg.seed)?;
            let rollouts = {
                let agent = Agent { params: &p0, wm: WmSource::Own, config: agent_cfg };
                rejection_sample(&agent, &train, &tc.rollout_seeds(0), tc.workers)
            };
            let (p, wm, report) = train_vanilla_dyna(&p0, &train, &rollouts, tc)?;
            out.model("model-dyna.json", &p);
            out.separate("wm-dyna.json", &wm);
            out.json("dyna-report.json", &report);
        }
        Job::Iterate { tasks, init, hint } => {
            let all = inp.tasks(tasks)?;
            let p0 = inp.model_or_new(init.as_deref(), cfg.seed)?;
            let (p, metrics) = iterate_star(&p0, &split_of(&all, Split::Train), &test_tasks(&all), *hint, tc)?;
            let tag = if *hint { "iterate-hint" } else { "iterate" };
            out.model(&format!("model-{tag}.json"), &p);
            out.jsonl(&format!("{tag}.jsonl"), "iterations", &metrics);
        }
        Job::ScaleWm { tasks, init } => {
            let all = inp.tasks(tasks)?;
            let p0 = inp.model_or_new(init.as_deref(), cfg.seed)?;
            let (train, test) = (split_of(&all, Split::Train), test_tasks(&all));
            let agent = Agent { params: &p0, wm: WmSource::Own, config: agent_cfg };
            let successes = rejection_sample(&agent, &train, &tc.rollout_seeds(0), tc.workers).successes;
            let policy_set = policy_examples(&TaskIndex::new(&train), &successes);
            let test_rollouts = rejection_sample(&agent, &test, &tc.rollout_seeds(1), tc.workers);
            let opts = WmOptions { wait_only: false, costs: agent_cfg.costs.clone() };
            let (heldout, _) = wm_set(&TaskIndex::new(&test), &test_rollouts.all, WmVariant::StateDelta, &opts);
            let scale = ScaleConfig {
                extra_per_domain: cfg.scale.extra_per_domain,
                variant: cfg.scale.variant,
                synth_seed: cfg.synth_seed(),
            };
            let (p, report) = scale_wm(&p0, &policy_set, &test, &heldout, &scale, tc)?;
            out.model("model-scale.json", &p);
            out.json("scale-report.json", &report);
        }
        Job::Rollout { tasks, model } => {
            let tasks = inp.tasks(tasks)?;
            let p = inp.model(model)?;
            let agent = Agent { params: &p, wm: WmSource::Own, config: agent_cfg };
            let trajs: Vec<Trajectory> =
                rollout_many(&agent, &tasks, &tc.eval_seeds(), tc.workers).into_iter().flatten().collect();
            out.jsonl("rollouts.jsonl", TRAJECTORIES, &trajs);
        }
        Job::Eval { tasks, model } => {
            let tasks = inp.tasks(tasks)?;
            let p = inp.model(model)?;
            let hash = Checkpoint::from_cog(&p).hash();
            let agent = Agent { params: &p, wm: WmSource::Own, config: agent_cfg };
            let (report, _) = evaluate_policy(&agent, &tasks, &tc.eval_seeds(), tc.workers, &hash);
            out.json("report.json", &report);
            out.bytes("report.csv", format!("{}\n{}\n", EvalReport::CSV_HEADER, report.csv_row()).into_bytes());
        }
        Job::WmAcc { trajectories } => {
            let trajs = inp.trajectories(trajectories)?;
            out.json("wm-accuracy.json", &wm_accuracy(&trajs));
        }
        Job::Report { reports } => {
            let mut table = format!("source,{}\n", EvalReport::CSV_HEADER);
            for path in reports {
                let r: EvalReport = inp.json(path)?;
                table.push_str(&format!("{},{}\n", path.display(), r.csv_row()));
            }
            out.bytes("table.csv", table.into_bytes());
        }
    }
    Ok((inp, out))
}

/// Executes `job` and commits its outputs under `out_dir` with a manifest.
pub fn run(job: &Job, cfg: &RunConfig, out_dir: &Path) -> Result<RunManifest> {
    let start = Instant::now();
    let (inputs, staged) = execute(job, cfg)?;
    let manifest = RunManifest {
        command: job.command().to_string(),
        config_hash: cfg.hash(),
        seeds: vec![cfg.seed],
        inputs: inputs.0,
        outputs: BTreeMap::new(),
        wall_ms: start.elapsed().as_millis() as u64,
    };
    staged.commit(out_dir, manifest)
}
