#![allow(dead_code)]

use dynathink::cogmodel::{CogParams, Grad, Head, PolicyExample, WeightStore};
use dynathink::deliberation::{rollout_many, Agent, AgentConfig, ThinkMode, WmSource};
use dynathink::dynatrain::{rejection_sample, train_dit, wm_set, TaskIndex, TrainConfig};
use dynathink::runner::{generate_task_set, split_of, test_tasks, TaskSetConfig};
use dynathink::traces::{replay_contexts, Trajectory, WmOptions, WmSample, WmVariant};
use dynathink::worldsim::{Domain, GeneratorConfig, Split, TaskSpec};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const WORKERS: usize = 4;

pub fn small_tasks(count: usize, seed: u64) -> Vec<TaskSpec> {
    let mut out = Vec::new();
    for d in [Domain::Files, Domain::Dirs, Domain::Nav] {
        out.extend(dynathink::worldsim::generate_tasks(&GeneratorConfig::new(d, Split::Train, count, seed)).unwrap());
    }
    out
}

pub fn expert_rollouts(tasks: &[TaskSpec], seed: u64) -> Vec<Trajectory> {
    let p0 = CogParams::new(seed);
    let ecfg = AgentConfig::mode(ThinkMode::VerboseExpert);
    let agent = Agent { params: &p0, wm: WmSource::Own, config: &ecfg };
    rollout_many(&agent, tasks, &[seed], WORKERS).into_iter().flatten().collect()
}

/// Reference-scale tasks and the imitation-trained model for one seed.
pub struct Pipeline {
    pub seed: u64,
    pub tasks: Vec<TaskSpec>,
    pub train: Vec<TaskSpec>,
    pub test: Vec<TaskSpec>,
    pub cfg: TrainConfig,
    pub p0: CogParams,
    pub dit: CogParams,
}

impl Pipeline {
    pub fn new(seed: u64, set: &TaskSetConfig) -> Self {
        let tasks = generate_task_set(set, seed).unwrap();
        let (train, test) = (split_of(&tasks, Split::Train), test_tasks(&tasks));
        let cfg = TrainConfig { seed, workers: WORKERS, ..Default::default() };
        let p0 = CogParams::new(seed);
        let expert = expert_rollouts(&train, seed);
        let (dit, _) = train_dit(&p0, &train, &expert, &cfg).unwrap();
        Pipeline { seed, tasks, train, test, cfg, p0, dit }
    }

    pub fn reference(seed: u64) -> Self {
        Self::new(seed, &TaskSetConfig::default())
    }
}

/// Transition samples and policy examples from untrained-model rollouts.
pub fn training_data(seed: u64, variant: WmVariant) -> (Vec<WmSample>, Vec<PolicyExample>) {
    let tasks = small_tasks(2, seed);
    let p = CogParams::new(seed);
    let cfg = AgentConfig::default();
    let r = rejection_sample(&Agent { params: &p, wm: WmSource::Own, config: &cfg }, &tasks, &[seed, seed + 1], 2);
    let index = TaskIndex::new(&tasks);
    let (samples, _) = wm_set(&index, &r.all, variant, &WmOptions::default());
    let mut examples = Vec::new();
    for t in &r.all {
        let task = index.get(&t.task_id).unwrap();
        for (ctx, rec) in replay_contexts(task, t).into_iter().zip(&t.records) {
            examples.push(PolicyExample { context: ctx, action: rec.action.clone(), reward: t.reward as f64 });
        }
    }
    (samples, examples)
}

pub const DIM: usize = 1 << 12;
pub const H: f64 = 1e-5;
pub const TOL: f64 = 1e-4;
/// Support coordinates sampled per check; policy gradients touch thousands.
pub const MAX_COORDS: usize = 400;

pub fn randomize(store: &mut impl WeightStore, rng: &mut ChaCha8Rng) {
    for head in Head::ALL {
        if let Some(w) = store.head_mut(head) {
            w.iter_mut().for_each(|v| *v = rng.gen_range(-0.5..0.5));
        }
    }
}

/// Norm-wise relative error between the analytic gradient and central
/// differences, over a sample of the coordinates the analytic gradient
/// touches plus a few it does not.
pub fn fd_error<S: WeightStore + Clone>(store: &S, grad: &Grad, loss: impl Fn(&S) -> f64, rng: &mut ChaCha8Rng) -> f64 {
    let mut coords: Vec<(Head, usize)> =
        grad.heads.iter().flat_map(|(h, m)| m.keys().map(move |i| (*h, *i))).collect();
    coords.shuffle(rng);
    coords.truncate(MAX_COORDS);
    for head in Head::ALL {
        if let Some(w) = store.head(head) {
            for _ in 0..5 {
                coords.push((head, rng.gen_range(0..w.len())));
            }
        }
    }
    let (mut diff, mut an, mut nu) = (0.0, 0.0, 0.0);
    let mut s = store.clone();
    for (head, i) in coords {
        let w0 = s.head(head).unwrap()[i];
        s.head_mut(head).unwrap()[i] = w0 + H;
        let up = loss(&s);
        s.head_mut(head).unwrap()[i] = w0 - H;
        let down = loss(&s);
        s.head_mut(head).unwrap()[i] = w0;
        let numeric = (up - down) / (2.0 * H);
        let analytic = grad.get(head, i);
        diff += (analytic - numeric).powi(2);
        an += analytic * analytic;
        nu += numeric * numeric;
    }
    diff.sqrt() / an.sqrt().max(nu.sqrt()).max(1e-12)
}

pub fn batch<T: Clone>(pool: &[T], n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    pool.choose_multiple(rng, n).cloned().collect()
}
