//! Procedural task generator.
//!
//! Each domain draws goal templates over a small random tree. A draft is kept
//! only if every goal atom is false initially, the planner solves it within
//! the step budget without ever un-satisfying an atom, and it differs from
//! every earlier task in init or evaluator. Non-opaque drafts must also be
//! solvable one satisfied atom at a time by an agent that only sees its own
//! belief state (see [`greedy_overlap_solves`]).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::action::{Token, TOKEN_ALPHABET};
use super::path::FsPath;
use super::planner::{greedy_overlap_solves, solve};
use super::state::NodeKind;
use super::task::{
    Domain, GoalAtom, InitEntry, InstrToken, Split, TaskSpec, MAX_VOCAB_PATHS, TASK_SCHEMA_VERSION,
};
use crate::error::{Error, Result};

const DIRS: [&str; 12] =
    ["docs", "src", "data", "logs", "tmp", "work", "notes", "media", "build", "home", "share", "var"];
const FILES: [&str; 12] = [
    "a.txt", "b.md", "notes.txt", "report.csv", "todo.md", "log.txt", "cfg.ini", "img.png",
    "readme.md", "data.json", "draft.txt", "list.csv",
];
const WORDS: [&str; 10] =
    ["please", "make", "sure", "then", "also", "quickly", "the", "workspace", "is", "ready"];

const ATTEMPTS_PER_TASK: usize = 200;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub domain: Domain,
    pub split: Split,
    pub count: usize,
    pub seed: u64,
    #[serde(default = "default_opaque_fraction")]
    pub opaque_fraction: f64,
}

fn default_opaque_fraction() -> f64 {
    0.25
}

impl GeneratorConfig {
    pub fn new(domain: Domain, split: Split, count: usize, seed: u64) -> Self {
        GeneratorConfig { domain, split, count, seed, opaque_fraction: default_opaque_fraction() }
    }
}

#[derive(Default)]
struct Draft {
    init: Vec<InitEntry>,
    goals: Vec<GoalAtom>,
    used: BTreeSet<String>,
}

impl Draft {
    fn fresh<'a>(&mut self, rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
        loop {
            let n = pool[rng.gen_range(0..pool.len())];
            if self.used.insert(n.to_string()) {
                return n;
            }
        }
    }

    fn dir(&mut self, p: &FsPath) {
        self.init.push(InitEntry { path: p.clone(), kind: NodeKind::Dir, content: None });
    }

    fn file(&mut self, p: &FsPath, content: Option<Token>) {
        self.init.push(InitEntry { path: p.clone(), kind: NodeKind::File, content });
    }
}

fn token(rng: &mut ChaCha8Rng) -> Token {
    Token::new(rng.gen_range(0..TOKEN_ALPHABET)).expect("in range")
}

fn other_token(rng: &mut ChaCha8Rng, not: Token) -> Token {
    loop {
        let t = token(rng);
        if t != not {
            return t;
        }
    }
}

fn root_dir(d: &mut Draft, rng: &mut ChaCha8Rng) -> FsPath {
    let p = FsPath::root().join(d.fresh(rng, &DIRS));
    d.dir(&p);
    p
}

/// One goal template from the files family, placed under `dir`.
/// One goal template from the files family, placed under `dir`. New files
/// always come with an `Exists` atom so every step of a solution satisfies
/// something the instruction names.
fn file_goal(d: &mut Draft, rng: &mut ChaCha8Rng, dir: &FsPath, src_tok: Token) {
    match rng.gen_range(0..4) {
        0 => {
            let p = dir.join(d.fresh(rng, &FILES));
            d.goals.push(GoalAtom::Exists { path: p });
        }
        1 => {
            let p = dir.join(d.fresh(rng, &FILES));
            let t = token(rng);
            d.file(&p, Some(t));
            let t2 = other_token(rng, t);
            d.goals.push(GoalAtom::Content { path: p, content: t2 });
        }
        2 => {
            let p = dir.join(d.fresh(rng, &FILES));
            d.file(&p, None);
            d.goals.push(GoalAtom::NotExists { path: p });
        }
        _ => {
            let p = dir.join(d.fresh(rng, &FILES));
            let t = if rng.gen_bool(0.5) { src_tok } else { token(rng) };
            d.goals.push(GoalAtom::Exists { path: p.clone() });
            d.goals.push(GoalAtom::Content { path: p, content: t });
        }
    }
}

fn dir_goal(d: &mut Draft, rng: &mut ChaCha8Rng) {
    match rng.gen_range(0..4) {
        0 => {
            let x = FsPath::root().join(d.fresh(rng, &DIRS));
            let y = x.join(d.fresh(rng, &DIRS));
            d.goals.push(GoalAtom::IsDir { path: x });
            d.goals.push(GoalAtom::IsDir { path: y });
        }
        1 => {
            let z = root_dir(d, rng);
            let junk = z.join(d.fresh(rng, &FILES));
            d.file(&junk, None);
            d.goals.push(GoalAtom::NotExists { path: junk });
            d.goals.push(GoalAtom::NotExists { path: z });
        }
        2 => {
            let m = root_dir(d, rng);
            let n = FsPath::root().join(d.fresh(rng, &DIRS));
            d.goals.push(GoalAtom::NotExists { path: m });
            d.goals.push(GoalAtom::IsDir { path: n });
        }
        _ => {
            let e = root_dir(d, rng);
            let sub = e.join(d.fresh(rng, &DIRS));
            d.goals.push(GoalAtom::IsDir { path: sub });
        }
    }
}

fn draft(domain: Domain, rng: &mut ChaCha8Rng) -> Draft {
    let mut d = Draft::default();
    match domain {
        Domain::Files => {
            let d1 = root_dir(&mut d, rng);
            let d2 = root_dir(&mut d, rng);
            let src = d1.join(d.fresh(rng, &FILES));
            let t = token(rng);
            d.file(&src, Some(t));
            let n = rng.gen_range(1..=2);
            for _ in 0..n {
                let dir = if rng.gen_bool(0.5) { d1.clone() } else { d2.clone() };
                file_goal(&mut d, rng, &dir, t);
            }
        }
        Domain::Dirs => {
            let n = rng.gen_range(1..=2);
            for _ in 0..n {
                dir_goal(&mut d, rng);
            }
        }
        Domain::Nav => {
            let p = root_dir(&mut d, rng);
            let target = if rng.gen_bool(0.5) {
                let q = p.join(d.fresh(rng, &DIRS));
                d.dir(&q);
                q
            } else {
                p.clone()
            };
            d.goals.push(GoalAtom::CwdIs { path: target.clone() });
            if rng.gen_bool(0.5) {
                let src = p.join(d.fresh(rng, &FILES));
                let t = token(rng);
                d.file(&src, Some(t));
                file_goal(&mut d, rng, &target, t);
            }
        }
        Domain::Archive => {
            let w = root_dir(&mut d, rng);
            let src_dir = w.join(d.fresh(rng, &DIRS));
            d.dir(&src_dir);
            let name = d.fresh(rng, &FILES);
            let src = src_dir.join(name);
            let t = token(rng);
            d.file(&src, Some(t));
            let bak = root_dir(&mut d, rng);
            let old = bak.join(d.fresh(rng, &DIRS));
            d.goals.push(GoalAtom::IsDir { path: old.clone() });
            d.goals.push(GoalAtom::Exists { path: old.join(name) });
            d.goals.push(GoalAtom::Content { path: old.join(name), content: t });
            d.goals.push(GoalAtom::NotExists { path: src });
            if rng.gen_bool(0.5) {
                d.goals.push(GoalAtom::NotExists { path: src_dir });
            }
        }
    }
    d
}

/// Adds one evaluator atom that the instruction will not mention.
fn add_hidden(d: &mut Draft, rng: &mut ChaCha8Rng) {
    let dirs: Vec<FsPath> = d
        .init
        .iter()
        .filter(|e| e.kind == NodeKind::Dir)
        .map(|e| e.path.clone())
        .collect();
    let dir = dirs.choose(rng).cloned().unwrap_or_else(FsPath::root);
    let p = dir.join(d.fresh(rng, &FILES));
    let t = token(rng);
    d.file(&p, Some(t));
    if rng.gen_bool(0.5) {
        d.goals.push(GoalAtom::NotExists { path: p });
    } else {
        let t2 = other_token(rng, t);
        d.goals.push(GoalAtom::Content { path: p, content: t2 });
    }
}

fn instruction(goals: &[GoalAtom], rng: &mut ChaCha8Rng) -> Vec<InstrToken> {
    let mut out = Vec::new();
    for g in goals {
        for _ in 0..rng.gen_range(0..=2) {
            out.push(InstrToken::Word(WORDS.choose(rng).expect("non-empty").to_string()));
        }
        out.push(InstrToken::Goal(g.clone()));
    }
    out
}

fn stream_seed(cfg: &GeneratorConfig) -> u64 {
    let tag = (cfg.domain as u64) << 8 | cfg.split as u64;
    cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ tag.wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// Generates `cfg.count` distinct, planner-solvable tasks.
pub fn generate_tasks(cfg: &GeneratorConfig) -> Result<Vec<TaskSpec>> {
    if cfg.domain == Domain::Archive && cfg.split == Split::Train {
        return Err(Error::HeldOutDomain(cfg.split.as_str().into()));
    }
    if !(0.0..=1.0).contains(&cfg.opaque_fraction) {
        return Err(Error::Config(format!("opaque_fraction {} outside [0, 1]", cfg.opaque_fraction)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg));
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(cfg.count);
    let mut attempts = 0;
    // Opaque slots are spread evenly so any prefix has roughly the target fraction.
    let opaque_at = |i: usize| {
        let f = cfg.opaque_fraction;
        ((i + 1) as f64 * f).floor() > (i as f64 * f).floor()
    };
    while out.len() < cfg.count {
        attempts += 1;
        if attempts > ATTEMPTS_PER_TASK * cfg.count.max(1) {
            return Err(Error::InvalidTask(format!(
                "could not draw {} distinct {} tasks",
                cfg.count,
                cfg.domain.as_str()
            )));
        }
        let opaque = opaque_at(out.len());
        let mut d = draft(cfg.domain, &mut rng);
        let rendered = d.goals.clone();
        if opaque {
            add_hidden(&mut d, &mut rng);
        }
        let paths: BTreeSet<&FsPath> =
            d.init.iter().map(|e| &e.path).chain(d.goals.iter().map(|g| g.path())).collect();
        if paths.len() > MAX_VOCAB_PATHS {
            continue;
        }
        let task = TaskSpec {
            schema_version: TASK_SCHEMA_VERSION,
            id: format!("{}-{}-s{}-{:03}", cfg.domain.as_str(), cfg.split.as_str(), cfg.seed, out.len()),
            domain: cfg.domain,
            split: cfg.split,
            instruction: instruction(&rendered, &mut rng),
            init: d.init.clone(),
            evaluator: d.goals.clone(),
            opaque,
        };
        let Ok(state) = task.initial_state() else { continue };
        if task.validate().is_err() || task.evaluator.iter().any(|g| g.holds(&state)) {
            continue;
        }
        let mut key_goals = task.evaluator.clone();
        key_goals.sort();
        let mut key_init = task.init.clone();
        key_init.sort();
        if seen.contains(&(key_init.clone(), key_goals.clone())) {
            continue;
        }
        let run = solve(&task);
        if !run.solved || !run.monotone || (!opaque && !greedy_overlap_solves(&task)) {
            continue;
        }
        seen.insert((key_init, key_goals));
        out.push(task);
    }
    Ok(out)
}
