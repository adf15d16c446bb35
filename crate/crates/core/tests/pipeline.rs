//! Training pipeline contracts on a small task set: which heads each method
//! touches, stage order, data parity, and reproducibility across worker
//! counts.

mod common;

use common::{expert_rollouts, small_tasks, Pipeline};
use dynathink::cogmodel::{weight_hash, Checkpoint, CogParams, Head};
use dynathink::deliberation::{rollout, Agent, AgentConfig, ThinkMode, WmSource};
use dynathink::dynatrain::{
    iterate_star, policy_examples, rejection_sample, train_ddt, train_dit, train_rft, train_round, train_vanilla_dyna,
    TaskIndex, TrainConfig,
};
use dynathink::evalharness::evaluate_policy;
use dynathink::runner::TaskSetConfig;
use dynathink::traces::{reconstruct_dit, WmVariant};
use dynathink::worldsim::planner::solve;
use dynathink::worldsim::{legal_actions, InstrToken, Split};

fn small() -> Pipeline {
    let set = TaskSetConfig { train_per_domain: 12, test_id_per_domain: 6, test_ood: 6, ..Default::default() };
    Pipeline::new(2, &set)
}

fn hashes(p: &CogParams) -> Vec<String> {
    Head::ALL.iter().map(|h| weight_hash(p, *h)).collect()
}

#[test]
fn rft_changes_only_the_policy_head() {
    let pl = small();
    let (p, logs) = train_rft(&pl.dit, &pl.train, &pl.cfg).unwrap();
    let (before, after) = (hashes(&pl.dit), hashes(&p));
    assert_ne!(before[0], after[0]);
    assert_eq!(before[1..], after[1..]);
    assert!(logs[0].wm_losses.is_empty() && logs[0].wm_samples == 0);
}

#[test]
fn ddt_trains_the_world_model_first_on_the_same_rollouts_as_rft() {
    let pl = small();
    let index = TaskIndex::new(&pl.train);
    let r = rejection_sample(&Agent { params: &pl.dit, wm: WmSource::Own, config: &pl.cfg.agent }, &pl.train, &pl.cfg.rollout_seeds(0), 4);
    let mut rft = pl.dit.clone();
    let a = train_round(&mut rft, &index, &r, None, &pl.cfg, 0).unwrap();
    for v in WmVariant::ALL {
        let mut p = pl.dit.clone();
        let b = train_round(&mut p, &index, &r, Some(v), &pl.cfg, 0).unwrap();
        assert_eq!(a.parity_hash, b.parity_hash);
        assert_eq!(a.policy_examples, b.policy_examples);
        assert_eq!(b.policy_trajectories, r.successes.len());
        assert!(b.wm_versions.0 < b.wm_versions.1);
        assert_eq!(b.wm_versions.1, b.policy_versions.0);
        assert!(b.policy_versions.0 < b.policy_versions.1);
        assert!(!b.wm_losses.is_empty());
        let head = match v {
            WmVariant::NextState => Head::State,
            WmVariant::StateDelta => Head::Trans,
            WmVariant::Critique => Head::Critic,
        };
        assert_ne!(weight_hash(&p, head), weight_hash(&pl.dit, head), "{v}");
    }
}

#[test]
fn vanilla_dyna_keeps_world_knowledge_out_of_the_policy_model() {
    let pl = small();
    let r = rejection_sample(&Agent { params: &pl.dit, wm: WmSource::Own, config: &pl.cfg.agent }, &pl.train, &pl.cfg.rollout_seeds(0), 4);
    let (p, wm, report) = train_vanilla_dyna(&pl.dit, &pl.train, &r, &pl.cfg).unwrap();
    assert_eq!(hashes(&pl.dit)[1..], hashes(&p)[1..]);
    assert_ne!(weight_hash(&wm, Head::Trans), weight_hash(&CogParams::zeros(pl.dit.hash_seed, pl.dit.dim), Head::Trans));
    assert_eq!(report.parity_hash, r.parity_hash());
    assert!(report.simulated_successes <= report.simulated_runs);
}

#[test]
fn dit_leaves_contexts_and_actions_untouched_and_beats_the_untrained_agent() {
    let tasks = small_tasks(30, 4);
    let expert = expert_rollouts(&tasks, 4);
    let index = TaskIndex::new(&tasks);
    let mut reconstructed = expert.clone();
    for t in &mut reconstructed {
        t.records.iter_mut().for_each(|r| *r = reconstruct_dit(r));
    }
    assert_eq!(policy_examples(&index, &expert), policy_examples(&index, &reconstructed));

    let cfg = TrainConfig { seed: 4, workers: 4, ..Default::default() };
    let p0 = CogParams::new(4);
    let (same, _) = train_dit(&p0, &tasks, &[], &cfg).unwrap();
    assert_eq!(hashes(&same), hashes(&p0));
    let (p1, report) = train_dit(&p0, &tasks, &expert, &cfg).unwrap();
    assert!(report.steps >= 200, "{} expert steps", report.steps);
    let greedy = AgentConfig { greedy: true, ..Default::default() };
    let score = |p: &CogParams| evaluate_policy(&Agent { params: p, wm: WmSource::Own, config: &greedy }, &tasks, &[0], 4, "").0.bon("all");
    let (before, after) = (score(&p0), score(&p1));
    assert!(after > before, "{after} <= {before}");
}

#[test]
fn expert_solves_everything_and_random_play_almost_never_does() {
    let tasks = small_tasks(10, 6);
    for t in expert_rollouts(&tasks, 6) {
        assert_eq!(t.reward, 1, "{}", t.task_id);
        assert!(t.records.len() <= 30);
    }
    // Three state-changing steps before `done`, over at least 40 actions.
    let three: Vec<_> = tasks
        .iter()
        .filter(|t| solve(t).actions.len() == 4 && legal_actions(&t.vocabulary()).len() >= 40)
        .collect();
    assert!(three.len() >= 2);
    let zero = CogParams::zeros(6, 1 << 12);
    let cfg = AgentConfig::mode(ThinkMode::NoThink);
    let agent = Agent { params: &zero, wm: WmSource::Own, config: &cfg };
    let runs = 100 * three.len() as u32;
    let wins: u32 = three.iter().flat_map(|t| (0..100).map(|s| rollout(&agent, t, s).reward as u32)).sum();
    assert!(wins * 20 < runs, "{wins}/{runs} uniform-random successes");
}

#[test]
fn training_is_reproducible_across_worker_counts() {
    let pl = small();
    let run = |workers: usize| {
        let cfg = TrainConfig { workers, iterations: 2, ..pl.cfg.clone() };
        let (p, logs) = train_ddt(&pl.dit, &pl.train, WmVariant::Critique, &cfg).unwrap();
        let (q, metrics) = iterate_star(&pl.dit, &pl.train[..12], &pl.test[..6], true, &TrainConfig { iterations: 2, ..cfg.clone() }).unwrap();
        let agent_cfg = cfg.agent.clone();
        let (rep, trajs) = evaluate_policy(&Agent { params: &p, wm: WmSource::Own, config: &agent_cfg }, &pl.test, &cfg.eval_seeds(), workers, "");
        (Checkpoint::from_cog(&p).hash(), serde_json::to_string(&logs).unwrap(), Checkpoint::from_cog(&q).hash(), metrics, rep, trajs)
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(4));
    assert_eq!(Pipeline::new(2, &TaskSetConfig { train_per_domain: 12, test_id_per_domain: 6, test_ood: 6, ..Default::default() }).dit, pl.dit);
}

#[test]
fn hints_reach_only_the_rollout_not_the_training_data() {
    let pl = small();
    let opaque: Vec<_> = pl.train.iter().filter(|t| t.opaque).cloned().collect();
    assert!(!opaque.is_empty());
    for t in &opaque {
        let h = t.with_hints();
        assert!(h.has_hints() && !t.has_hints());
        assert_eq!(h.strip_hints(), *t);
        assert_eq!(h.split, Split::Train);
    }
    // Examples rebuilt from the hint-free task must not carry hint atoms.
    let index = TaskIndex::new(&opaque);
    let hinted: Vec<_> = opaque.iter().map(|t| t.with_hints()).collect();
    let agent = Agent { params: &pl.dit, wm: WmSource::Own, config: &pl.cfg.agent };
    let r = rejection_sample(&agent, &hinted, &[1, 2, 3], 4);
    assert!(!r.all.is_empty());
    for ex in policy_examples(&index, &r.all) {
        assert!(!ex.context.instruction.iter().any(|t| matches!(t, InstrToken::Hint(_))));
    }
}
