//! Policy evaluation over repeated runs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::stats::{length_stats, pearson_r, std_dev, wm_accuracy};
use crate::deliberation::{rollout_many, Agent};
use crate::traces::Trajectory;
use crate::worldsim::{Split, TaskSpec};

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SplitStats {
    pub tasks: usize,
    /// Mean over runs of the per-run success fraction.
    pub avg: f64,
    pub std: f64,
    /// Fraction of tasks solved in at least one run.
    pub bon: f64,
    pub run_success: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportMeta {
    pub checkpoint_hash: String,
    pub task_set_hash: String,
    pub seeds: Vec<u64>,
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    /// Keyed by "all" and by split name.
    pub splits: BTreeMap<String, SplitStats>,
    pub length_p10: u32,
    pub length_p90: u32,
    pub wm_accuracy: f64,
    pub wm_no_simulation: usize,
    /// `None` when the correlation is undefined.
    pub pearson_r: Option<f64>,
    pub meta: ReportMeta,
}

pub fn task_set_hash(tasks: &[TaskSpec]) -> String {
    let mut h = Sha256::new();
    for t in tasks {
        h.update(serde_json::to_vec(t).expect("task serializes"));
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

fn split_stats(success: &[Vec<u8>]) -> SplitStats {
    let runs = success.first().map_or(0, Vec::len);
    let n = success.len();
    let run_success: Vec<f64> = (0..runs)
        .map(|r| success.iter().map(|s| s[r] as f64).sum::<f64>() / n as f64)
        .collect();
    let bon = success.iter().filter(|s| s.contains(&1)).count() as f64 / n as f64;
    // One division over the total count: averaging the per-run fractions can
    // land an ulp above `bon` when every run solves the same tasks.
    let total: usize = success.iter().map(|s| s.iter().map(|x| *x as usize).sum::<usize>()).sum();
    let avg = if runs == 0 { 0.0 } else { total as f64 / (n * runs) as f64 };
    SplitStats { tasks: n, avg, std: std_dev(&run_success), bon, run_success }
}

/// Builds a report from `trajectories[task][run]`.
pub fn report_from(tasks: &[TaskSpec], trajectories: &[Vec<Trajectory>], meta: ReportMeta) -> EvalReport {
    let success: Vec<Vec<u8>> = trajectories.iter().map(|runs| runs.iter().map(|t| t.reward).collect()).collect();
    let mut splits = BTreeMap::new();
    if !tasks.is_empty() {
        splits.insert("all".to_string(), split_stats(&success));
    }
    for split in [Split::Train, Split::TestId, Split::TestOod] {
        let sel: Vec<Vec<u8>> =
            tasks.iter().zip(&success).filter(|(t, _)| t.split == split).map(|(_, s)| s.clone()).collect();
        if !sel.is_empty() {
            splits.insert(split.as_str().to_string(), split_stats(&sel));
        }
    }
    let flat: Vec<Trajectory> = trajectories.iter().flatten().cloned().collect();
    let (p10, p90) = length_stats(&flat).unwrap_or((0, 0));
    let wm = wm_accuracy(&flat);
    let (xs, ys): (Vec<f64>, Vec<f64>) = tasks
        .iter()
        .zip(&success)
        .filter_map(|(t, s)| {
            let acc = *wm.per_task.get(&t.id)?;
            Some((acc, s.iter().map(|v| *v as f64).sum::<f64>() / s.len() as f64))
        })
        .unzip();
    EvalReport {
        splits,
        length_p10: p10,
        length_p90: p90,
        wm_accuracy: wm.acc,
        wm_no_simulation: wm.no_simulation,
        pearson_r: pearson_r(&xs, &ys).ok(),
        meta,
    }
}

/// Runs every task once per seed and summarizes. Returns the trajectories
/// too, indexed `[task][run]`.
pub fn evaluate_policy(
    agent: &Agent<'_>,
    tasks: &[TaskSpec],
    seeds: &[u64],
    workers: usize,
    checkpoint_hash: &str,
) -> (EvalReport, Vec<Vec<Trajectory>>) {
    let trajs = rollout_many(agent, tasks, seeds, workers);
    let meta = ReportMeta {
        checkpoint_hash: checkpoint_hash.to_string(),
        task_set_hash: task_set_hash(tasks),
        seeds: seeds.to_vec(),
        runs: seeds.len(),
    };
    (report_from(tasks, &trajs, meta), trajs)
}

impl EvalReport {
    pub fn bon(&self, split: &str) -> f64 {
        self.splits.get(split).map_or(0.0, |s| s.bon)
    }

    pub fn avg(&self, split: &str) -> f64 {
        self.splits.get(split).map_or(0.0, |s| s.avg)
    }

    pub const CSV_HEADER: &'static str = "checkpoint,task_set,runs,all_avg,all_std,all_bon,train_avg,train_bon,\
id_avg,id_bon,ood_avg,ood_bon,len_p10,len_p90,wm_accuracy,wm_no_simulation,pearson_r";

    /// One flat CSV row; missing splits and undefined correlation are empty.
    pub fn csv_row(&self) -> String {
        let f = |split: &str, bon: bool| {
            self.splits
                .get(split)
                .map(|s| format!("{:.6}", if bon { s.bon } else { s.avg }))
                .unwrap_or_default()
        };
        let all_std = self.splits.get("all").map(|s| format!("{:.6}", s.std)).unwrap_or_default();
        [
            self.meta.checkpoint_hash.clone(),
            self.meta.task_set_hash.clone(),
            self.meta.runs.to_string(),
            f("all", false),
            all_std,
            f("all", true),
            f("train", false),
            f("train", true),
            f("test-id", false),
            f("test-id", true),
            f("test-ood", false),
            f("test-ood", true),
            self.length_p10.to_string(),
            self.length_p90.to_string(),
            format!("{:.6}", self.wm_accuracy),
            self.wm_no_simulation.to_string(),
            self.pearson_r.map(|r| format!("{r:.6}")).unwrap_or_default(),
        ]
        .join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn avg_and_bon_arithmetic() {
        let s = split_stats(&[vec![0, 1, 0]]);
        assert!((s.avg - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.bon, 1.0);
        let s = split_stats(&[vec![1, 0, 0], vec![0, 0, 0]]);
        assert!((s.avg - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(s.bon, 0.5);
        let s = split_stats(&[vec![1, 1, 1], vec![0, 0, 0]]);
        assert_eq!(s.avg, s.bon);
    }

    #[test]
    fn identical_runs_give_avg_equal_to_bon() {
        for n in 1..150 {
            for k in 0..=n {
                let grid: Vec<Vec<u8>> = (0..n).map(|i| vec![(i < k) as u8; 3]).collect();
                let s = split_stats(&grid);
                assert_eq!(s.avg, s.bon, "{k}/{n}");
            }
        }
    }
}
