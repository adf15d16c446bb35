//! Success statistics, trace-length percentiles, world-model accuracy, and
//! correlation.

mod report;
mod stats;

pub use report::{evaluate_policy, report_from, task_set_hash, EvalReport, ReportMeta, SplitStats};
pub use stats::{effect_accuracy, length_stats, mean, nearest_rank, pearson_r, std_dev, wm_accuracy, WmAccuracy};
