use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dynathink::runner::{run, Job, Overrides, RunConfig};

/// Desk-scale agents that simulate with a learned world model while they think.
#[derive(Parser)]
#[command(name = "dynathink", version)]
struct Cli {
    /// Run configuration (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; defaults to $DYNATHINK_OUT or `runs`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Rollout threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Deterministic action choice during rollouts and evaluation.
    #[arg(long, global = true)]
    greedy: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct TasksInit {
    #[arg(long)]
    tasks: PathBuf,
    /// Starting checkpoint; fresh parameters when omitted.
    #[arg(long)]
    init: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the train, in-distribution and held-out task sets.
    GenTasks,
    /// Roll out the verbose expert on the train tasks.
    ExpertRollout {
        #[arg(long)]
        tasks: PathBuf,
    },
    /// Compress expert traces to their decision-relevant segments.
    Reconstruct {
        #[arg(long)]
        trajectories: PathBuf,
    },
    /// Imitate reconstructed expert traces.
    TrainDit {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        expert: PathBuf,
    },
    /// Rejection-sampling fine-tuning (policy only).
    TrainRft(TasksInit),
    /// World-model stage, then policy stage, on the same rollouts.
    TrainDdt(TasksInit),
    /// Separate world model used as a simulated environment.
    TrainDyna(TasksInit),
    /// Iterative self-training, optionally with hinted retries.
    Iterate {
        #[command(flatten)]
        base: TasksInit,
        #[arg(long)]
        hint: bool,
    },
    /// Extra world-model data from synthetic tasks, then one policy round.
    ScaleWm(TasksInit),
    /// Roll a checkpoint out on a task file.
    Rollout {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Success, trace length, world-model accuracy and correlation.
    Eval {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// World-model accuracy of stored trajectories.
    WmAcc {
        #[arg(long)]
        trajectories: PathBuf,
    },
    /// Collect evaluation reports into one CSV table.
    Report {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}

impl Cmd {
    fn job(self) -> Job {
        match self {
            Cmd::GenTasks => Job::GenTasks,
            Cmd::ExpertRollout { tasks } => Job::ExpertRollout { tasks },
            Cmd::Reconstruct { trajectories } => Job::Reconstruct { trajectories },
            Cmd::TrainDit { tasks, expert } => Job::TrainDit { tasks, expert },
            Cmd::TrainRft(a) => Job::TrainRft { tasks: a.tasks, init: a.init },
            Cmd::TrainDdt(a) => Job::TrainDdt { tasks: a.tasks, init: a.init },
            Cmd::TrainDyna(a) => Job::TrainDyna { tasks: a.tasks, init: a.init },
            Cmd::Iterate { base, hint } => Job::Iterate { tasks: base.tasks, init: base.init, hint },
            Cmd::ScaleWm(a) => Job::ScaleWm { tasks: a.tasks, init: a.init },
            Cmd::Rollout { tasks, model } => Job::Rollout { tasks, model },
            Cmd::Eval { tasks, model } => Job::Eval { tasks, model },
            Cmd::WmAcc { trajectories } => Job::WmAcc { trajectories },
            Cmd::Report { reports } => Job::Report { reports },
        }
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim(), 2),
    };
    let overrides = Overrides { seed: cli.seed, workers: cli.workers, greedy: cli.greedy };
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
    .and_then(|c| c.resolve(&overrides));
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => return fail(e.kind(), &e.to_string(), 1),
    };
    let out = cli.out.or_else(|| std::env::var_os("DYNATHINK_OUT").map(PathBuf::from)).unwrap_or_else(|| "runs".into());
    match run(&cli.cmd.job(), &cfg, &out) {
        Ok(m) => {
            println!("{}", serde_json::to_string(&m).expect("manifest serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), &e.to_string(), 1),
    }
}
