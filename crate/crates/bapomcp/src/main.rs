use std::path::PathBuf;
use std::process::ExitCode;

use bapomcp::output::{write_records, write_stats};
use bapomcp::verify::{run_suite, SuiteConfig};
use bapomcp::{aggregate_stats, run_learning, ConfigError, ExperimentConfig};
use clap::{Args, Parser, Subcommand};

const EXIT_CONFIG: u8 = 2;
const EXIT_DEPRIVED: u8 = 3;

#[derive(Parser)]
#[command(name = "bapomcp", version, about = "Bayes-adaptive POMCP experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run learning episodes and write per-episode records and statistics.
    Run(RunArgs),
    /// Check sampled quantities against exact references.
    Verify(VerifyArgs),
}

/// Every flag overrides the same key from `--config`.
#[derive(Args)]
struct RunArgs {
    /// Flat key=value file read before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// tiger, sysadmin or chain.
    #[arg(long)]
    domain: Option<String>,
    /// POSysadmin computers.
    #[arg(long)]
    n: Option<String>,
    /// POSysadmin failure probability.
    #[arg(long)]
    f: Option<String>,
    /// POSysadmin prior: noisy or accurate.
    #[arg(long)]
    prior: Option<String>,
    /// pomcp or lookahead.
    #[arg(long)]
    planner: Option<String>,
    /// Any of r, e, l, or "plain".
    #[arg(long)]
    variants: Option<String>,
    #[arg(long)]
    sims: Option<String>,
    #[arg(long)]
    particles: Option<String>,
    #[arg(long)]
    episodes: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// UCB constant; defaults to horizon times the reward range.
    #[arg(long)]
    exploration: Option<String>,
    /// Linking-state merge threshold.
    #[arg(long)]
    lambda: Option<String>,
    /// Lookahead depth.
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Seconds per action above which an episode is flagged as capped.
    #[arg(long)]
    time_cap: Option<String>,
    /// Records CSV.
    #[arg(long)]
    out: Option<String>,
    /// Stats CSV; defaults to <out>.stats.csv.
    #[arg(long)]
    stats: Option<String>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    workers: Option<String>,
    /// Accept POSysadmin networks up to 10 computers.
    #[arg(long)]
    allow_large: bool,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let fields: [(&'static str, &Option<String>); 20] = [
            ("domain", &self.domain),
            ("n", &self.n),
            ("f", &self.f),
            ("prior", &self.prior),
            ("planner", &self.planner),
            ("variants", &self.variants),
            ("sims", &self.sims),
            ("particles", &self.particles),
            ("episodes", &self.episodes),
            ("runs", &self.runs),
            ("horizon", &self.horizon),
            ("gamma", &self.gamma),
            ("exploration", &self.exploration),
            ("lambda", &self.lambda),
            ("depth", &self.depth),
            ("seed", &self.seed),
            ("time-cap", &self.time_cap),
            ("out", &self.out),
            ("stats", &self.stats),
            ("workers", &self.workers),
        ];
        let mut out: Vec<_> = fields
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect();
        if self.allow_large {
            out.push(("allow-large", "true"));
        }
        out
    }

    fn config(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        for (k, v) in self.overrides() {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Simulations and particles per sampled check.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

fn run(args: &RunArgs) -> ExitCode {
    let cfg = match args.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    eprintln!(
        "{} on {} ({} runs x {} episodes, {} sims, {} particles)",
        match cfg.planner {
            bapomcp::PlannerKind::Pomcp => cfg.variants.to_string(),
            bapomcp::PlannerKind::Lookahead => format!("lookahead depth {}", cfg.depth),
        },
        cfg.domain,
        cfg.runs,
        cfg.episodes,
        cfg.sims,
        cfg.particles
    );
    let result = run_learning(&cfg);
    for (run, e) in &result.aborted {
        eprintln!("run {run} stopped: {e}");
    }
    let stats = aggregate_stats(&result.records).unwrap_or_default();
    match &cfg.out {
        Some(path) => {
            let written = write_records(path, &result.records).and_then(|()| match cfg.stats_path() {
                Some(sp) => write_stats(&sp, &stats),
                None => Ok(()),
            });
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
        None => {
            println!("episode,mean_return,ci95_lo,ci95_hi,n");
            for s in &stats {
                println!("{},{},{},{},{}", s.episode, s.mean_return, s.ci95_lo, s.ci95_hi, s.n);
            }
        }
    }
    if result.deprived() {
        return ExitCode::from(EXIT_DEPRIVED);
    }
    if !result.aborted.is_empty() {
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

fn verify(args: &VerifyArgs) -> ExitCode {
    let cfg = SuiteConfig {
        seed: args.seed,
        samples: args.samples,
        ..SuiteConfig::default()
    };
    match run_suite(&cfg) {
        Ok(checks) => {
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} passed, {failed} failed", checks.len() - failed);
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run(args) => run(args),
        Command::Verify(args) => verify(args),
    }
}
