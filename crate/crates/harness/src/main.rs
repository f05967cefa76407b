use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rcsm_core::model::{IndexVector, SystemDims};
use rcsm_harness::config::{config_file_args, DetectorKind, ExperimentConfig, Sweep};
use rcsm_harness::report::{self, write_csv};
use rcsm_harness::sweep;

/// Monte Carlo simulator for RCSM antenna-index detection.
#[derive(Parser)]
#[command(name = "rcsm", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulated error rates, one CSV row per sweep value.
    Sweep(Common),
    /// Single-threaded detector timing (cavi or ml-ga).
    Bench(Common),
    /// Large-system analytic index-error curve; no simulation.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Interferer count used by the analysis (defaults to K).
        #[arg(long)]
        q: Option<usize>,
    },
    /// Per-iteration CAVI posteriors for each trial.
    Convergence(Common),
}

#[derive(Args)]
struct Common {
    /// Receive antennas.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Transmit antennas.
    #[arg(long, default_value_t = 20)]
    l: usize,
    /// Active antennas.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Symbol vectors per slot.
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// QAM order (4, 16 or 64).
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, default_value = "cavi")]
    detector: DetectorKind,
    /// CAVI step size.
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    /// CAVI sweeps.
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Parameter sweep, e.g. `snr_db=0,5,10`.
    #[arg(long)]
    sweep: Option<Sweep>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Draw supports from all C(L, K) subsets, not just the addressable ones.
    #[arg(long)]
    all_subsets: bool,
    /// Fixed 1-based support used in every trial, e.g. `2,6,10`.
    #[arg(long, value_delimiter = ',')]
    support: Option<Vec<usize>>,
    /// Write zeros in the runtime columns so output is reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value file of defaults; flags on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn experiment(&self) -> Result<ExperimentConfig> {
        let dims = SystemDims::new(self.l, self.n, self.k, self.m)?;
        let fixed_support = match &self.support {
            Some(s) => Some(IndexVector::from_one_based(self.l, s)?),
            None => None,
        };
        let threads = self
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let cfg = ExperimentConfig {
            dims,
            snr_db: self.snr_db,
            order: self.order,
            detector: self.detector,
            step_size: self.mu,
            iterations: self.iters,
            trials: self.trials,
            seed: self.seed,
            sweep: self.sweep.clone(),
            all_subsets: self.all_subsets,
            fixed_support,
            threads: threads.max(1),
            timing: !self.no_timing,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Splices the contents of `--config <file>` in right after the
/// subcommand, so anything given on the command line overrides it.
fn expand_config(mut argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    if let (Some(path), true) = (path, argv.len() >= 2) {
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading config file {path}"))?;
        let extra = config_file_args(&text)?;
        argv.splice(2..2, extra);
    }
    Ok(argv)
}

fn write_out<T: serde::Serialize>(
    rows: &[T],
    out: Option<&Path>,
    to_file: impl FnOnce(&[T], &Path) -> rcsm_harness::Result<()>,
    header: &[&str],
) -> Result<()> {
    match out {
        Some(path) => to_file(rows, path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(rows, header, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let argv = expand_config(std::env::args().collect())?;
    let cli = Cli::parse_from(argv);
    match cli.command {
        Command::Sweep(c) => {
            let rows = sweep::run_sweep(&c.experiment()?)?;
            write_out(&rows, c.out.as_deref(), report::emit_csv, &report::SWEEP_COLUMNS)
        }
        Command::Bench(c) => {
            let rows = sweep::run_bench(&c.experiment()?)?;
            write_out(&rows, c.out.as_deref(), report::emit_csv, &report::SWEEP_COLUMNS)
        }
        Command::Analyze { common: c, q } => {
            let rows = sweep::analyze(&c.experiment()?, q)?;
            write_out(
                &rows,
                c.out.as_deref(),
                report::emit_analytic_csv,
                &report::ANALYTIC_COLUMNS,
            )
        }
        Command::Convergence(c) => {
            let rows = sweep::convergence(&c.experiment()?)?;
            write_out(
                &rows,
                c.out.as_deref(),
                report::emit_convergence_csv,
                &report::CONVERGENCE_COLUMNS,
            )
        }
    }
}
