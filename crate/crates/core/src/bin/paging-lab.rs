use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use paging_lab::bench::generate::generate;
use paging_lab::bench::run::{write_lower_bound, write_results, write_sweep, write_sweep_plot};
use paging_lab::bench::verify::{run_all, write_verify};
use paging_lab::bench::{
    lower_bound_experiment, run_experiment, sweep_eta, ExperimentConfig, RunOptions, VerifySizes,
};

#[derive(Parser)]
#[command(
    name = "paging-lab",
    version,
    about = "Caching policies with next-arrival predictions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Output path; overrides `output` in the config. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Added to every seed in the config.
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    /// Worker threads; overrides `jobs` in the config.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write workload instances as trace files into a directory.
    Generate {
        #[command(flatten)]
        common: Common,
    },
    /// Simulate every policy on every instance and emit one CSV row per run.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Fill the runtime_ms column (makes output run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Run the noise grid and emit rows with reference bounds.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Also write mean (eta/opt, ratio) points per policy.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Mean misses per (t, policy) on omega instances against the floor.
    Lowerbound {
        #[command(flatten)]
        common: Common,
    },
    /// Run the property suites and emit one pass/fail row per suite.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        /// Smaller case counts for a fast smoke run.
        #[arg(long)]
        quick: bool,
    },
}

fn load(common: &Common) -> Result<(ExperimentConfig, RunOptions, Option<PathBuf>)> {
    let mut cfg = ExperimentConfig::from_file(&common.config)
        .with_context(|| format!("reading config {}", common.config.display()))?;
    cfg.offset_seeds(common.seed_base);
    let jobs = common.jobs.or(cfg.jobs);
    if jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }
    let out = common.out.clone().or_else(|| cfg.output.clone());
    Ok((
        cfg,
        RunOptions {
            jobs,
            timing: false,
        },
        out,
    ))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate { common } => {
            let (cfg, _, out) = load(&common)?;
            let dir = out.context("generate needs --out DIR")?;
            for path in generate(&cfg, &dir)? {
                println!("{}", path.display());
            }
        }
        Command::Simulate { common, timing } => {
            let (cfg, mut opts, out) = load(&common)?;
            opts.timing = timing;
            let rows = run_experiment(&cfg, opts)?;
            let mut w = sink(out.as_deref())?;
            write_results(&rows, &mut w)?;
            w.flush()?;
        }
        Command::Sweep { common, plot } => {
            let (cfg, opts, out) = load(&common)?;
            let rows = sweep_eta(&cfg, opts)?;
            let mut w = sink(out.as_deref())?;
            write_sweep(&rows, &mut w)?;
            w.flush()?;
            if let Some(p) = plot {
                let mut w = sink(Some(&p))?;
                write_sweep_plot(&rows, &mut w)?;
                w.flush()?;
            }
        }
        Command::Lowerbound { common } => {
            let (cfg, opts, out) = load(&common)?;
            let rows = lower_bound_experiment(&cfg, opts)?;
            let mut w = sink(out.as_deref())?;
            write_lower_bound(&rows, &mut w)?;
            w.flush()?;
            if rows.iter().any(|r| !r.pass) {
                eprintln!("lower bound floor not reached for some (t, policy)");
            }
        }
        Command::Verify {
            out,
            seed_base,
            quick,
        } => {
            let sizes = if quick {
                VerifySizes {
                    belady_random: 500,
                    sandwich: 300,
                    inversion_fuzz: 2_000,
                    geom_trials: 1_000,
                    lemma_runs: 500,
                }
            } else {
                VerifySizes::default()
            };
            let results = run_all(sizes, seed_base)?;
            let mut w = sink(out.as_deref())?;
            write_verify(&results, &mut w)?;
            w.flush()?;
            let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
            for r in &failed {
                eprintln!(
                    "{}: {}",
                    r.suite,
                    r.example.as_deref().unwrap_or("violation")
                );
            }
            if !failed.is_empty() {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
