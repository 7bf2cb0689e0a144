//! Experiment execution: one row per (workload instance, policy, seed).

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::math::{harmonic, harmonic_real};
use crate::opt::belady_cost;
use crate::policies::{simulate_indexed, PolicyKind, PolicySpec, SimReport, TraceIndex};
use crate::trace::{l1_error, Trace};

use super::config::ExperimentConfig;
use super::workload::{Noise, Workload};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    /// Fill `runtime_ms`. Off by default so that CSVs are reproducible byte for byte.
    pub timing: bool,
}

/// Empirical competitive ratio is `misses / opt_cost`; the additive constant is not estimated.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub workload_id: String,
    pub noise: String,
    pub policy: String,
    pub seed: u64,
    pub k: usize,
    pub misses: u64,
    pub opt_cost: u64,
    pub ratio: f64,
    pub eta: u64,
    pub eta_over_opt: f64,
    pub clean_l: u64,
    pub chains_c: u64,
    pub sum_n_star: u64,
    pub runtime_ms: Option<f64>,
}

pub const RESULT_HEADER: &str = "workload_id,policy,seed,k,misses,opt_cost,ratio,eta,eta_over_opt,clean_L,chains_C,sum_n_star,runtime_ms";

impl ResultRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{},{:.6},{},{},{},{}",
            self.workload_id,
            self.policy,
            self.seed,
            self.k,
            self.misses,
            self.opt_cost,
            self.ratio,
            self.eta,
            self.eta_over_opt,
            self.clean_l,
            self.chains_c,
            self.sum_n_star,
            self.runtime_ms
                .map(|t| format!("{t:.3}"))
                .unwrap_or_default()
        )
    }
}

pub fn write_results(rows: &[ResultRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "{RESULT_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv())?;
    }
    Ok(())
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Offline quantities of one instance, shared by every policy run on it.
#[derive(Debug, Clone)]
pub struct InstanceSummary {
    pub opt_cost: u64,
    pub clean_l: u64,
    pub eta: u64,
}

impl InstanceSummary {
    pub fn eta_over_opt(&self) -> f64 {
        self.eta as f64 / self.opt_cost as f64
    }
}

pub fn summarize(idx: &TraceIndex<'_>) -> Result<InstanceSummary> {
    let trace = idx.trace();
    if trace.is_empty() {
        return Err(Error::Parameter("empty trace".into()));
    }
    let eta = match trace.predictions() {
        Some(_) => l1_error(trace, idx.phases())?.eta,
        None => 0,
    };
    Ok(InstanceSummary {
        opt_cost: belady_cost(trace, idx.k()),
        clean_l: idx.clean_count(),
        eta,
    })
}

/// Loads file workloads once; generated ones are built per seed.
struct Prepared<'a> {
    workload: &'a Workload,
    id: String,
    fixed: Option<Trace>,
}

impl Prepared<'_> {
    fn instance(&self, k: usize, noise: Noise, seed: u64) -> Result<Trace> {
        let base = match &self.fixed {
            Some(t) => t.clone(),
            None => self.workload.instance(k, seed)?,
        };
        noise.apply(base, seed)
    }
}

fn prepare(cfg: &ExperimentConfig) -> Result<Vec<Prepared<'_>>> {
    cfg.workloads
        .iter()
        .map(|w| {
            w.validate(cfg.k)?;
            let fixed = if w.is_random() {
                None
            } else {
                Some(w.instance(cfg.k, 0)?)
            };
            Ok(Prepared {
                workload: w,
                id: w.id(cfg.k),
                fixed,
            })
        })
        .collect()
}

/// A report with its wall-clock time when timing is on.
type TimedReport = (SimReport, Option<f64>);

fn run_cell(
    trace: &Trace,
    k: usize,
    policies: &[PolicyKind],
    seed: u64,
    timing: bool,
) -> Result<(InstanceSummary, Vec<TimedReport>)> {
    let idx = TraceIndex::new(trace, k);
    let summary = summarize(&idx)?;
    let mut out = Vec::with_capacity(policies.len());
    for kind in policies {
        let start = Instant::now();
        let report = simulate_indexed(&PolicySpec::new(kind.clone(), seed), &idx)?;
        let ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
        out.push((report, ms));
    }
    Ok((summary, out))
}

/// Rows ordered by workload, noise level, policy, seed, independent of `jobs`.
fn run_grid(cfg: &ExperimentConfig, noise: &[Noise], opts: RunOptions) -> Result<Vec<ResultRow>> {
    if cfg.k == 0 {
        return Err(Error::Parameter("cache size k must be >= 1".into()));
    }
    for kind in &cfg.policies {
        kind.validate()?;
    }
    let prepared = prepare(cfg)?;
    let mut units = Vec::new();
    for (w, _) in prepared.iter().enumerate() {
        for (z, _) in noise.iter().enumerate() {
            for &seed in &cfg.seeds {
                units.push((w, z, seed));
            }
        }
    }
    let k = cfg.k;
    let cells: Vec<Result<Vec<ResultRow>>> = with_jobs(opts.jobs, || {
        units
            .par_iter()
            .map(|&(w, z, seed)| {
                let p = &prepared[w];
                let trace = p.instance(k, noise[z], seed)?;
                let (summary, reports) = run_cell(&trace, k, &cfg.policies, seed, opts.timing)?;
                Ok(reports
                    .into_iter()
                    .zip(&cfg.policies)
                    .map(|((r, ms), kind)| ResultRow {
                        workload_id: p.id.clone(),
                        noise: noise[z].label(),
                        policy: kind.to_string(),
                        seed,
                        k,
                        misses: r.misses,
                        opt_cost: summary.opt_cost,
                        ratio: r.misses as f64 / summary.opt_cost as f64,
                        eta: summary.eta,
                        eta_over_opt: summary.eta_over_opt(),
                        clean_l: summary.clean_l,
                        chains_c: r.chain_count_c,
                        sum_n_star: r.sum_n_star,
                        runtime_ms: ms,
                    })
                    .collect())
            })
            .collect()
    })?;
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;

    // cells are ordered (workload, noise, seed) with policies inside
    let seeds = cfg.seeds.len();
    let mut rows = Vec::with_capacity(cells.len() * cfg.policies.len());
    for group in cells.chunks(seeds) {
        for p in 0..cfg.policies.len() {
            rows.extend(group.iter().map(|cell| cell[p].clone()));
        }
    }
    Ok(rows)
}

/// Simulates every (workload instance, policy, seed) of `cfg`.
///
/// Omega workloads must keep their prescribed predictions; at most one noise level is allowed.
pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<ResultRow>> {
    let noise = cfg.noise_levels();
    if noise.len() > 1 {
        return Err(config_error(
            "noise",
            "a single noise level is expected; use sweep for a grid",
        ));
    }
    if noise[0] != Noise::Keep && cfg.workloads.iter().any(Workload::is_omega) {
        return Err(config_error(
            "noise",
            "omega instances come with their own predictions",
        ));
    }
    run_grid(cfg, &noise, opts)
}

fn config_error(field: &str, message: &str) -> Error {
    Error::Config {
        line: 0,
        field: field.into(),
        message: message.into(),
    }
}

/// `4 + 2 H(min(2q, k))`.
pub fn lmarker_reference(eta_over_opt: f64, k: usize) -> f64 {
    4.0 + 2.0 * harmonic_real((2.0 * eta_over_opt).min(k as f64))
}

/// `9 min(4 + 7q/k + 3(q/k) H(k), 2 H(k))`.
pub fn combiner_reference(eta_over_opt: f64, k: usize) -> f64 {
    let q = eta_over_opt / k as f64;
    let hk = harmonic(k);
    9.0 * (4.0 + 7.0 * q + 3.0 * q * hk).min(2.0 * hk)
}

pub const SWEEP_HEADER: &str =
    "workload_id,noise,policy,seed,k,misses,opt_cost,ratio,eta,eta_over_opt,ref_lmarker,ref_combiner";

/// Runs every noise level of `cfg` (replacing omega predictions too).
pub fn sweep_eta(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<ResultRow>> {
    if cfg.noise.is_empty() {
        return Err(config_error(
            "noise",
            "sweep needs at least one noise level",
        ));
    }
    run_grid(cfg, &cfg.noise, opts)
}

pub fn write_sweep(rows: &[ResultRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6},{},{:.6},{:.6},{:.6}",
            r.workload_id,
            r.noise,
            r.policy,
            r.seed,
            r.k,
            r.misses,
            r.opt_cost,
            r.ratio,
            r.eta,
            r.eta_over_opt,
            lmarker_reference(r.eta_over_opt, r.k),
            combiner_reference(r.eta_over_opt, r.k),
        )?;
    }
    Ok(())
}

/// Mean realized `eta/opt` against mean ratio, one block per (workload, policy).
pub fn write_sweep_plot(rows: &[ResultRow], mut out: impl Write) -> Result<()> {
    // (workload, policy, [(noise, sum x, sum y, count)])
    type Block = (String, String, Vec<(String, f64, f64, usize)>);
    let mut blocks: Vec<Block> = Vec::new();
    for r in rows {
        let block = match blocks
            .iter_mut()
            .find(|b| b.0 == r.workload_id && b.1 == r.policy)
        {
            Some(b) => b,
            None => {
                blocks.push((r.workload_id.clone(), r.policy.clone(), Vec::new()));
                blocks.last_mut().unwrap()
            }
        };
        match block.2.iter_mut().find(|p| p.0 == r.noise) {
            Some(p) => {
                p.1 += r.eta_over_opt;
                p.2 += r.ratio;
                p.3 += 1;
            }
            None => block.2.push((r.noise.clone(), r.eta_over_opt, r.ratio, 1)),
        }
    }
    for (i, (w, p, points)) in blocks.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        writeln!(out, "# {w} {p}")?;
        for (_, x, y, c) in points {
            writeln!(out, "{:.6} {:.6}", x / *c as f64, y / *c as f64)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundRow {
    pub k: usize,
    pub t: usize,
    pub n: usize,
    pub policy: String,
    pub seeds: usize,
    pub mean_misses: f64,
    /// `(n t / 2)(H(k) - H(t))`.
    pub floor: f64,
    pub mean_opt: f64,
    pub mean_eta_over_opt: f64,
    pub pass: bool,
}

pub const LOWER_BOUND_HEADER: &str =
    "k,t,n,policy,seeds,mean_misses,floor,mean_opt,mean_eta_over_opt,pass";

pub fn lower_bound_floor(k: usize, t: usize, n: usize) -> f64 {
    (n * t) as f64 / 2.0 * (harmonic(k) - harmonic(t))
}

/// Mean misses per (t, policy) on omega instances with their prescribed predictions.
pub fn lower_bound_experiment(
    cfg: &ExperimentConfig,
    opts: RunOptions,
) -> Result<Vec<LowerBoundRow>> {
    if !cfg.workloads.iter().all(Workload::is_omega) {
        return Err(config_error(
            "workload",
            "lowerbound runs on omega instances",
        ));
    }
    let rows = run_experiment(cfg, opts)?;
    let per_block = cfg.seeds.len();
    let mut out = Vec::new();
    let blocks = rows.chunks(per_block);
    let labels = cfg
        .workloads
        .iter()
        .flat_map(|w| cfg.policies.iter().map(move |p| (w, p)));
    for ((w, kind), block) in labels.zip(blocks) {
        let Workload::Omega { t, n, .. } = *w else {
            unreachable!()
        };
        let count = block.len() as f64;
        let mean = |f: &dyn Fn(&ResultRow) -> f64| block.iter().map(f).sum::<f64>() / count;
        let mean_misses = mean(&|r| r.misses as f64);
        let floor = lower_bound_floor(cfg.k, t, n);
        out.push(LowerBoundRow {
            k: cfg.k,
            t,
            n,
            policy: kind.to_string(),
            seeds: block.len(),
            mean_misses,
            floor,
            mean_opt: mean(&|r| r.opt_cost as f64),
            mean_eta_over_opt: mean(&|r| r.eta_over_opt),
            pass: mean_misses >= floor,
        });
    }
    Ok(out)
}

pub fn write_lower_bound(rows: &[LowerBoundRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "{LOWER_BOUND_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:.4},{:.4},{:.4},{:.4},{}",
            r.k,
            r.t,
            r.n,
            r.policy,
            r.seeds,
            r.mean_misses,
            r.floor,
            r.mean_opt,
            r.mean_eta_over_opt,
            r.pass
        )?;
    }
    Ok(())
}

/// Smallest `scaled:sigma` noise (to within 1%) whose mean realized `eta/opt`
/// over `seeds` reaches `target`. Each seed draws the same normal variates for
/// every sigma, so the realized error is monotone in sigma.
pub fn calibrate_scaled_noise(
    workload: &Workload,
    k: usize,
    target: f64,
    seeds: &[u64],
) -> Result<f64> {
    use crate::trace::NoiseModel;
    let instances = seeds
        .iter()
        .map(|&s| Ok((workload.instance(k, s)?, s)))
        .collect::<Result<Vec<_>>>()?;
    let opts: Vec<u64> = instances.iter().map(|(t, _)| belady_cost(t, k)).collect();
    let measure = |sigma: f64| -> Result<f64> {
        let mut total = 0.0;
        for ((trace, seed), &opt) in instances.iter().zip(&opts) {
            let noisy = Noise::Model(NoiseModel::Scaled { sigma }).apply(trace.clone(), *seed)?;
            let phases = crate::trace::compute_phases(noisy.requests(), k);
            total += l1_error(&noisy, &phases)?.eta as f64 / opt as f64;
        }
        Ok(total / instances.len() as f64)
    };
    let mut hi = 1.0;
    while measure(hi)? < target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Parameter(format!(
                "eta/opt target {target} unreachable"
            )));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 0.01 * hi {
        let mid = 0.5 * (lo + hi);
        if measure(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
