//! Lower-bound instances: `n` phases over the universe `{1, .., k + t}`, each
//! with `t` clean and `k − t` stale pages, a random body of iid uniform draws
//! and a sorted closing copy of the phase's pages.
//!
//! Predictions carry no information about the future: a body position `i`
//! predicts `i + 1`, a closing-copy position of phase `r` predicts the last
//! time of phase `r + 1` (a virtual phase `n + 1` for the final phase).

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::opt::belady_cost;
use crate::rng::rng_from_seed;
use crate::trace::{compute_phases, l1_error, PageId, Trace};

/// `ceil(3 k ln k)`.
pub fn default_random_part_len(k: usize) -> usize {
    (3.0 * k as f64 * (k as f64).ln()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OmegaParams {
    pub k: usize,
    pub t: usize,
    pub n: usize,
    /// Length of each phase's random body; `None` means `ceil(3 k ln k)`.
    pub random_part_len: Option<usize>,
}

impl OmegaParams {
    pub fn new(k: usize, t: usize, n: usize) -> Self {
        OmegaParams {
            k,
            t,
            n,
            random_part_len: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Parameter(format!(
                "omega needs k >= 2, got {}",
                self.k
            )));
        }
        if self.t < 1 || self.t > self.k {
            return Err(Error::Parameter(format!(
                "omega needs 1 <= t <= k, got t={} k={}",
                self.t, self.k
            )));
        }
        if self.n < 1 {
            return Err(Error::Parameter("omega needs n >= 1 phases".into()));
        }
        Ok(())
    }

    pub fn random_part_len(&self) -> usize {
        self.random_part_len
            .unwrap_or_else(|| default_random_part_len(self.k))
    }
}

#[derive(Debug, Clone)]
pub struct AdversarialInstance {
    pub trace: Trace,
    pub k: usize,
    pub t: usize,
    pub n: usize,
    pub seed: u64,
    pub random_part_len: usize,
    /// `random_part_len + k`.
    pub phase_len_m: usize,
    pub clean_sets: Vec<BTreeSet<PageId>>,
    pub stale_sets: Vec<BTreeSet<PageId>>,
}

impl AdversarialInstance {
    /// Constructed `(start, end)` times of every phase.
    pub fn constructed_boundaries(&self) -> Vec<(usize, usize)> {
        let m = self.phase_len_m;
        (0..self.n).map(|r| (r * m + 1, (r + 1) * m)).collect()
    }

    /// Writes the flat `key=value` sidecar describing the instance.
    pub fn write_metadata(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "workload=omega")?;
        writeln!(out, "k={}", self.k)?;
        writeln!(out, "t={}", self.t)?;
        writeln!(out, "n={}", self.n)?;
        writeln!(out, "seed={}", self.seed)?;
        writeln!(out, "phase_len_m={}", self.phase_len_m)?;
        writeln!(out, "random_part_len={}", self.random_part_len)?;
        Ok(())
    }
}

pub fn sample_omega(k: usize, t: usize, n: usize, seed: u64) -> Result<AdversarialInstance> {
    sample_omega_with(OmegaParams::new(k, t, n), seed)
}

pub fn sample_omega_with(params: OmegaParams, seed: u64) -> Result<AdversarialInstance> {
    params.validate()?;
    let OmegaParams { k, t, n, .. } = params;
    let body = params.random_part_len();
    let m = body + k;
    let mut rng = rng_from_seed(seed);

    let mut clean_sets: Vec<BTreeSet<PageId>> = Vec::with_capacity(n);
    let mut stale_sets: Vec<BTreeSet<PageId>> = Vec::with_capacity(n);
    let mut requests = Vec::with_capacity(n * m);
    let universe: BTreeSet<PageId> = (1..=(k + t) as u64).map(PageId).collect();

    for r in 0..n {
        let (clean, stale): (BTreeSet<PageId>, BTreeSet<PageId>) = if r == 0 {
            (
                (1..=t as u64).map(PageId).collect(),
                (t as u64 + 1..=k as u64).map(PageId).collect(),
            )
        } else {
            let prev: Vec<PageId> = clean_sets[r - 1]
                .union(&stale_sets[r - 1])
                .copied()
                .collect();
            let clean = universe
                .iter()
                .filter(|p| prev.binary_search(p).is_err())
                .copied()
                .collect();
            let stale = sample(&mut rng, prev.len(), k - t)
                .into_iter()
                .map(|j| prev[j])
                .collect();
            (clean, stale)
        };
        let pool: Vec<PageId> = clean.union(&stale).copied().collect();
        debug_assert_eq!(pool.len(), k);
        requests.extend((0..body).map(|_| pool[rng.random_range(0..k)]));
        requests.extend(pool.iter().copied());
        clean_sets.push(clean);
        stale_sets.push(stale);
    }

    let predictions = omega_predictions(n, body, m);
    let trace = Trace::with_predictions(requests, predictions)?;
    Ok(AdversarialInstance {
        trace,
        k,
        t,
        n,
        seed,
        random_part_len: body,
        phase_len_m: m,
        clean_sets,
        stale_sets,
    })
}

fn omega_predictions(n: usize, body: usize, m: usize) -> Vec<i64> {
    let mut preds = Vec::with_capacity(n * m);
    for r in 0..n {
        let start = r * m;
        for j in 1..=m {
            let time = start + j;
            let h = if j <= body { time + 1 } else { (r + 2) * m };
            preds.push(h as i64);
        }
    }
    preds
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceStats {
    pub eta: u64,
    pub opt_cost: u64,
    pub eta_over_opt: f64,
}

pub fn instance_stats(inst: &AdversarialInstance) -> InstanceStats {
    let phases = compute_phases(inst.trace.requests(), inst.k);
    let eta = l1_error(&inst.trace, &phases)
        .expect("omega instances carry predictions")
        .eta;
    let opt_cost = belady_cost(&inst.trace, inst.k);
    InstanceStats {
        eta,
        opt_cost,
        eta_over_opt: eta as f64 / opt_cost as f64,
    }
}
