//! One cache driven request by request, with chain instrumentation.
//!
//! Chains: a miss on a page evicted earlier in the same phase joins the chain
//! of the miss that evicted it; any other miss is a non-initial arrival and
//! opens a new chain. Every miss belongs to exactly one chain.

use super::evict::{apply_rule, EvictRule};
use super::index::TraceIndex;
use super::state::{CacheState, Provenance};
use super::{ChainRecord, SimReport};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};

/// What a policy may inspect when deciding a miss.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MissInfo {
    /// Non-initial arrival, i.e. the head of a new chain.
    pub head: bool,
    pub clean: bool,
    /// Misses already attributed to this miss's chain.
    pub chain_len_so_far: u64,
    pub provenance: Provenance,
}

pub(crate) enum Choice {
    Rule(EvictRule),
    Forced(usize),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepOutcome {
    pub victim: Option<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Runner {
    pub state: CacheState,
    pub last_pred: Vec<i64>,
    pub last_use: Vec<usize>,
    pub rng: SimRng,
    /// `(phase + 1, chain)` of the most recent eviction of each slot.
    evicted_by: Vec<(usize, usize)>,
    chains: Vec<ChainRecord>,
    per_phase_misses: Vec<u64>,
    misses: u64,
    chain_count: u64,
    sum_n_star: u64,
    marked_evictions: u64,
    /// Whether misses must evict unmarked pages only.
    marker: bool,
}

impl Runner {
    pub fn new(idx: &TraceIndex<'_>, seed: u64, marker: bool) -> Self {
        let u = idx.trace.universe_len();
        Runner {
            state: CacheState::new(idx.k, u),
            last_pred: vec![0; u],
            last_use: vec![0; u],
            rng: rng_from_seed(seed),
            evicted_by: vec![(0, 0); u],
            chains: Vec::new(),
            per_phase_misses: vec![0; idx.phases.len()],
            misses: 0,
            chain_count: 0,
            sum_n_star: 0,
            marked_evictions: 0,
            marker,
        }
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }

    /// Serves request `i` (0-based). `decide` is consulted only on a miss
    /// with a full cache.
    pub fn step(
        &mut self,
        idx: &TraceIndex<'_>,
        i: usize,
        decide: impl FnOnce(&MissInfo, &CacheState) -> Choice,
    ) -> Result<StepOutcome> {
        if idx.opens_phase[i] {
            self.state.begin_phase();
        }
        let s = idx.trace.slots()[i];
        let pred = idx.trace.predictions().map_or(0, |p| p[i]);
        let mut victim = None;

        if self.state.contains(s) {
            self.state.mark(s);
        } else {
            let r = idx.phase_of[i];
            let head = idx.first_arrival[i] && !self.state.is_initial(s);
            let chain = if head {
                self.chains.push(ChainRecord {
                    phase_index: r,
                    head_time: i + 1,
                    length: 0,
                    n_star: 0,
                });
                self.chain_count += 1;
                self.chains.len() - 1
            } else {
                match self.evicted_by[s] {
                    (stamp, c) if stamp == r + 1 => c,
                    _ => {
                        return Err(Error::Invariant(format!(
                            "miss at time {} on an initial page not evicted this phase",
                            i + 1
                        )))
                    }
                }
            };
            let info = MissInfo {
                head,
                clean: idx.clean[i],
                chain_len_so_far: self.chains[chain].length,
                provenance: self.state.provenance(s),
            };
            self.chains[chain].length += 1;

            if self.state.is_full() {
                let v = match decide(&info, &self.state) {
                    Choice::Forced(v) => v,
                    Choice::Rule(rule) => apply_rule(
                        rule,
                        &self.state,
                        &self.last_pred,
                        &self.last_use,
                        &mut self.rng,
                    )
                    .ok_or_else(|| {
                        Error::Invariant(format!("no unmarked page at the miss at time {}", i + 1))
                    })?,
                };
                if self.state.is_marked(v) {
                    if self.marker {
                        return Err(Error::Invariant(format!(
                            "marker policy evicted a marked page at time {}",
                            i + 1
                        )));
                    }
                    self.marked_evictions += 1;
                }
                self.state.remove(v);
                let tag = if head {
                    Provenance::ChainSecond
                } else {
                    Provenance::Other
                };
                self.state.set_provenance(v, tag);
                self.evicted_by[v] = (r + 1, chain);
                if head {
                    let n_star = self.n_star(idx, i, v);
                    self.chains[chain].n_star = n_star;
                    self.sum_n_star += n_star;
                }
                victim = Some(v);
            }

            self.state.insert(s);
            self.state.mark(s);
            self.misses += 1;
            self.per_phase_misses[r] += 1;
        }

        self.last_pred[s] = pred;
        self.last_use[s] = i;
        Ok(StepOutcome { victim })
    }

    /// Distinct pages (other than `e`) requested after `e` reappears in the
    /// phase of time `i`; zero if it does not reappear.
    fn n_star(&self, idx: &TraceIndex<'_>, i: usize, e: usize) -> u64 {
        let next = idx.trace.true_next();
        let end = idx.phase_end(i);
        let back = next[self.last_use[e]];
        if back > end {
            return 0;
        }
        let p = back - 1;
        let again = u32::from(next[p] <= end);
        u64::from(idx.suffix_distinct[p] - again)
    }

    pub fn into_report(self, idx: &TraceIndex<'_>) -> SimReport {
        SimReport {
            misses: self.misses,
            per_phase_misses: self.per_phase_misses,
            chains: self.chains,
            chain_count_c: self.chain_count,
            clean_count_l: idx.clean_count,
            sum_n_star: self.sum_n_star,
            marked_evictions: self.marked_evictions,
            combiner: None,
        }
    }
}
