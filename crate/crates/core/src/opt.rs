//! Offline optimum (furthest-in-future eviction), an exhaustive oracle for
//! small instances, and the clean-page count `L`.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::trace::{compute_phases, PhaseDecomposition, Trace};

/// Offline optimal cost together with the clean count, `L/2 <= opt <= L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptReport {
    pub opt_cost: u64,
    pub clean_count: u64,
}

pub fn opt_report(trace: &Trace, k: usize) -> OptReport {
    OptReport {
        opt_cost: belady_cost(trace, k),
        clean_count: count_clean(trace, k),
    }
}

/// Misses of Belady's rule: on a miss with a full cache, evict the cached
/// page whose next request is furthest away. Pages that never reappear tie at
/// `n + 1`; the smaller page id is evicted.
pub fn belady_cost(trace: &Trace, k: usize) -> u64 {
    assert!(k >= 1, "cache size must be positive");
    let slots = trace.slots();
    let next = trace.true_next();
    // Keyed by (next use, reversed slot) so the last element is the victim.
    let mut by_next: BTreeSet<(usize, std::cmp::Reverse<usize>)> = BTreeSet::new();
    let mut cached_next: Vec<Option<usize>> = vec![None; trace.universe_len()];
    let mut misses = 0;
    for (i, &s) in slots.iter().enumerate() {
        match cached_next[s] {
            Some(old) => {
                by_next.remove(&(old, std::cmp::Reverse(s)));
            }
            None => {
                misses += 1;
                if by_next.len() == k {
                    let (_, std::cmp::Reverse(victim)) =
                        by_next.pop_last().expect("full cache is non-empty");
                    cached_next[victim] = None;
                }
            }
        }
        cached_next[s] = Some(next[i]);
        by_next.insert((next[i], std::cmp::Reverse(s)));
    }
    misses
}

pub const BRUTE_FORCE_MAX_LEN: usize = 14;
pub const BRUTE_FORCE_MAX_PAGES: usize = 6;
pub const BRUTE_FORCE_MAX_K: usize = 4;

/// Exact offline optimum by dynamic programming over every reachable cache
/// content. Independent of [`belady_cost`]: it never looks at next arrivals.
///
/// Every legal move is explored, including evicting while free slots remain.
pub fn brute_force_opt(trace: &Trace, k: usize) -> Result<u64> {
    let n = trace.len();
    let u = trace.universe_len();
    if n > BRUTE_FORCE_MAX_LEN || u > BRUTE_FORCE_MAX_PAGES || k > BRUTE_FORCE_MAX_K || k == 0 {
        return Err(Error::InstanceTooLarge(format!(
            "n={n} (max {BRUTE_FORCE_MAX_LEN}), pages={u} (max {BRUTE_FORCE_MAX_PAGES}), \
             k={k} (1..={BRUTE_FORCE_MAX_K})"
        )));
    }
    let mut states: HashMap<u32, u64> = HashMap::from([(0, 0)]);
    for &s in trace.slots() {
        let bit = 1u32 << s;
        let mut next: HashMap<u32, u64> = HashMap::new();
        let mut relax = |mask: u32, cost: u64| {
            next.entry(mask)
                .and_modify(|c| *c = (*c).min(cost))
                .or_insert(cost);
        };
        for (&mask, &cost) in &states {
            if mask & bit != 0 {
                relax(mask, cost);
                continue;
            }
            let size = mask.count_ones() as usize;
            if size < k {
                relax(mask | bit, cost + 1);
            }
            let mut rest = mask;
            while rest != 0 {
                let victim = rest & rest.wrapping_neg();
                rest ^= victim;
                relax((mask ^ victim) | bit, cost + 1);
            }
        }
        states = next;
    }
    Ok(states.values().copied().min().unwrap_or(0))
}

/// `L`: clean arrivals summed over phases (pages of phase `r` absent from
/// phase `r - 1`; every page of the first phase is clean).
pub fn count_clean(trace: &Trace, k: usize) -> u64 {
    clean_count_from_phases(&compute_phases(trace.requests(), k))
}

pub fn clean_count_from_phases(phases: &PhaseDecomposition) -> u64 {
    let mut total = 0;
    let empty = BTreeSet::new();
    for (r, set) in phases.distinct_per_phase.iter().enumerate() {
        let prev = if r == 0 {
            &empty
        } else {
            &phases.distinct_per_phase[r - 1]
        };
        total += set.difference(prev).count() as u64;
    }
    total
}
