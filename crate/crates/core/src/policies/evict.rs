//! Victim selection rules.
//!
//! Every policy reduces a miss to one [`EvictRule`] applied to the current
//! [`CacheState`]. Uniform choices enumerate candidates in slot order and
//! sample an index, so results depend only on the RNG stream.

use rand::Rng;

use super::state::CacheState;
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvictRule {
    /// Least recently requested entry.
    Lru,
    /// Unmarked entry with the highest most-recent prediction.
    ArgmaxUnmarked,
    /// Any entry with the highest most-recent prediction.
    ArgmaxAny,
    RandomUnmarked,
    /// Uniform over the whole cache, marked or not.
    RandomAny,
}

/// How an LNONMARKER miss is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncomingClass {
    /// First arrival in the phase of a page not cached at the phase start.
    NonInitial,
    /// Most recently evicted (this phase) by a non-initial arrival.
    ChainSecond,
    Other,
}

/// Highest prediction wins; ties go to the smaller slot.
fn argmax_pred(candidates: impl Iterator<Item = usize>, last_pred: &[i64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for s in candidates {
        match best {
            Some(b) if last_pred[s] <= last_pred[b] => {}
            _ => best = Some(s),
        }
    }
    best
}

fn uniform(candidates: impl Iterator<Item = usize>, rng: &mut SimRng) -> Option<usize> {
    let pool: Vec<usize> = candidates.collect();
    if pool.is_empty() {
        return None;
    }
    Some(pool[rng.random_range(0..pool.len())])
}

/// Applies `rule` to the cache. `None` only when no candidate exists.
pub fn apply_rule(
    rule: EvictRule,
    state: &CacheState,
    last_pred: &[i64],
    last_use: &[usize],
    rng: &mut SimRng,
) -> Option<usize> {
    let all = state.entries().iter().copied();
    match rule {
        EvictRule::Lru => all.min_by_key(|&s| (last_use[s], s)),
        EvictRule::ArgmaxUnmarked => argmax_pred(state.unmarked(), last_pred),
        EvictRule::ArgmaxAny => argmax_pred(all, last_pred),
        EvictRule::RandomUnmarked => uniform(state.unmarked(), rng),
        EvictRule::RandomAny => uniform(all, rng),
    }
}

/// LMARKER: a clean arrival evicts the unmarked page predicted to return
/// last; a stale arrival evicts a uniformly random unmarked page.
pub fn evict_lmarker(
    state: &CacheState,
    incoming_is_clean: bool,
    last_pred: &[i64],
    rng: &mut SimRng,
) -> Option<usize> {
    apply_rule(lmarker_rule(incoming_is_clean), state, last_pred, &[], rng)
}

pub fn lmarker_rule(incoming_is_clean: bool) -> EvictRule {
    if incoming_is_clean {
        EvictRule::ArgmaxUnmarked
    } else {
        EvictRule::RandomUnmarked
    }
}

pub fn lnonmarker_rule(class: IncomingClass) -> EvictRule {
    match class {
        IncomingClass::NonInitial => EvictRule::ArgmaxUnmarked,
        IncomingClass::ChainSecond => EvictRule::RandomAny,
        IncomingClass::Other => EvictRule::RandomUnmarked,
    }
}

/// LNONMARKER victim choice. The caller tags the victim
/// [`super::state::Provenance::ChainSecond`] iff `class` is `NonInitial`.
pub fn evict_lnonmarker(
    state: &CacheState,
    class: IncomingClass,
    last_pred: &[i64],
    rng: &mut SimRng,
) -> Option<usize> {
    apply_rule(lnonmarker_rule(class), state, last_pred, &[], rng)
}

/// Predictive marker: trust predictions while the chain is shorter than
/// `threshold`, evict uniformly among unmarked pages afterwards.
pub fn evict_predictive_marker(
    state: &CacheState,
    chain_length_so_far: u64,
    threshold: u64,
    last_pred: &[i64],
    rng: &mut SimRng,
) -> Option<usize> {
    let rule = predictive_marker_rule(chain_length_so_far, threshold);
    apply_rule(rule, state, last_pred, &[], rng)
}

pub fn predictive_marker_rule(chain_length_so_far: u64, threshold: u64) -> EvictRule {
    if chain_length_so_far < threshold {
        EvictRule::ArgmaxUnmarked
    } else {
        EvictRule::RandomUnmarked
    }
}
