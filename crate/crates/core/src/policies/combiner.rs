//! Black-box combination of two policies.
//!
//! Both policies run as shadow simulations. The physical cache follows the
//! one with fewer shadow misses and switches when the followed shadow has
//! more than `gamma` times the other's misses. Switching never flushes the
//! physical cache: on a physical miss it evicts the followed shadow's victim
//! if that page is physically present, and otherwise applies the followed
//! policy's own rule to the physical cache.

use super::engine::{Choice, Runner};
use super::index::TraceIndex;
use super::{PolicyKind, PolicySpec, SimReport};
use crate::error::{Error, Result};
use crate::rng::{child_seed, splitmix64};
use crate::trace::Trace;

pub const DEFAULT_GAMMA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CombinerStats {
    pub shadow_misses: [u64; 2],
    pub switches_a_to_b: u64,
    pub switches_b_to_a: u64,
}

/// Combines `a` and `b` (each with its own seed); reported misses are physical.
pub fn simulate_combiner(
    a: &PolicySpec,
    b: &PolicySpec,
    gamma: f64,
    trace: &Trace,
    k: usize,
) -> Result<SimReport> {
    let kind = PolicyKind::Combiner {
        a: Box::new(a.kind.clone()),
        b: Box::new(b.kind.clone()),
        gamma,
    };
    kind.validate()?;
    if kind.uses_predictions() && trace.predictions().is_none() {
        return Err(Error::MissingPredictions(kind.to_string()));
    }
    if k == 0 {
        return Err(Error::Parameter("cache size k must be >= 1".into()));
    }
    let idx = TraceIndex::new(trace, k);
    let phys_seed = child_seed(a.seed ^ splitmix64(b.seed), b'P');
    run(&idx, (&a.kind, a.seed), (&b.kind, b.seed), gamma, phys_seed)
}

pub(crate) fn run(
    idx: &TraceIndex<'_>,
    a: (&PolicyKind, u64),
    b: (&PolicyKind, u64),
    gamma: f64,
    phys_seed: u64,
) -> Result<SimReport> {
    let kinds = [a.0, b.0];
    let mut shadows = [
        Runner::new(idx, a.1, a.0.is_marker()),
        Runner::new(idx, b.1, b.0.is_marker()),
    ];
    let mut physical = Runner::new(idx, phys_seed, false);
    let mut follow = 0usize;
    let mut stats = CombinerStats::default();

    for i in 0..idx.trace.len() {
        let mut victims = [None; 2];
        for (j, shadow) in shadows.iter_mut().enumerate() {
            let kind = kinds[j];
            victims[j] = shadow
                .step(idx, i, |info, _| Choice::Rule(kind.rule(idx.k, info)))?
                .victim;
        }
        let followed = kinds[follow];
        let shadow_victim = victims[follow];
        physical.step(idx, i, |info, st| match shadow_victim {
            Some(v) if st.contains(v) => Choice::Forced(v),
            _ => Choice::Rule(followed.rule(idx.k, info)),
        })?;

        let (mine, other) = (shadows[follow].misses(), shadows[1 - follow].misses());
        if mine as f64 > gamma * other as f64 {
            if follow == 0 {
                stats.switches_a_to_b += 1;
            } else {
                stats.switches_b_to_a += 1;
            }
            follow = 1 - follow;
        }
    }

    stats.shadow_misses = [shadows[0].misses(), shadows[1].misses()];
    let mut report = physical.into_report(idx);
    report.combiner = Some(stats);
    Ok(report)
}
