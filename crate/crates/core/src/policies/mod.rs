//! Online eviction policies and the simulation engine.
//!
//! All policies share the same phase machinery: phases come from
//! [`crate::trace::compute_phases`], marks are set on every request and
//! cleared at each phase boundary, and misses are grouped into eviction
//! chains headed by non-initial arrivals.

mod combiner;
mod engine;
mod evict;
mod index;
mod lemmas;
mod state;

use std::fmt;
use std::str::FromStr;

pub use combiner::{simulate_combiner, CombinerStats, DEFAULT_GAMMA};
pub use evict::{
    apply_rule, evict_lmarker, evict_lnonmarker, evict_predictive_marker, lmarker_rule,
    lnonmarker_rule, predictive_marker_rule, EvictRule, IncomingClass,
};
pub use index::TraceIndex;
pub use lemmas::{verify_lemma_injection, verify_lemma_totalerror};
pub use state::{CacheState, Provenance};

use crate::error::{Error, Result};
use crate::math::harmonic;
use crate::rng::child_seed;
use crate::trace::Trace;
use engine::{Choice, MissInfo, Runner};

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyKind {
    Lru,
    RandomMarker,
    /// Evicts the cached page with the highest most-recent prediction.
    BlindFollow,
    /// Trusts predictions until the chain reaches `threshold` misses.
    /// `None` means `ceil(H(k))`.
    PredictiveMarker {
        threshold: Option<u64>,
    },
    LMarker,
    LNonMarker,
    Combiner {
        a: Box<PolicyKind>,
        b: Box<PolicyKind>,
        gamma: f64,
    },
}

impl PolicyKind {
    pub fn combiner(a: PolicyKind, b: PolicyKind) -> Self {
        PolicyKind::Combiner {
            a: Box::new(a),
            b: Box::new(b),
            gamma: DEFAULT_GAMMA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PolicyKind::PredictiveMarker { threshold: Some(0) } => Err(Error::Parameter(
                "predictive marker threshold must be >= 1".into(),
            )),
            PolicyKind::Combiner { a, b, gamma } => {
                if gamma.is_nan() || *gamma <= 1.0 {
                    return Err(Error::Parameter(format!(
                        "combiner gamma {gamma} must be > 1"
                    )));
                }
                for inner in [a, b] {
                    if matches!(**inner, PolicyKind::Combiner { .. }) {
                        return Err(Error::Parameter("combiners cannot be nested".into()));
                    }
                    inner.validate()?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn uses_predictions(&self) -> bool {
        match self {
            PolicyKind::Lru | PolicyKind::RandomMarker => false,
            PolicyKind::Combiner { a, b, .. } => a.uses_predictions() || b.uses_predictions(),
            _ => true,
        }
    }

    /// Evicts unmarked pages only.
    pub fn is_marker(&self) -> bool {
        matches!(
            self,
            PolicyKind::Lru
                | PolicyKind::RandomMarker
                | PolicyKind::PredictiveMarker { .. }
                | PolicyKind::LMarker
        )
    }

    pub(crate) fn rule(&self, k: usize, info: &MissInfo) -> EvictRule {
        match self {
            PolicyKind::Lru => EvictRule::Lru,
            PolicyKind::RandomMarker => EvictRule::RandomUnmarked,
            PolicyKind::BlindFollow => EvictRule::ArgmaxAny,
            PolicyKind::PredictiveMarker { threshold } => {
                let tau = threshold.unwrap_or_else(|| default_threshold(k));
                predictive_marker_rule(info.chain_len_so_far, tau)
            }
            PolicyKind::LMarker => lmarker_rule(info.clean),
            PolicyKind::LNonMarker => {
                let class = if info.head {
                    IncomingClass::NonInitial
                } else if info.provenance == Provenance::ChainSecond {
                    IncomingClass::ChainSecond
                } else {
                    IncomingClass::Other
                };
                lnonmarker_rule(class)
            }
            PolicyKind::Combiner { .. } => unreachable!("combiner has no eviction rule of its own"),
        }
    }
}

/// `ceil(H(k))`.
pub fn default_threshold(k: usize) -> u64 {
    harmonic(k).ceil() as u64
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Lru => f.write_str("lru"),
            PolicyKind::RandomMarker => f.write_str("random_marker"),
            PolicyKind::BlindFollow => f.write_str("blind_follow"),
            PolicyKind::PredictiveMarker { threshold: None } => f.write_str("predictive_marker"),
            PolicyKind::PredictiveMarker { threshold: Some(t) } => {
                write!(f, "predictive_marker:{t}")
            }
            PolicyKind::LMarker => f.write_str("lmarker"),
            PolicyKind::LNonMarker => f.write_str("lnonmarker"),
            PolicyKind::Combiner { a, b, gamma } => {
                if *gamma == DEFAULT_GAMMA {
                    write!(f, "combiner:{a}+{b}")
                } else {
                    write!(f, "combiner:{a}+{b}:{gamma}")
                }
            }
        }
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    /// Accepts the [`fmt::Display`] form, e.g. `lmarker`, `predictive_marker:3`,
    /// `combiner:lnonmarker+random_marker:2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parameter(format!("unknown policy `{s}`"));
        let kind = match s {
            "lru" => PolicyKind::Lru,
            "random_marker" => PolicyKind::RandomMarker,
            "blind_follow" => PolicyKind::BlindFollow,
            "predictive_marker" => PolicyKind::PredictiveMarker { threshold: None },
            "lmarker" => PolicyKind::LMarker,
            "lnonmarker" => PolicyKind::LNonMarker,
            _ => {
                if let Some(t) = s.strip_prefix("predictive_marker:") {
                    let t = t.parse().map_err(|_| bad())?;
                    PolicyKind::PredictiveMarker { threshold: Some(t) }
                } else if let Some(rest) = s.strip_prefix("combiner:") {
                    let (pair, gamma) = match rest.rsplit_once(':') {
                        Some((pair, g)) if !g.contains('+') => {
                            let gamma: f64 = g.parse().map_err(|_| bad())?;
                            (pair, gamma)
                        }
                        _ => (rest, DEFAULT_GAMMA),
                    };
                    let (a, b) = pair.split_once('+').ok_or_else(bad)?;
                    PolicyKind::Combiner {
                        a: Box::new(a.parse()?),
                        b: Box::new(b.parse()?),
                        gamma,
                    }
                } else {
                    return Err(bad());
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub seed: u64,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        PolicySpec { kind, seed }
    }
}

/// One eviction chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainRecord {
    pub phase_index: usize,
    /// 1-indexed arrival time of the head.
    pub head_time: usize,
    pub length: u64,
    /// Distinct pages after the reappearance of the head's victim within the
    /// phase (`N*`); zero if the victim does not reappear.
    pub n_star: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub misses: u64,
    pub per_phase_misses: Vec<u64>,
    pub chains: Vec<ChainRecord>,
    /// Non-initial arrivals summed over phases (`C`).
    pub chain_count_c: u64,
    /// Clean arrivals summed over phases (`L`).
    pub clean_count_l: u64,
    pub sum_n_star: u64,
    /// Evictions of marked pages (only LNONMARKER, BLIND_FOLLOW and combiners).
    pub marked_evictions: u64,
    pub combiner: Option<CombinerStats>,
}

/// Runs `policy` over `trace` with a cache of `k` pages.
pub fn simulate(policy: &PolicySpec, trace: &Trace, k: usize) -> Result<SimReport> {
    if k == 0 {
        return Err(Error::Parameter("cache size k must be >= 1".into()));
    }
    let idx = TraceIndex::new(trace, k);
    simulate_indexed(policy, &idx)
}

/// [`simulate`] against a prebuilt index, to share phase bookkeeping across runs.
pub fn simulate_indexed(policy: &PolicySpec, idx: &TraceIndex<'_>) -> Result<SimReport> {
    policy.kind.validate()?;
    if policy.kind.uses_predictions() && idx.trace.predictions().is_none() {
        return Err(Error::MissingPredictions(policy.kind.to_string()));
    }
    match &policy.kind {
        PolicyKind::Combiner { a, b, gamma } => combiner::run(
            idx,
            (a, child_seed(policy.seed, b'A')),
            (b, child_seed(policy.seed, b'B')),
            *gamma,
            child_seed(policy.seed, b'P'),
        ),
        kind => {
            let mut runner = Runner::new(idx, policy.seed, kind.is_marker());
            for i in 0..idx.trace.len() {
                runner.step(idx, i, |info, _| Choice::Rule(kind.rule(idx.k, info)))?;
            }
            Ok(runner.into_report(idx))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opt::belady_cost;
    use crate::trace::pages;
    use std::collections::BTreeSet;

    fn spec(kind: PolicyKind, seed: u64) -> PolicySpec {
        PolicySpec::new(kind, seed)
    }

    #[test]
    fn blind_follow_perfect_is_belady() {
        let t = Trace::perfect(pages(&[1, 2, 3, 1, 2]));
        let rep = simulate(&spec(PolicyKind::BlindFollow, 0), &t, 2).unwrap();
        assert_eq!(rep.misses, 4);
        assert_eq!(rep.misses, belady_cost(&t, 2));
    }

    #[test]
    fn lru_two_pages_fit() {
        let t = Trace::new(pages(&[1, 2, 1, 2]));
        let rep = simulate(&spec(PolicyKind::Lru, 0), &t, 2).unwrap();
        assert_eq!(rep.misses, 2);
    }

    #[test]
    fn random_marker_cost_depends_on_first_eviction() {
        let t = Trace::new(pages(&[1, 2, 3, 1, 2]));
        let belady = belady_cost(&t, 2);
        let mut seen = BTreeSet::new();
        for seed in 0..50 {
            let rep = simulate(&spec(PolicyKind::RandomMarker, seed), &t, 2).unwrap();
            assert!(rep.misses >= belady);
            seen.insert(rep.misses);
        }
        // evicting 2 at time 3 costs 4, evicting 1 costs 5
        assert_eq!(seen, BTreeSet::from([4, 5]));
    }

    #[test]
    fn missing_predictions_error() {
        let t = Trace::new(pages(&[1, 2, 3]));
        for kind in [
            PolicyKind::BlindFollow,
            PolicyKind::LMarker,
            PolicyKind::LNonMarker,
            PolicyKind::PredictiveMarker { threshold: None },
            PolicyKind::combiner(PolicyKind::LNonMarker, PolicyKind::RandomMarker),
        ] {
            assert!(matches!(
                simulate(&spec(kind, 0), &t, 2),
                Err(Error::MissingPredictions(_))
            ));
        }
        assert!(simulate(&spec(PolicyKind::Lru, 0), &t, 2).is_ok());
    }

    #[test]
    fn chain_bookkeeping_small() {
        // k=2, phases [1 2] [3 1] [2]; LMARKER with perfect predictions.
        let t = Trace::perfect(pages(&[1, 2, 3, 1, 2]));
        let rep = simulate(&spec(PolicyKind::LMarker, 0), &t, 2).unwrap();
        assert_eq!(rep.misses, 4);
        assert_eq!(rep.per_phase_misses, vec![2, 1, 1]);
        assert_eq!(rep.chain_count_c, 4);
        assert_eq!(rep.clean_count_l, 4);
        assert_eq!(rep.chains.iter().map(|c| c.length).sum::<u64>(), 4);
    }

    #[test]
    fn n_star_counts_distinct_after_reappearance() {
        // k=3, phases [1 2 3] [4 3 2 4] [5]. The head 4 evicts page 3 (highest
        // prediction among the unmarked), which returns at time 5; pages 2 and
        // 4 follow it within the phase.
        let reqs = pages(&[1, 2, 3, 4, 3, 2, 4, 5]);
        let preds = vec![2, 5, 50, 10, 10, 10, 10, 10];
        let t = Trace::with_predictions(reqs, preds).unwrap();
        let rep = simulate(&spec(PolicyKind::LMarker, 1), &t, 3).unwrap();
        let head = rep.chains.iter().find(|c| c.head_time == 4).unwrap();
        assert_eq!(head.n_star, 2);
        assert!(head.length >= 2);
        assert_eq!(rep.sum_n_star, 2);
    }

    #[test]
    fn policy_names_round_trip() {
        for s in [
            "lru",
            "random_marker",
            "blind_follow",
            "predictive_marker",
            "predictive_marker:3",
            "lmarker",
            "lnonmarker",
            "combiner:lnonmarker+random_marker",
            "combiner:lmarker+lru:3.5",
        ] {
            let k: PolicyKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("combiner:lmarker+lru:1".parse::<PolicyKind>().is_err());
        assert!("predictive_marker:0".parse::<PolicyKind>().is_err());
        assert!("combiner:combiner:lru+lru+lru"
            .parse::<PolicyKind>()
            .is_err());
        assert!("belady".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn default_threshold_is_ceil_harmonic() {
        assert_eq!(default_threshold(1), 1);
        assert_eq!(default_threshold(4), 3);
        assert_eq!(default_threshold(32), 5);
    }
}
