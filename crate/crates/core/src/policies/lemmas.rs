//! Runtime checks of the deterministic LNONMARKER bounds.
//!
//! Both checks carry an additive `O(k²)` slack that absorbs the end-of-trace
//! edge case (chains in the last two phases): `6k²` for the total-error bound
//! and `2k²` for the chain-count bound.

use super::SimReport;
use crate::trace::ErrorReport;

/// `ΣN*(c) <= 3η + 6k²`.
pub fn verify_lemma_totalerror(report: &SimReport, error: &ErrorReport, k: usize) -> bool {
    let k2 = (k as u128).pow(2);
    u128::from(report.sum_n_star) <= 3 * u128::from(error.eta) + 6 * k2
}

/// `η + 2k² >= k (C − L) / 2`.
pub fn verify_lemma_injection(report: &SimReport, error: &ErrorReport, k: usize) -> bool {
    let k = k as i128;
    let lhs = 2 * (i128::from(error.eta) + 2 * k * k);
    let rhs = k * (i128::from(report.chain_count_c) - i128::from(report.clean_count_l));
    lhs >= rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::{simulate, PolicyKind, PolicySpec};
    use crate::trace::{compute_phases, l1_error, pages, Trace};

    fn report(sum_n_star: u64, c: u64, l: u64) -> SimReport {
        SimReport {
            misses: 0,
            per_phase_misses: vec![],
            chains: vec![],
            chain_count_c: c,
            clean_count_l: l,
            sum_n_star,
            marked_evictions: 0,
            combiner: None,
        }
    }

    fn err(eta: u64) -> ErrorReport {
        ErrorReport {
            eta,
            per_phase_eta: vec![eta],
        }
    }

    #[test]
    fn thresholds() {
        assert!(verify_lemma_totalerror(&report(24, 0, 0), &err(0), 2));
        assert!(!verify_lemma_totalerror(&report(25, 0, 0), &err(0), 2));
        assert!(verify_lemma_totalerror(&report(27, 0, 0), &err(1), 2));
        // k=2: 2(η + 8) >= 2(C − L)
        assert!(verify_lemma_injection(&report(0, 18, 10), &err(0), 2));
        assert!(!verify_lemma_injection(&report(0, 19, 10), &err(0), 2));
        assert!(verify_lemma_injection(&report(0, 3, 10), &err(0), 2));
    }

    #[test]
    fn single_phase_trace_holds() {
        let reqs = pages(&[1, 2, 3, 1, 2, 3]);
        let t = Trace::with_predictions(reqs.clone(), vec![0; 6]).unwrap();
        let rep = simulate(&PolicySpec::new(PolicyKind::LNonMarker, 0), &t, 3).unwrap();
        let e = l1_error(&t, &compute_phases(&reqs, 3)).unwrap();
        assert!(verify_lemma_totalerror(&rep, &e, 3));
        assert!(verify_lemma_injection(&rep, &e, 3));
    }
}
