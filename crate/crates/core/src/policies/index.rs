//! Per-(trace, k) facts shared by every policy run: phases, arrivals,
//! clean flags and within-phase suffix distinct counts.

use crate::opt::clean_count_from_phases;
use crate::trace::{compute_phases, PhaseDecomposition, Trace};

#[derive(Debug, Clone)]
pub struct TraceIndex<'a> {
    pub(crate) trace: &'a Trace,
    pub(crate) k: usize,
    pub(crate) phases: PhaseDecomposition,
    /// Zero-based phase of each position.
    pub(crate) phase_of: Vec<usize>,
    /// Position opens a phase (other than the first).
    pub(crate) opens_phase: Vec<bool>,
    /// First request of its page within the phase.
    pub(crate) first_arrival: Vec<bool>,
    /// Page is clean in the phase containing the position.
    pub(crate) clean: Vec<bool>,
    /// Distinct pages strictly after the position, within its phase.
    pub(crate) suffix_distinct: Vec<u32>,
    pub(crate) clean_count: u64,
}

impl<'a> TraceIndex<'a> {
    pub fn new(trace: &'a Trace, k: usize) -> Self {
        assert!(k >= 1, "cache size must be positive");
        let n = trace.len();
        let slots = trace.slots();
        let phases = compute_phases(trace.requests(), k);
        let phase_of = phases.phase_of_each();

        let mut opens_phase = vec![false; n];
        for &(s, _) in phases.boundaries.iter().skip(1) {
            opens_phase[s - 1] = true;
        }

        let u = trace.universe_len();
        let mut first_arrival = vec![false; n];
        let mut clean = vec![false; n];
        let mut last_phase: Vec<Option<usize>> = vec![None; u];
        let mut clean_now = vec![false; u];
        for i in 0..n {
            let (s, r) = (slots[i], phase_of[i]);
            if last_phase[s] != Some(r) {
                first_arrival[i] = true;
                clean_now[s] = r == 0 || last_phase[s] != Some(r - 1);
                last_phase[s] = Some(r);
            }
            clean[i] = clean_now[s];
        }

        let mut suffix_distinct = vec![0u32; n];
        let mut stamp = vec![usize::MAX; u];
        for (r, &(start, end)) in phases.boundaries.iter().enumerate() {
            let mut count = 0;
            for i in (start - 1..end).rev() {
                suffix_distinct[i] = count;
                if stamp[slots[i]] != r {
                    stamp[slots[i]] = r;
                    count += 1;
                }
            }
        }

        let clean_count = clean_count_from_phases(&phases);
        TraceIndex {
            trace,
            k,
            phases,
            phase_of,
            opens_phase,
            first_arrival,
            clean,
            suffix_distinct,
            clean_count,
        }
    }

    pub fn trace(&self) -> &'a Trace {
        self.trace
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn phases(&self) -> &PhaseDecomposition {
        &self.phases
    }

    pub fn clean_count(&self) -> u64 {
        self.clean_count
    }

    /// 1-indexed end time of the phase containing position `i` (0-based).
    pub(crate) fn phase_end(&self, i: usize) -> usize {
        self.phases.boundaries[self.phase_of[i]].1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::pages;

    #[test]
    fn index_of_small_trace() {
        // phases (k=2): [a b] [c a] [b]
        let t = Trace::new(pages(&[1, 2, 3, 1, 2]));
        let idx = TraceIndex::new(&t, 2);
        assert_eq!(idx.phase_of, vec![0, 0, 1, 1, 2]);
        assert_eq!(idx.opens_phase, vec![false, false, true, false, true]);
        assert_eq!(idx.first_arrival, vec![true; 5]);
        assert_eq!(idx.clean, vec![true, true, true, false, true]);
        assert_eq!(idx.suffix_distinct, vec![1, 0, 1, 0, 0]);
        assert_eq!(idx.clean_count, 4);
    }

    #[test]
    fn suffix_counts_repeats_once() {
        let t = Trace::new(pages(&[1, 2, 1, 2, 1]));
        let idx = TraceIndex::new(&t, 2);
        assert_eq!(idx.suffix_distinct, vec![2, 2, 2, 1, 0]);
        assert_eq!(idx.first_arrival, vec![true, true, false, false, false]);
    }
}
