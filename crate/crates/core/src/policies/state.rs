//! Cache contents with phase-local marks and provenance.
//!
//! Pages are addressed by dense slot (see [`crate::trace::Trace::slots`]),
//! and slot order equals page-id order. Phase-local flags are stored as epoch
//! stamps so that a phase rollover is O(k).

/// Why a page was most recently evicted within the current phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Evicted by a non-initial arrival (the head of its chain).
    ChainSecond,
    Other,
}

#[derive(Debug, Clone)]
pub struct CacheState {
    capacity: usize,
    /// Sorted by slot.
    entries: Vec<usize>,
    in_cache: Vec<bool>,
    epoch: u32,
    mark_epoch: Vec<u32>,
    initial_epoch: Vec<u32>,
    provenance: Vec<(u32, Provenance)>,
}

impl CacheState {
    /// Empty cache of `capacity` pages over a universe of `universe` slots.
    /// Starts inside phase 1 with an empty initial snapshot.
    pub fn new(capacity: usize, universe: usize) -> Self {
        CacheState {
            capacity,
            entries: Vec::with_capacity(capacity + 1),
            in_cache: vec![false; universe],
            epoch: 1,
            mark_epoch: vec![0; universe],
            initial_epoch: vec![0; universe],
            provenance: vec![(0, Provenance::Other); universe],
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.in_cache[slot]
    }

    pub fn is_marked(&self, slot: usize) -> bool {
        self.in_cache[slot] && self.mark_epoch[slot] == self.epoch
    }

    pub fn mark(&mut self, slot: usize) {
        debug_assert!(self.in_cache[slot]);
        self.mark_epoch[slot] = self.epoch;
    }

    /// Unmarked entries in slot order.
    pub fn unmarked(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .copied()
            .filter(|&s| self.mark_epoch[s] != self.epoch)
    }

    pub fn marked_count(&self) -> usize {
        self.entries.len() - self.unmarked().count()
    }

    /// Whether `slot` was cached when the current phase began.
    pub fn is_initial(&self, slot: usize) -> bool {
        self.initial_epoch[slot] == self.epoch
    }

    pub fn provenance(&self, slot: usize) -> Provenance {
        match self.provenance[slot] {
            (e, tag) if e == self.epoch => tag,
            _ => Provenance::Other,
        }
    }

    pub fn set_provenance(&mut self, slot: usize, tag: Provenance) {
        self.provenance[slot] = (self.epoch, tag);
    }

    pub fn insert(&mut self, slot: usize) {
        debug_assert!(!self.in_cache[slot]);
        let pos = self.entries.partition_point(|&s| s < slot);
        self.entries.insert(pos, slot);
        self.in_cache[slot] = true;
    }

    pub fn remove(&mut self, slot: usize) {
        let pos = self
            .entries
            .binary_search(&slot)
            .expect("removing a page that is not cached");
        self.entries.remove(pos);
        self.in_cache[slot] = false;
    }

    /// Phase rollover: clears marks and provenance and snapshots the entries
    /// as the new phase's initial set.
    pub fn begin_phase(&mut self) {
        self.epoch += 1;
        for &s in &self.entries {
            self.initial_epoch[s] = self.epoch;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marks_and_phases() {
        let mut st = CacheState::new(2, 4);
        st.insert(3);
        st.insert(1);
        assert_eq!(st.entries(), &[1, 3]);
        st.mark(3);
        assert!(st.is_marked(3));
        assert_eq!(st.unmarked().collect::<Vec<_>>(), vec![1]);
        assert!(st.is_full());
        assert!(!st.is_initial(1));

        st.set_provenance(2, Provenance::ChainSecond);
        st.begin_phase();
        assert!(!st.is_marked(3));
        assert!(st.is_initial(1) && st.is_initial(3) && !st.is_initial(2));
        assert_eq!(st.provenance(2), Provenance::Other);
        assert_eq!(st.marked_count(), 0);

        st.remove(1);
        assert!(!st.contains(1));
        assert_eq!(st.entries(), &[3]);
    }
}
