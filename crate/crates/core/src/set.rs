use std::fmt;

use fixedbitset::FixedBitSet;

use crate::game::StateId;

/// A set of states of one game, stored as a bitset over the game's ordered
/// state ids. Iteration is always in ascending (declaration) order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    bits: FixedBitSet,
}

impl StateSet {
    pub fn empty(universe: usize) -> Self {
        StateSet { bits: FixedBitSet::with_capacity(universe) }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        StateSet { bits }
    }

    pub fn from_ids(universe: usize, ids: impl IntoIterator<Item = StateId>) -> Self {
        let mut set = Self::empty(universe);
        for id in ids {
            set.insert(id);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, id: StateId) -> bool {
        self.bits.contains(id)
    }

    pub fn insert(&mut self, id: StateId) -> bool {
        assert!(id < self.bits.len(), "state {id} outside universe {}", self.bits.len());
        !self.bits.put(id)
    }

    pub fn remove(&mut self, id: StateId) {
        self.bits.set(id, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.bits.ones()
    }

    pub fn complement(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        StateSet { bits }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    pub fn union_with(&mut self, other: &Self) {
        debug_assert_eq!(self.universe(), other.universe());
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &Self) {
        debug_assert_eq!(self.universe(), other.universe());
        self.bits.intersect_with(&other.bits);
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_full(&self) -> bool {
        self.bits.is_full()
    }

    /// Bitmask of members, for universes of at most 64 states.
    pub fn to_mask(&self) -> u64 {
        assert!(self.universe() <= 64, "mask requires at most 64 states");
        self.iter().fold(0u64, |m, s| m | (1 << s))
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
