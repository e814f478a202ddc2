use alloc::collections::btree_map::{self, BTreeMap};
use alloc::vec::Vec;

use crate::prob::Probability;

/// A sparse probability distribution over target states.
///
/// Zero-mass targets are never stored; repeated targets accumulate.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionRow<K: Ord, P> {
    entries: BTreeMap<K, P>,
}

impl<K: Ord, P: Probability> Default for TransitionRow<K, P> {
    fn default() -> Self {
        TransitionRow {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord, P: Probability> TransitionRow<K, P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, target: K, p: P) {
        if p.is_zero() {
            return;
        }
        match self.entries.entry(target) {
            btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + p;
                o.insert(sum);
            }
        }
    }

    pub fn get(&self, target: &K) -> Option<&P> {
        self.entries.get(target)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, P> {
        self.entries.iter()
    }

    pub fn targets(&self) -> btree_map::Keys<'_, K, P> {
        self.entries.keys()
    }

    /// Total mass.
    pub fn total(&self) -> P {
        self.entries
            .values()
            .fold(P::zero(), |acc, p| acc + p.clone())
    }

    /// Relabels every target, merging targets that collide.
    pub fn map_targets<K2: Ord>(&self, mut f: impl FnMut(&K) -> K2) -> TransitionRow<K2, P> {
        let mut out = TransitionRow::new();
        for (k, p) in &self.entries {
            out.insert(f(k), p.clone());
        }
        out
    }

    pub fn into_vec(self) -> Vec<(K, P)> {
        self.entries.into_iter().collect()
    }
}

impl<K: Ord, P> IntoIterator for TransitionRow<K, P> {
    type Item = (K, P);
    type IntoIter = btree_map::IntoIter<K, P>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}
