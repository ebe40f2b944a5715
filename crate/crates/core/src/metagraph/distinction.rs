//! Distinction graphs and graphtropy.
//!
//! A distinction graph records, for a fixed observer, which pairs of
//! elementary observations the observer *cannot* distinguish: a symmetric
//! link means "indistinguishable". Graphtropy is the fraction of possible
//! binary distinctions the graph actually makes; it generalizes logical
//! entropy from partitions to arbitrary indistinguishability relations.

use std::collections::BTreeSet;

use super::{AtomId, GraphError};

/// How pairs are counted when normalizing graphtropy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphtropyMode {
    /// Unordered pairs of distinct observations over `C(n,2)`. The default.
    DistinctPairs,
    /// Ordered pairs including self-pairs over `n^2`, every observation
    /// indistinguishable from itself. On an equivalence relation with block
    /// proportions `p_i` this equals the logical entropy `1 - sum p_i^2`
    /// exactly.
    OrderedWithDiagonal,
}

/// Symmetric indistinguishability relation over a set of observation nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinctionGraph {
    observations: BTreeSet<AtomId>,
    indistinct: BTreeSet<(AtomId, AtomId)>,
}

impl DistinctionGraph {
    pub fn new(observations: BTreeSet<AtomId>) -> Self {
        Self { observations, indistinct: BTreeSet::new() }
    }

    pub fn observations(&self) -> &BTreeSet<AtomId> {
        &self.observations
    }

    /// Number of indistinct (unordered) pairs.
    pub fn link_count(&self) -> usize {
        self.indistinct.len()
    }

    /// Marks `a` and `b` indistinguishable (stored once, canonically).
    pub fn link(&mut self, a: AtomId, b: AtomId) -> Result<(), GraphError> {
        if !self.observations.contains(&a) {
            return Err(GraphError::UnknownNode(a));
        }
        if !self.observations.contains(&b) {
            return Err(GraphError::UnknownNode(b));
        }
        if a != b {
            self.indistinct.insert(canonical(a, b));
        }
        Ok(())
    }

    pub fn indistinct(&self, a: AtomId, b: AtomId) -> bool {
        a == b || self.indistinct.contains(&canonical(a, b))
    }

    fn unordered_pairs(&self) -> impl Iterator<Item = (AtomId, AtomId)> + '_ {
        let obs: Vec<AtomId> = self.observations.iter().copied().collect();
        let n = obs.len();
        (0..n).flat_map(move |i| {
            let obs = obs.clone();
            ((i + 1)..n).map(move |j| (obs[i], obs[j]))
        })
    }

    /// Fraction of possible binary distinctions this graph makes.
    pub fn graphtropy(&self, mode: GraphtropyMode) -> Result<f64, GraphError> {
        let n = self.observations.len();
        if n == 0 {
            return Err(GraphError::TooFewObservations(0));
        }
        match mode {
            GraphtropyMode::DistinctPairs => {
                if n < 2 {
                    return Err(GraphError::TooFewObservations(n));
                }
                let total = n * (n - 1) / 2;
                let distinguished = total - self.indistinct.len();
                Ok(distinguished as f64 / total as f64)
            }
            GraphtropyMode::OrderedWithDiagonal => {
                // Ordered distinguishable pairs: both orders of each
                // unlinked unordered pair; the diagonal is never
                // distinguished.
                let distinguished = 2 * (n * (n - 1) / 2 - self.indistinct.len());
                Ok(distinguished as f64 / (n * n) as f64)
            }
        }
    }

    /// Additional distinction made by `self` relative to `other`: the
    /// fraction of pairs undistinguished by `other` that `self`
    /// distinguishes. Zero when `other` already distinguishes everything.
    pub fn conditional_graphtropy(&self, other: &DistinctionGraph) -> Result<f64, GraphError> {
        if self.observations != other.observations {
            return Err(GraphError::ObservationSetMismatch);
        }
        let mut undistinguished_by_other = 0usize;
        let mut gained = 0usize;
        for (a, b) in self.unordered_pairs() {
            if other.indistinct(a, b) {
                undistinguished_by_other += 1;
                if !self.indistinct(a, b) {
                    gained += 1;
                }
            }
        }
        if undistinguished_by_other == 0 {
            return Ok(0.0);
        }
        Ok(gained as f64 / undistinguished_by_other as f64)
    }
}

fn canonical(a: AtomId, b: AtomId) -> (AtomId, AtomId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
