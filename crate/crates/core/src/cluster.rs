//! Incremental min-hash coarse clusters.
//!
//! Each node's signature is the minimum of a fixed 64-bit hash over its
//! current neighbors; two nodes share a cluster iff their signatures match,
//! which happens with probability equal to the Jaccard similarity of their
//! neighborhoods.

use crate::summary::Summary;
use crate::types::{EventKind, NodeId, StreamEvent};

const UNCLUSTERED: u64 = u64::MAX;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct ClusterIndex {
    signature: Vec<u64>,
    hash_seed: u64,
    seed_key: u64,
}

impl ClusterIndex {
    pub fn new(hash_seed: u64) -> Self {
        ClusterIndex {
            signature: Vec::new(),
            hash_seed,
            seed_key: mix64(hash_seed ^ 0x9e37_79b9_7f4a_7c15),
        }
    }

    pub fn hash_seed(&self) -> u64 {
        self.hash_seed
    }

    /// The node hash `h`. Never returns the unclustered sentinel.
    #[inline]
    pub fn hash(&self, v: NodeId) -> u64 {
        mix64((v.0 as u64).wrapping_add(self.seed_key)).min(UNCLUSTERED - 1)
    }

    /// `min h(N(u))`, or `None` while `u` has no neighbors.
    pub fn signature(&self, u: NodeId) -> Option<u64> {
        match self.signature.get(u.index()) {
            Some(&s) if s != UNCLUSTERED => Some(s),
            _ => None,
        }
    }

    fn slot(&mut self, u: NodeId) -> &mut u64 {
        if u.index() >= self.signature.len() {
            self.signature.resize(u.index() + 1, UNCLUSTERED);
        }
        &mut self.signature[u.index()]
    }

    /// Folds one applied stream change into the signatures. `state` must
    /// already reflect the change.
    pub fn update_on_change(&mut self, state: &Summary, event: &StreamEvent) {
        let (u, v) = event.edge();
        for (node, other) in [(u, v), (v, u)] {
            let h = self.hash(other);
            match event.kind {
                EventKind::Insert => {
                    let slot = self.slot(node);
                    *slot = (*slot).min(h);
                }
                EventKind::Delete => {
                    if *self.slot(node) == h {
                        let fresh = self.recompute(state, node);
                        *self.slot(node) = fresh;
                    }
                }
            }
        }
    }

    fn recompute(&self, state: &Summary, u: NodeId) -> u64 {
        state
            .retrieve_neighborhood(u)
            .map(|n| n.into_iter().map(|w| self.hash(w)).min().unwrap_or(UNCLUSTERED))
            .unwrap_or(UNCLUSTERED)
    }

    /// Whether `a` and `b` fall in the same coarse cluster. Nodes without
    /// neighbors are unclustered and match nothing.
    pub fn same_cluster(&self, a: NodeId, b: NodeId) -> bool {
        match (self.signature(a), self.signature(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(state: &mut Summary, index: &mut ClusterIndex, ev: StreamEvent) {
        state.process_edge_change(&ev).unwrap();
        index.update_on_change(state, &ev);
    }

    #[test]
    fn insert_keeps_minimum() {
        let mut s = Summary::new();
        let mut idx = ClusterIndex::new(0);
        // order neighbors of 0 by hash
        let mut others: Vec<u32> = (1..10).collect();
        others.sort_by_key(|&w| idx.hash(NodeId(w)));
        let (low, high) = (others[0], others[8]);
        apply(&mut s, &mut idx, StreamEvent::insert(0, low));
        let before = idx.signature(NodeId(0));
        apply(&mut s, &mut idx, StreamEvent::insert(0, high));
        assert_eq!(idx.signature(NodeId(0)), before);
        assert_eq!(before, Some(idx.hash(NodeId(low))));
    }

    #[test]
    fn deleting_minimizer_recomputes() {
        let mut s = Summary::new();
        let mut idx = ClusterIndex::new(42);
        for w in 1..6 {
            apply(&mut s, &mut idx, StreamEvent::insert(0, w));
        }
        let min_node = (1..6u32).min_by_key(|&w| idx.hash(NodeId(w))).unwrap();
        apply(&mut s, &mut idx, StreamEvent::delete(0, min_node));
        let expected = (1..6u32)
            .filter(|&w| w != min_node)
            .map(|w| idx.hash(NodeId(w)))
            .min();
        assert_eq!(idx.signature(NodeId(0)), expected);
        assert_eq!(idx.signature(NodeId(min_node)), None);
    }

    #[test]
    fn identical_neighborhoods_match() {
        let mut s = Summary::new();
        let mut idx = ClusterIndex::new(9);
        for w in [5, 6, 7] {
            apply(&mut s, &mut idx, StreamEvent::insert(0, w));
            apply(&mut s, &mut idx, StreamEvent::insert(1, w));
        }
        assert!(idx.same_cluster(NodeId(0), NodeId(1)));
        assert!(idx.same_cluster(NodeId(0), NodeId(0)));
        assert!(!idx.same_cluster(NodeId(0), NodeId(42)));
    }

    #[test]
    fn disjoint_neighborhoods_differ() {
        let mut s = Summary::new();
        let mut idx = ClusterIndex::new(1);
        apply(&mut s, &mut idx, StreamEvent::insert(0, 2));
        apply(&mut s, &mut idx, StreamEvent::insert(1, 3));
        assert!(!idx.same_cluster(NodeId(0), NodeId(1)));
    }
}
