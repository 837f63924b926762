//! Uncompressed ground truth used to verify summaries.

use std::collections::BTreeSet;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::error::SummaryError;
use crate::summary::{encode_pair, Summary};
use crate::types::{ordered, EventKind, NodeId, StreamEvent};

/// Plain adjacency-set graph replayed alongside a summarizer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactGraph {
    adjacency: Vec<BTreeSet<NodeId>>,
    edge_count: u64,
    events_applied: u64,
}

/// What [`ExactGraph::check_equivalence`] found wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    /// `expected`/`actual` say whether the edge is present.
    Edge {
        pair: (NodeId, NodeId),
        expected: bool,
        actual: bool,
    },
    Phi { expected: u64, actual: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct EquivalenceError {
    /// Number of events the oracle had applied when the check ran.
    pub event_index: u64,
    pub mismatch: Mismatch,
}

impl fmt::Display for EquivalenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let present = |b: bool| if b { "present" } else { "absent" };
        match &self.mismatch {
            Mismatch::Edge {
                pair: (u, v),
                expected,
                actual,
            } => write!(
                f,
                "event {}: pair ({u}, {v}) expected {} actual {}",
                self.event_index,
                present(*expected),
                present(*actual)
            ),
            Mismatch::Phi { expected, actual } => write!(
                f,
                "event {}: phi expected {expected} actual {actual}",
                self.event_index
            ),
        }
    }
}

impl ExactGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn events_applied(&self) -> u64 {
        self.events_applied
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency
            .get(u.index())
            .is_some_and(|n| n.contains(&v))
    }

    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency.get(u.index()).into_iter().flatten().copied()
    }

    /// Replays one event, rejecting self-loops and unsound changes.
    pub fn apply(&mut self, event: &StreamEvent) -> Result<(), SummaryError> {
        let (u, v) = event.edge();
        if u == v {
            return Err(SummaryError::SelfLoop(u));
        }
        match event.kind {
            EventKind::Insert => {
                if self.has_edge(u, v) {
                    return Err(SummaryError::DuplicateInsert(u, v));
                }
                let need = v.index().max(u.index()) + 1;
                if self.adjacency.len() < need {
                    self.adjacency.resize_with(need, BTreeSet::new);
                }
                self.adjacency[u.index()].insert(v);
                self.adjacency[v.index()].insert(u);
                self.edge_count += 1;
            }
            EventKind::Delete => {
                if !self.has_edge(u, v) {
                    return Err(SummaryError::MissingDelete(u, v));
                }
                self.adjacency[u.index()].remove(&v);
                self.adjacency[v.index()].remove(&u);
                self.edge_count -= 1;
            }
        }
        self.events_applied += 1;
        Ok(())
    }

    /// Sorted canonical edge list.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count as usize);
        for (i, ns) in self.adjacency.iter().enumerate() {
            let u = NodeId(i as u32);
            out.extend(ns.range(u..).filter(|&&w| w != u).map(|&w| (u, w)));
        }
        out
    }

    /// Compares the graph recovered from `state` with this one, then
    /// checks that `state`'s phi is the optimum for its own partition.
    pub fn check_equivalence(&self, state: &Summary) -> Result<(), EquivalenceError> {
        let fail = |mismatch| EquivalenceError {
            event_index: self.events_applied,
            mismatch,
        };
        if let Some(found) = self.neighborhood_difference(state) {
            // report the first difference in canonical pair order
            return Err(fail(self.first_edge_difference(state).unwrap_or(found)));
        }

        let partition: Vec<Vec<NodeId>> = state
            .supernodes()
            .iter()
            .map(|&s| state.members(s).map(|m| m.iter().copied().collect()))
            .collect::<Result<_, _>>()
            .expect("live supernodes have members");
        let best = brute_force_phi(self, &partition);
        if best != state.phi() {
            return Err(fail(Mismatch::Phi {
                expected: best,
                actual: state.phi(),
            }));
        }
        Ok(())
    }

    /// Node-by-node comparison of neighborhoods, without sorting.
    fn neighborhood_difference(&self, state: &Summary) -> Option<Mismatch> {
        let n = self.adjacency.len().max(state.node_slots());
        let mut marked = vec![false; n];
        let empty = BTreeSet::new();
        for i in 0..n {
            let u = NodeId(i as u32);
            let expected = self.adjacency.get(i).unwrap_or(&empty);
            let actual = if state.has_node(u) {
                state.neighbors_of(u)
            } else {
                Vec::new()
            };
            for &w in expected {
                marked[w.index()] = true;
            }
            for &w in &actual {
                if !marked.get(w.index()).copied().unwrap_or(false) {
                    return Some(Mismatch::Edge {
                        pair: ordered(u, w),
                        expected: self.has_edge(u, w),
                        actual: true,
                    });
                }
                marked[w.index()] = false;
            }
            if let Some(&w) = expected.iter().find(|w| marked[w.index()]) {
                return Some(Mismatch::Edge {
                    pair: ordered(u, w),
                    expected: true,
                    actual: false,
                });
            }
        }
        None
    }

    /// Merge of the sorted edge lists; only run once a difference is known.
    fn first_edge_difference(&self, state: &Summary) -> Option<Mismatch> {
        let expected = self.edges();
        let actual = state.reconstruct();
        let (mut i, mut j) = (0, 0);
        loop {
            match (expected.get(i), actual.get(j)) {
                (None, None) => return None,
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(&a), b) if b.is_none_or(|&b| a < b) => {
                    return Some(Mismatch::Edge {
                        pair: a,
                        expected: true,
                        actual: false,
                    })
                }
                (_, Some(&b)) => {
                    return Some(Mismatch::Edge {
                        pair: b,
                        expected: false,
                        actual: true,
                    })
                }
                (Some(_), None) => unreachable!(),
            }
        }
    }
}

/// Optimal phi for `partition` by direct edge counting. Nodes of `exact`
/// missing from the partition must be isolated.
pub fn brute_force_phi(exact: &ExactGraph, partition: &[Vec<NodeId>]) -> u64 {
    let mut group = vec![usize::MAX; exact.adjacency.len()];
    for (g, members) in partition.iter().enumerate() {
        for &u in members {
            if let Some(slot) = group.get_mut(u.index()) {
                *slot = g;
            }
        }
    }
    let mut counts: FxHashMap<(usize, usize), u64> = FxHashMap::default();
    for (i, ns) in exact.adjacency.iter().enumerate() {
        let a = group[i];
        for w in ns.range(NodeId(i as u32 + 1)..) {
            let b = group[w.index()];
            *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .map(|((a, b), e)| {
            let size = |g: usize| partition[g].len() as u64;
            encode_pair(size(a), size(b), e, a == b)
                .expect("edge count within potential edges")
                .cost
        })
        .sum()
}
