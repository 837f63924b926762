//! Uniform neighbor sampling straight from the summary.
//!
//! A neighbor of `u` is either one of its `C+` entries or a member of a
//! supernode adjacent to `S_u` through a superedge. The first group is
//! sampled directly. For the second, a Metropolis chain over `N(S_u)` picks
//! supernodes in proportion to their size, a uniform member is drawn, and
//! the draw is retried while it hits `C-(u)` or `u` itself. Neither `N(u)`
//! nor the sizes of all of `N(S_u)` are ever materialized.

use indexmap::IndexSet;
use rand::Rng;
use rustc_hash::FxBuildHasher;

use crate::error::SummaryError;
use crate::summary::Summary;
use crate::types::{NodeId, SupernodeId};

/// Random-access view of the supernodes a chain moves over.
pub trait SupernodeList {
    fn len(&self) -> usize;
    fn get(&self, i: usize) -> SupernodeId;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl SupernodeList for [SupernodeId] {
    fn len(&self) -> usize {
        <[SupernodeId]>::len(self)
    }
    fn get(&self, i: usize) -> SupernodeId {
        self[i]
    }
}

impl SupernodeList for Vec<SupernodeId> {
    fn len(&self) -> usize {
        Vec::len(self)
    }
    fn get(&self, i: usize) -> SupernodeId {
        self[i]
    }
}

impl SupernodeList for IndexSet<SupernodeId, FxBuildHasher> {
    fn len(&self) -> usize {
        IndexSet::len(self)
    }
    fn get(&self, i: usize) -> SupernodeId {
        self[i]
    }
}

/// Metropolis chain whose stationary law picks a supernode with
/// probability proportional to its size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerChain {
    current: SupernodeId,
}

impl SamplerChain {
    pub fn new(start: SupernodeId) -> Self {
        SamplerChain { current: start }
    }

    /// Starts at a uniformly chosen element of `neighbors`.
    pub fn uniform_start<L, R>(neighbors: &L, rng: &mut R) -> Self
    where
        L: SupernodeList + ?Sized,
        R: Rng + ?Sized,
    {
        SamplerChain::new(neighbors.get(rng.gen_range(0..neighbors.len())))
    }

    pub fn current(&self) -> SupernodeId {
        self.current
    }

    /// One proposal: uniform over `neighbors`, accepted with
    /// `min(1, |S_p| / |S_n|)`.
    pub fn step<L, F, R>(&mut self, neighbors: &L, size: F, rng: &mut R) -> SupernodeId
    where
        L: SupernodeList + ?Sized,
        F: Fn(SupernodeId) -> usize,
        R: Rng + ?Sized,
    {
        let proposal = neighbors.get(rng.gen_range(0..neighbors.len()));
        let proposed = size(proposal);
        let current = size(self.current);
        if proposed >= current || rng.gen_range(0..current) < proposed {
            self.current = proposal;
        }
        self.current
    }
}

/// Work counters for [`sample_neighbors_with_stats`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SamplerStats {
    /// Neighbors returned.
    pub draws: u64,
    /// Candidate nodes examined: one per `C+` draw, one per chain step
    /// otherwise (including rejected candidates).
    pub inner_iterations: u64,
}

impl SamplerStats {
    pub fn mean_iterations(&self) -> f64 {
        if self.draws == 0 {
            0.0
        } else {
            self.inner_iterations as f64 / self.draws as f64
        }
    }
}

/// Draws `c` neighbors of `u`, independently and (asymptotically)
/// uniformly, with repetition.
pub fn get_random_neighbor<R: Rng + ?Sized>(
    state: &Summary,
    u: NodeId,
    c: usize,
    rng: &mut R,
) -> Result<Vec<NodeId>, SummaryError> {
    let mut stats = SamplerStats::default();
    sample_neighbors_with_stats(state, u, c, rng, &mut stats)
}

pub fn sample_neighbors_with_stats<R: Rng + ?Sized>(
    state: &Summary,
    u: NodeId,
    c: usize,
    rng: &mut R,
    stats: &mut SamplerStats,
) -> Result<Vec<NodeId>, SummaryError> {
    let degree = state.degree(u)? as usize;
    if degree == 0 {
        return Err(SummaryError::NoNeighbors(u));
    }
    let su = state.supernode_of(u)?;
    let cplus = state.cplus(u)?;
    let cminus = state.cminus(u)?;
    let neighbors = state.superedge_neighbors(su)?;
    if neighbors.is_empty() && cplus.len() < degree {
        return Err(SummaryError::Integrity(format!(
            "node {u} has degree {degree} but only {} C+ entries and no superedges",
            cplus.len()
        )));
    }
    let retry_cap = 64 * (2 + cminus.len() as u64);
    let mut chain = if neighbors.is_empty() {
        None
    } else {
        Some(SamplerChain::uniform_start(neighbors, rng))
    };
    let size = |s: SupernodeId| state.supernode_size(s);

    let mut out = Vec::with_capacity(c);
    while out.len() < c {
        if rng.gen_range(0..degree) < cplus.len() {
            out.push(cplus[rng.gen_range(0..cplus.len())]);
            stats.inner_iterations += 1;
            continue;
        }
        let chain = chain.as_mut().expect("superedge path needs neighbors");
        let mut attempts = 0u64;
        loop {
            attempts += 1;
            if attempts > retry_cap {
                stats.inner_iterations += attempts - 1;
                return Err(SummaryError::Integrity(format!(
                    "no neighbor of {u} found after {retry_cap} chain steps"
                )));
            }
            let current = chain.step(neighbors, size, rng);
            let members = state.members(current)?;
            let w = members[rng.gen_range(0..members.len())];
            if w != u && !cminus.contains(&w) {
                out.push(w);
                break;
            }
        }
        stats.inner_iterations += attempts;
    }
    stats.draws += c as u64;
    Ok(out)
}
