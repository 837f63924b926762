//! Summary graph plus edge corrections, kept per-pair optimally encoded.
//!
//! Every supernode pair `{A, B}` with at least one edge between them is
//! encoded either as plain corrections (all of `E_AB` in `C+`) or as a
//! superedge with the missing pairs `T_AB \ E_AB` in `C-`, whichever is
//! cheaper. All mutation goes through [`Summary::process_edge_change`] and
//! [`Summary::move_node`], both of which restore that invariant before
//! returning.

use std::collections::BTreeMap;

use indexmap::IndexSet;
use rustc_hash::{FxBuildHasher, FxHashMap, FxHashSet};

use crate::error::SummaryError;
use crate::types::{ordered, Destination, EventKind, NodeId, StreamEvent, SupernodeId};

pub type FxIndexSet<T> = IndexSet<T, FxBuildHasher>;

/// Number of potential edges `|T_AB|` between two supernodes of the given
/// sizes.
#[inline]
pub fn potential_edges(size_a: u64, size_b: u64, is_self_pair: bool) -> u64 {
    if is_self_pair {
        size_a * size_a.saturating_sub(1) / 2
    } else {
        size_a * size_b
    }
}

/// Outcome of the per-pair optimal encoding rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodingDecision {
    pub use_superedge: bool,
    pub cost: u64,
}

/// Chooses between encoding `edge_count` edges as `C+` entries or as one
/// superedge plus `C-` entries. Ties go to `C+`.
pub fn encode_pair(
    size_a: u64,
    size_b: u64,
    edge_count: u64,
    is_self_pair: bool,
) -> Result<EncodingDecision, SummaryError> {
    let potential = potential_edges(size_a, size_b, is_self_pair);
    if edge_count == 0 || edge_count > potential {
        return Err(SummaryError::Integrity(format!(
            "edge count {edge_count} outside 1..={potential} for sizes ({size_a}, {size_b})"
        )));
    }
    Ok(decide(potential, edge_count))
}

#[inline]
fn decide(potential: u64, edge_count: u64) -> EncodingDecision {
    // |E| > (|T| + 1) / 2, kept in integers
    if 2 * edge_count > potential + 1 {
        EncodingDecision {
            use_superedge: true,
            cost: 1 + potential - edge_count,
        }
    } else {
        EncodingDecision {
            use_superedge: false,
            cost: edge_count,
        }
    }
}

#[inline]
pub(crate) fn pair_cost(size_a: u64, size_b: u64, edge_count: u64, is_self_pair: bool) -> u64 {
    if edge_count == 0 {
        return 0;
    }
    let potential = potential_edges(size_a, size_b, is_self_pair);
    debug_assert!(edge_count <= potential);
    decide(potential, edge_count).cost
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Supernode {
    pub(crate) members: FxIndexSet<NodeId>,
    pub(crate) superedges: FxIndexSet<SupernodeId>,
    /// Nonzero `|E_AB|` keyed by the other supernode, self-pair included.
    pub(crate) pairs: FxHashMap<SupernodeId, u32>,
    /// Sum of member degrees.
    pub(crate) degree_sum: u64,
    live_pos: usize,
}

/// The evolving summary `(S, P)` with corrections `(C+, C-)`.
#[derive(Clone, Debug, Default)]
pub struct Summary {
    membership: Vec<SupernodeId>,
    degree: Vec<u32>,
    cplus: Vec<FxIndexSet<NodeId>>,
    cminus: Vec<FxHashSet<NodeId>>,
    supernodes: Vec<Supernode>,
    free_ids: Vec<SupernodeId>,
    live: Vec<SupernodeId>,
    node_count: usize,
    edge_count: u64,
    superedge_count: u64,
    cplus_count: u64,
    cminus_count: u64,
    pair_entries: u64,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    // ---- size accounting -------------------------------------------------

    /// `|P| + |C+| + |C-|`.
    pub fn phi(&self) -> u64 {
        self.superedge_count + self.cplus_count + self.cminus_count
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn superedge_count(&self) -> u64 {
        self.superedge_count
    }

    pub fn cplus_count(&self) -> u64 {
        self.cplus_count
    }

    pub fn cminus_count(&self) -> u64 {
        self.cminus_count
    }

    pub fn supernode_count(&self) -> usize {
        self.live.len()
    }

    /// Number of nonzero supernode-pair edge counters.
    pub fn pair_count_entries(&self) -> u64 {
        self.pair_entries
    }

    /// Logical entries held by the representation: one record per node,
    /// one per superedge, one per correction and one per nonzero pair
    /// counter.
    pub fn stored_entries(&self) -> u64 {
        self.node_count as u64 + self.phi() + self.pair_entries
    }

    /// `phi / |E|`, or 0 for an empty graph.
    pub fn compression_ratio(&self) -> f64 {
        if self.edge_count == 0 {
            0.0
        } else {
            self.phi() as f64 / self.edge_count as f64
        }
    }

    // ---- read accessors --------------------------------------------------

    /// One past the largest node id seen.
    pub(crate) fn node_slots(&self) -> usize {
        self.membership.len()
    }

    pub fn has_node(&self, u: NodeId) -> bool {
        self.membership
            .get(u.index())
            .is_some_and(|s| *s != SupernodeId::NONE)
    }

    /// Ids of all seen nodes, ascending.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.membership
            .iter()
            .enumerate()
            .filter(|(_, s)| **s != SupernodeId::NONE)
            .map(|(i, _)| NodeId(i as u32))
    }

    pub fn supernode_of(&self, u: NodeId) -> Result<SupernodeId, SummaryError> {
        match self.membership.get(u.index()) {
            Some(s) if *s != SupernodeId::NONE => Ok(*s),
            _ => Err(SummaryError::UnknownNode(u)),
        }
    }

    pub fn degree(&self, u: NodeId) -> Result<u32, SummaryError> {
        self.supernode_of(u)?;
        Ok(self.degree[u.index()])
    }

    pub fn is_live(&self, s: SupernodeId) -> bool {
        self.supernodes
            .get(s.index())
            .is_some_and(|sn| !sn.members.is_empty())
    }

    fn live_supernode(&self, s: SupernodeId) -> Result<&Supernode, SummaryError> {
        match self.supernodes.get(s.index()) {
            Some(sn) if !sn.members.is_empty() => Ok(sn),
            _ => Err(SummaryError::UnknownSupernode(s)),
        }
    }

    /// Live supernode ids in internal slot order.
    pub fn supernodes(&self) -> &[SupernodeId] {
        &self.live
    }

    pub fn members(&self, s: SupernodeId) -> Result<&FxIndexSet<NodeId>, SummaryError> {
        self.live_supernode(s).map(|sn| &sn.members)
    }

    /// One past the largest supernode id ever allocated.
    pub(crate) fn supernode_slots(&self) -> usize {
        self.supernodes.len()
    }

    pub fn supernode_size(&self, s: SupernodeId) -> usize {
        self.supernodes
            .get(s.index())
            .map_or(0, |sn| sn.members.len())
    }

    /// `N(S)`: supernodes joined to `s` by a superedge (possibly `s` itself).
    pub fn superedge_neighbors(&self, s: SupernodeId) -> Result<&FxIndexSet<SupernodeId>, SummaryError> {
        self.live_supernode(s).map(|sn| &sn.superedges)
    }

    /// Supernodes sharing at least one edge with `s`, with the edge counts.
    pub fn edge_connected(&self, s: SupernodeId) -> Result<&FxHashMap<SupernodeId, u32>, SummaryError> {
        self.live_supernode(s).map(|sn| &sn.pairs)
    }

    pub fn cplus(&self, u: NodeId) -> Result<&FxIndexSet<NodeId>, SummaryError> {
        self.supernode_of(u)?;
        Ok(&self.cplus[u.index()])
    }

    pub fn cminus(&self, u: NodeId) -> Result<&FxHashSet<NodeId>, SummaryError> {
        self.supernode_of(u)?;
        Ok(&self.cminus[u.index()])
    }

    pub fn is_superedge(&self, a: SupernodeId, b: SupernodeId) -> bool {
        self.supernodes
            .get(a.index())
            .is_some_and(|sn| sn.superedges.contains(&b))
    }

    /// `|E_AB|`, zero when the pair shares no edge.
    pub fn pair_edge_count(&self, a: SupernodeId, b: SupernodeId) -> u32 {
        self.supernodes
            .get(a.index())
            .and_then(|sn| sn.pairs.get(&b).copied())
            .unwrap_or(0)
    }

    /// Number of edges with at least one endpoint in `s`.
    pub fn incident_edge_count(&self, s: SupernodeId) -> u64 {
        self.supernodes.get(s.index()).map_or(0, |sn| {
            sn.degree_sum - sn.pairs.get(&s).copied().unwrap_or(0) as u64
        })
    }

    /// The encoding chosen for every pair with at least one edge, keyed by
    /// canonical pair.
    pub fn pair_encodings(&self) -> BTreeMap<(SupernodeId, SupernodeId), EncodingDecision> {
        let mut out = BTreeMap::new();
        for &a in &self.live {
            for (&b, &count) in &self.supernodes[a.index()].pairs {
                if a <= b {
                    let potential = potential_edges(
                        self.supernode_size(a) as u64,
                        self.supernode_size(b) as u64,
                        a == b,
                    );
                    let cost = if self.is_superedge(a, b) {
                        1 + potential - count as u64
                    } else {
                        count as u64
                    };
                    out.insert(
                        (a, b),
                        EncodingDecision {
                            use_superedge: self.is_superedge(a, b),
                            cost,
                        },
                    );
                }
            }
        }
        out
    }

    // ---- queries ---------------------------------------------------------

    /// Whether `{u, v}` is an edge of the recovered graph, in expected
    /// constant time.
    pub fn check_adjacency(&self, u: NodeId, v: NodeId) -> Result<bool, SummaryError> {
        self.supernode_of(u)?;
        self.supernode_of(v)?;
        if u == v {
            return Ok(false);
        }
        Ok(self.has_edge(u, v))
    }

    #[inline]
    fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        if self.cminus[u.index()].contains(&v) {
            return false;
        }
        if self.cplus[u.index()].contains(&v) {
            return true;
        }
        let su = self.membership[u.index()];
        let sv = self.membership[v.index()];
        self.supernodes[su.index()].superedges.contains(&sv)
    }

    /// Materializes `N(u)` from the summary and corrections.
    pub fn retrieve_neighborhood(&self, u: NodeId) -> Result<Vec<NodeId>, SummaryError> {
        self.supernode_of(u)?;
        Ok(self.neighbors_of(u))
    }

    pub(crate) fn neighbors_of(&self, u: NodeId) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.degree[u.index()] as usize);
        let su = self.membership[u.index()];
        let cminus = &self.cminus[u.index()];
        for &s in &self.supernodes[su.index()].superedges {
            for &w in &self.supernodes[s.index()].members {
                if w != u && !cminus.contains(&w) {
                    out.push(w);
                }
            }
        }
        out.extend(self.cplus[u.index()].iter().copied());
        out
    }

    /// All edges of the recovered graph as sorted canonical pairs.
    pub fn reconstruct(&self) -> Vec<(NodeId, NodeId)> {
        let mut edges = Vec::with_capacity(self.edge_count as usize);
        for &a in &self.live {
            let sa = &self.supernodes[a.index()];
            for &b in &sa.superedges {
                if b < a {
                    continue;
                }
                let sb = &self.supernodes[b.index()];
                if a == b {
                    let m: Vec<NodeId> = sa.members.iter().copied().collect();
                    for (i, &x) in m.iter().enumerate() {
                        for &y in &m[i + 1..] {
                            if !self.cminus[x.index()].contains(&y) {
                                edges.push(ordered(x, y));
                            }
                        }
                    }
                } else {
                    for &x in &sa.members {
                        for &y in &sb.members {
                            if !self.cminus[x.index()].contains(&y) {
                                edges.push(ordered(x, y));
                            }
                        }
                    }
                }
            }
        }
        for (i, set) in self.cplus.iter().enumerate() {
            let x = NodeId(i as u32);
            for &y in set {
                if x < y {
                    edges.push((x, y));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    // ---- stream updates --------------------------------------------------

    /// Applies one insertion or deletion and re-optimizes the encoding of
    /// the affected supernode pair.
    pub fn process_edge_change(&mut self, event: &StreamEvent) -> Result<(), SummaryError> {
        let (u, v) = event.edge();
        if u == v {
            return Err(SummaryError::SelfLoop(u));
        }
        let present = self.has_node(u) && self.has_node(v) && self.has_edge(u, v);
        match event.kind {
            EventKind::Insert => {
                if present {
                    return Err(SummaryError::DuplicateInsert(u, v));
                }
                self.ensure_node(u);
                self.ensure_node(v);
                self.degree[u.index()] += 1;
                self.degree[v.index()] += 1;
                self.edge_count += 1;
                let (a, b) = (self.membership[u.index()], self.membership[v.index()]);
                self.supernodes[a.index()].degree_sum += 1;
                self.supernodes[b.index()].degree_sum += 1;
                if self.is_superedge(a, b) {
                    self.remove_cminus(u, v);
                } else {
                    self.add_cplus(u, v);
                }
                self.adjust_pair_count(a, b, 1);
                self.redecide(a, b, None);
            }
            EventKind::Delete => {
                if !present {
                    return Err(SummaryError::MissingDelete(u, v));
                }
                self.degree[u.index()] -= 1;
                self.degree[v.index()] -= 1;
                self.edge_count -= 1;
                let (a, b) = (self.membership[u.index()], self.membership[v.index()]);
                self.supernodes[a.index()].degree_sum -= 1;
                self.supernodes[b.index()].degree_sum -= 1;
                if self.is_superedge(a, b) {
                    self.add_cminus(u, v);
                } else {
                    self.remove_cplus(u, v);
                }
                self.adjust_pair_count(a, b, -1);
                self.redecide(a, b, None);
            }
        }
        Ok(())
    }

    /// Registers `u` as a singleton supernode if it has not been seen yet.
    pub fn ensure_node(&mut self, u: NodeId) {
        let i = u.index();
        if i >= self.membership.len() {
            self.membership.resize(i + 1, SupernodeId::NONE);
            self.degree.resize(i + 1, 0);
            self.cplus.resize_with(i + 1, Default::default);
            self.cminus.resize_with(i + 1, Default::default);
        }
        if self.membership[i] == SupernodeId::NONE {
            let s = self.alloc_supernode();
            self.supernodes[s.index()].members.insert(u);
            self.membership[i] = s;
            self.node_count += 1;
        }
    }

    // ---- relocation ------------------------------------------------------

    pub(crate) fn resolve_move(
        &self,
        y: NodeId,
        dest: Destination,
    ) -> Result<Option<(SupernodeId, Option<SupernodeId>)>, SummaryError> {
        let from = self.supernode_of(y)?;
        match dest {
            Destination::Supernode(z) => {
                self.live_supernode(z)?;
                if z == from {
                    Ok(None)
                } else {
                    Ok(Some((from, Some(z))))
                }
            }
            Destination::NewSingleton => {
                if self.supernode_size(from) == 1 {
                    Ok(None)
                } else {
                    Ok(Some((from, None)))
                }
            }
        }
    }

    /// Counts of `y`'s neighbors per supernode.
    pub(crate) fn neighbor_profile(&self, y: NodeId) -> FxHashMap<SupernodeId, u32> {
        let sy = self.membership[y.index()];
        let cap = self.supernodes[sy.index()].superedges.len() + self.cplus[y.index()].len();
        let mut profile = FxHashMap::with_capacity_and_hasher(cap, Default::default());
        let cminus = &self.cminus[y.index()];
        for &s in &self.supernodes[sy.index()].superedges {
            let members = &self.supernodes[s.index()].members;
            let mut n = members.len() as u32;
            if s == sy {
                n -= 1;
            }
            if n > 0 {
                profile.insert(s, n);
            }
        }
        for &w in cminus {
            let s = self.membership[w.index()];
            let slot = profile.get_mut(&s).expect("C- entry outside a superedge pair");
            *slot -= 1;
            if *slot == 0 {
                profile.remove(&s);
            }
        }
        for &w in &self.cplus[y.index()] {
            *profile.entry(self.membership[w.index()]).or_insert(0) += 1;
        }
        profile
    }

    /// Change in phi if `y` were moved to `dest`; the state is untouched.
    pub fn delta_phi(&self, y: NodeId, dest: Destination) -> Result<i64, SummaryError> {
        let Some((from, to)) = self.resolve_move(y, dest)? else {
            return Ok(0);
        };
        let profile = self.neighbor_profile(y);
        Ok(self.delta_with_profile(from, to, &profile))
    }

    pub(crate) fn delta_with_profile(
        &self,
        x: SupernodeId,
        z: Option<SupernodeId>,
        profile: &FxHashMap<SupernodeId, u32>,
    ) -> i64 {
        let empty = FxHashMap::default();
        let sx = self.supernode_size(x) as u64;
        let (sz, z_pairs) = match z {
            Some(z) => (self.supernode_size(z) as u64, &self.supernodes[z.index()].pairs),
            None => (0, &empty),
        };
        let x_pairs = &self.supernodes[x.index()].pairs;
        let d = |s: SupernodeId| profile.get(&s).copied().unwrap_or(0) as u64;
        let ex = |s: SupernodeId| x_pairs.get(&s).copied().unwrap_or(0) as u64;
        let ez = |s: SupernodeId| z_pairs.get(&s).copied().unwrap_or(0) as u64;
        let dx = d(x);
        let dz = z.map_or(0, d);

        let mut before = 0u64;
        let mut after = 0u64;
        // pairs among the two endpoints of the move
        before += pair_cost(sx, sx, ex(x), true);
        after += pair_cost(sx - 1, sx - 1, ex(x) - dx, true);
        if let Some(z) = z {
            before += pair_cost(sz, sz, ez(z), true);
            after += pair_cost(sz + 1, sz + 1, ez(z) + dz, true);
            let exz = ex(z);
            before += pair_cost(sx, sz, exz, false);
            after += pair_cost(sx - 1, sz + 1, exz - dz + dx, false);
        } else {
            // y's edges into the rest of X become edges between X and {y}
            after += pair_cost(sx - 1, 1, dx, false);
        }
        let is_endpoint = |s: SupernodeId| s == x || Some(s) == z;
        for (&b, &cxb) in x_pairs {
            if is_endpoint(b) {
                continue;
            }
            let sb = self.supernode_size(b) as u64;
            let (cxb, czb, db) = (cxb as u64, ez(b), d(b));
            before += pair_cost(sx, sb, cxb, false) + pair_cost(sz, sb, czb, false);
            after += pair_cost(sx - 1, sb, cxb - db, false) + pair_cost(sz + 1, sb, czb + db, false);
        }
        for (&b, &czb) in z_pairs {
            if is_endpoint(b) || x_pairs.contains_key(&b) {
                continue;
            }
            let sb = self.supernode_size(b) as u64;
            let czb = czb as u64;
            before += pair_cost(sz, sb, czb, false);
            after += pair_cost(sz + 1, sb, czb, false);
        }
        after as i64 - before as i64
    }

    /// Moves `y` into `dest`, re-encodes every affected pair, and returns
    /// the realized change in phi.
    pub fn move_node(&mut self, y: NodeId, dest: Destination) -> Result<i64, SummaryError> {
        let Some((x, to)) = self.resolve_move(y, dest)? else {
            return Ok(0);
        };
        let profile = self.neighbor_profile(y);
        Ok(self.apply_move(y, x, to, &profile))
    }

    /// Moves `y` to `dest` only if that does not increase phi. Returns the
    /// change in phi the move has (or would have had) and whether it was
    /// made.
    pub(crate) fn move_if_not_worse(
        &mut self,
        y: NodeId,
        dest: Destination,
    ) -> Result<(i64, bool), SummaryError> {
        let Some((x, to)) = self.resolve_move(y, dest)? else {
            return Ok((0, true));
        };
        let profile = self.neighbor_profile(y);
        let delta = self.delta_with_profile(x, to, &profile);
        if delta > 0 {
            return Ok((delta, false));
        }
        let realized = self.apply_move(y, x, to, &profile);
        debug_assert_eq!(realized, delta);
        Ok((delta, true))
    }

    pub(crate) fn apply_move(
        &mut self,
        y: NodeId,
        x: SupernodeId,
        to: Option<SupernodeId>,
        profile: &FxHashMap<SupernodeId, u32>,
    ) -> i64 {
        let phi_before = self.phi() as i64;
        let z = match to {
            Some(z) => z,
            None => self.alloc_supernode(),
        };
        let mut nbrs = self.neighbors_of(y);

        // detach y from every correction it takes part in
        for w in std::mem::take(&mut self.cplus[y.index()]) {
            self.cplus[w.index()].swap_remove(&y);
            self.cplus_count -= 1;
        }
        for w in std::mem::take(&mut self.cminus[y.index()]) {
            self.cminus[w.index()].remove(&y);
            self.cminus_count -= 1;
        }
        for (&b, &k) in profile {
            self.adjust_pair_count(x, b, -(k as i64));
        }
        let deg_y = self.degree[y.index()] as u64;
        self.supernodes[x.index()].members.swap_remove(&y);
        self.supernodes[x.index()].degree_sum -= deg_y;
        self.membership[y.index()] = SupernodeId::NONE;

        if self.supernodes[x.index()].members.is_empty() {
            let stale: Vec<SupernodeId> = self.supernodes[x.index()].superedges.iter().copied().collect();
            for b in stale {
                self.set_superedge(x, b, false);
            }
            debug_assert!(self.supernodes[x.index()].pairs.is_empty());
            self.free_supernode(x);
        } else {
            for b in self.pair_keys(x) {
                self.redecide(x, b, None);
            }
        }

        // attach y to z
        self.supernodes[z.index()].members.insert(y);
        self.supernodes[z.index()].degree_sum += deg_y;
        self.membership[y.index()] = z;
        for (&b, &k) in profile {
            self.adjust_pair_count(z, b, k as i64);
        }
        let z_keys = self.pair_keys(z);
        for &b in &z_keys {
            self.redecide(z, b, Some(y));
        }
        nbrs.sort_unstable();
        for &b in &z_keys {
            if !self.is_superedge(z, b) {
                continue;
            }
            let members: Vec<NodeId> = self.supernodes[b.index()].members.iter().copied().collect();
            for m in members {
                if m != y && nbrs.binary_search(&m).is_err() {
                    self.add_cminus(y, m);
                }
            }
        }
        for &w in &nbrs {
            if !self.is_superedge(z, self.membership[w.index()]) {
                self.add_cplus(y, w);
            }
        }
        self.phi() as i64 - phi_before
    }

    fn pair_keys(&self, s: SupernodeId) -> Vec<SupernodeId> {
        let sn = &self.supernodes[s.index()];
        let mut keys: Vec<SupernodeId> = sn.pairs.keys().copied().collect();
        for b in &sn.superedges {
            if !sn.pairs.contains_key(b) {
                keys.push(*b);
            }
        }
        keys
    }

    // ---- encoding maintenance -------------------------------------------

    /// Re-applies the optimal rule to pair `(a, b)`, rewriting its
    /// corrections if the choice flips. `skip` is a node whose corrections
    /// are currently detached and must not be touched.
    fn redecide(&mut self, a: SupernodeId, b: SupernodeId, skip: Option<NodeId>) {
        let count = self.pair_edge_count(a, b) as u64;
        let want = if count == 0 {
            false
        } else {
            let potential = potential_edges(
                self.supernode_size(a) as u64,
                self.supernode_size(b) as u64,
                a == b,
            );
            decide(potential, count).use_superedge
        };
        if want == self.is_superedge(a, b) {
            return;
        }
        let ma: Vec<NodeId> = self.supernodes[a.index()].members.iter().copied().collect();
        let mb: Vec<NodeId> = if a == b {
            Vec::new()
        } else {
            self.supernodes[b.index()].members.iter().copied().collect()
        };
        let flip = |this: &mut Self, x: NodeId, w: NodeId| {
            if Some(x) == skip || Some(w) == skip {
                return;
            }
            if want {
                // plain -> superedge: C+ entries vanish, non-edges enter C-
                if this.cplus[x.index()].contains(&w) {
                    this.remove_cplus(x, w);
                } else {
                    this.add_cminus(x, w);
                }
            } else if this.cminus[x.index()].contains(&w) {
                this.remove_cminus(x, w);
            } else {
                this.add_cplus(x, w);
            }
        };
        if a == b {
            for (i, &x) in ma.iter().enumerate() {
                for &w in &ma[i + 1..] {
                    flip(self, x, w);
                }
            }
        } else {
            for &x in &ma {
                for &w in &mb {
                    flip(self, x, w);
                }
            }
        }
        self.set_superedge(a, b, want);
    }

    fn adjust_pair_count(&mut self, a: SupernodeId, b: SupernodeId, delta: i64) {
        if delta == 0 {
            return;
        }
        let mut bump = |from: SupernodeId, to: SupernodeId| -> (bool, bool) {
            let pairs = &mut self.supernodes[from.index()].pairs;
            let slot = pairs.entry(to).or_insert(0);
            let was_zero = *slot == 0;
            let next = *slot as i64 + delta;
            debug_assert!(next >= 0);
            *slot = next as u32;
            let now_zero = next == 0;
            if now_zero {
                pairs.remove(&to);
            }
            (was_zero, now_zero)
        };
        let (was_zero, now_zero) = bump(a, b);
        if a != b {
            bump(b, a);
        }
        if was_zero && !now_zero {
            self.pair_entries += 1;
        } else if !was_zero && now_zero {
            self.pair_entries -= 1;
        }
    }

    fn set_superedge(&mut self, a: SupernodeId, b: SupernodeId, on: bool) {
        if on {
            if self.supernodes[a.index()].superedges.insert(b) {
                self.superedge_count += 1;
                if a != b {
                    self.supernodes[b.index()].superedges.insert(a);
                }
            }
        } else if self.supernodes[a.index()].superedges.swap_remove(&b) {
            self.superedge_count -= 1;
            if a != b {
                self.supernodes[b.index()].superedges.swap_remove(&a);
            }
        }
    }

    fn add_cplus(&mut self, x: NodeId, w: NodeId) {
        if self.cplus[x.index()].insert(w) {
            self.cplus[w.index()].insert(x);
            self.cplus_count += 1;
        }
    }

    fn remove_cplus(&mut self, x: NodeId, w: NodeId) {
        if self.cplus[x.index()].swap_remove(&w) {
            self.cplus[w.index()].swap_remove(&x);
            self.cplus_count -= 1;
        }
    }

    fn add_cminus(&mut self, x: NodeId, w: NodeId) {
        if self.cminus[x.index()].insert(w) {
            self.cminus[w.index()].insert(x);
            self.cminus_count += 1;
        }
    }

    fn remove_cminus(&mut self, x: NodeId, w: NodeId) {
        if self.cminus[x.index()].remove(&w) {
            self.cminus[w.index()].remove(&x);
            self.cminus_count -= 1;
        }
    }

    // ---- supernode slots -------------------------------------------------

    fn alloc_supernode(&mut self) -> SupernodeId {
        let id = match self.free_ids.pop() {
            Some(id) => id,
            None => {
                self.supernodes.push(Supernode::default());
                SupernodeId((self.supernodes.len() - 1) as u32)
            }
        };
        self.supernodes[id.index()].live_pos = self.live.len();
        self.live.push(id);
        id
    }

    fn free_supernode(&mut self, id: SupernodeId) {
        let sn = &mut self.supernodes[id.index()];
        debug_assert!(sn.members.is_empty() && sn.superedges.is_empty() && sn.pairs.is_empty());
        let pos = sn.live_pos;
        *sn = Supernode::default();
        self.live.swap_remove(pos);
        if let Some(&moved) = self.live.get(pos) {
            self.supernodes[moved.index()].live_pos = pos;
        }
        self.free_ids.push(id);
    }

    // ---- snapshot support ------------------------------------------------

    /// Builds a state from an explicit partition, superedge set and
    /// corrections. Edge counts and degrees are derived; the encoding must
    /// already be per-pair optimal.
    pub(crate) fn from_parts(
        partition: &[(SupernodeId, Vec<NodeId>)],
        superedges: &[(SupernodeId, SupernodeId)],
        cplus: &[(NodeId, NodeId)],
        cminus: &[(NodeId, NodeId)],
    ) -> Result<Self, String> {
        let mut state = Summary::new();
        let max_node = partition
            .iter()
            .flat_map(|(_, m)| m.iter())
            .map(|u| u.index())
            .max();
        let max_sn = partition.iter().map(|(s, _)| s.index()).max();
        if let Some(n) = max_node {
            state.membership = vec![SupernodeId::NONE; n + 1];
            state.degree = vec![0; n + 1];
            state.cplus.resize_with(n + 1, Default::default);
            state.cminus.resize_with(n + 1, Default::default);
        }
        if let Some(n) = max_sn {
            state.supernodes.resize_with(n + 1, Default::default);
        }
        for (s, members) in partition {
            if members.is_empty() {
                return Err(format!("supernode {s} has no members"));
            }
            if !state.supernodes[s.index()].members.is_empty() {
                return Err(format!("supernode {s} listed twice"));
            }
            for &u in members {
                if state.membership[u.index()] != SupernodeId::NONE {
                    return Err(format!("node {u} appears in two supernodes"));
                }
                state.membership[u.index()] = *s;
                state.supernodes[s.index()].members.insert(u);
                state.node_count += 1;
            }
        }
        let mut ids: Vec<SupernodeId> = partition.iter().map(|(s, _)| *s).collect();
        ids.sort_unstable();
        for s in ids {
            state.supernodes[s.index()].live_pos = state.live.len();
            state.live.push(s);
        }
        for i in (0..state.supernodes.len()).rev() {
            if state.supernodes[i].members.is_empty() {
                state.free_ids.push(SupernodeId(i as u32));
            }
        }
        for &(a, b) in superedges {
            if !state.is_live(a) || !state.is_live(b) {
                return Err(format!("superedge {a} {b} references an unknown supernode"));
            }
            if state.is_superedge(a, b) {
                return Err(format!("superedge {a} {b} listed twice"));
            }
            state.set_superedge(a, b, true);
        }
        for &(u, v) in cplus.iter().chain(cminus) {
            if u == v || !state.has_node(u) || !state.has_node(v) {
                return Err(format!("correction {u} {v} references an unknown node or is a loop"));
            }
        }
        for &(u, v) in cplus {
            if state.is_superedge(state.membership[u.index()], state.membership[v.index()]) {
                return Err(format!("C+ entry {u} {v} lies inside a superedge pair"));
            }
            if state.cplus[u.index()].contains(&v) {
                return Err(format!("C+ entry {u} {v} listed twice"));
            }
            state.add_cplus(u, v);
        }
        for &(u, v) in cminus {
            if !state.is_superedge(state.membership[u.index()], state.membership[v.index()]) {
                return Err(format!("C- entry {u} {v} lies outside every superedge pair"));
            }
            if state.cminus[u.index()].contains(&v) {
                return Err(format!("C- entry {u} {v} listed twice"));
            }
            state.add_cminus(u, v);
        }
        for (u, v) in state.reconstruct() {
            state.degree[u.index()] += 1;
            state.degree[v.index()] += 1;
            state.edge_count += 1;
            let (a, b) = (state.membership[u.index()], state.membership[v.index()]);
            state.supernodes[a.index()].degree_sum += 1;
            state.supernodes[b.index()].degree_sum += 1;
            state.adjust_pair_count(a, b, 1);
        }
        for (pair, enc) in state.pair_encodings() {
            let count = state.pair_edge_count(pair.0, pair.1) as u64;
            let potential = potential_edges(
                state.supernode_size(pair.0) as u64,
                state.supernode_size(pair.1) as u64,
                pair.0 == pair.1,
            );
            if decide(potential, count).use_superedge != enc.use_superedge {
                return Err(format!(
                    "pair ({}, {}) is not optimally encoded",
                    pair.0, pair.1
                ));
            }
        }
        // superedges covering zero edges are never optimal
        for &(a, b) in superedges {
            if state.pair_edge_count(a, b) == 0 {
                return Err(format!("superedge {a} {b} covers no edge"));
            }
        }
        Ok(state)
    }

    // ---- verification ----------------------------------------------------

    /// Recomputes every maintained quantity from scratch and reports the
    /// first disagreement.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen = 0usize;
        for &s in &self.live {
            let sn = &self.supernodes[s.index()];
            if sn.members.is_empty() {
                return Err(format!("live supernode {s} is empty"));
            }
            for &u in &sn.members {
                if self.membership.get(u.index()) != Some(&s) {
                    return Err(format!("node {u} listed in {s} but mapped elsewhere"));
                }
                seen += 1;
            }
        }
        if seen != self.node_count || self.nodes().count() != self.node_count {
            return Err(format!("partition covers {seen} nodes, expected {}", self.node_count));
        }
        let edges = self.reconstruct();
        if edges.len() as u64 != self.edge_count {
            return Err(format!(
                "recovered {} edges, counter says {}",
                edges.len(),
                self.edge_count
            ));
        }
        let mut degree = vec![0u32; self.membership.len()];
        let mut counts: FxHashMap<(SupernodeId, SupernodeId), u32> = FxHashMap::default();
        for &(u, v) in &edges {
            degree[u.index()] += 1;
            degree[v.index()] += 1;
            let key = ordered(self.membership[u.index()], self.membership[v.index()]);
            *counts.entry(key).or_insert(0) += 1;
        }
        if degree != self.degree {
            return Err("degree counters disagree with recovered graph".into());
        }
        let mut pair_entries = 0u64;
        for &a in &self.live {
            for (&b, &c) in &self.supernodes[a.index()].pairs {
                if counts.get(&ordered(a, b)).copied() != Some(c) {
                    return Err(format!("pair ({a}, {b}) count {c} is stale"));
                }
                if self.pair_edge_count(b, a) != c {
                    return Err(format!("pair ({a}, {b}) count is asymmetric"));
                }
                if a <= b {
                    pair_entries += 1;
                }
            }
        }
        if pair_entries as usize != counts.len() || pair_entries != self.pair_entries {
            return Err("pair counter table is incomplete".into());
        }
        let mut superedges = 0u64;
        for &a in &self.live {
            for &b in &self.supernodes[a.index()].superedges {
                if !self.is_superedge(b, a) {
                    return Err(format!("superedge ({a}, {b}) is asymmetric"));
                }
                if a <= b {
                    superedges += 1;
                }
            }
        }
        for (&(a, b), &c) in &counts {
            let potential = potential_edges(
                self.supernode_size(a) as u64,
                self.supernode_size(b) as u64,
                a == b,
            );
            if decide(potential, c as u64).use_superedge != self.is_superedge(a, b) {
                return Err(format!("pair ({a}, {b}) with {c} edges is not optimally encoded"));
            }
        }
        let (mut cplus, mut cminus) = (0u64, 0u64);
        for u in self.nodes() {
            let su = self.membership[u.index()];
            for &w in &self.cplus[u.index()] {
                if !self.cplus[w.index()].contains(&u) {
                    return Err(format!("C+ entry ({u}, {w}) is asymmetric"));
                }
                if self.is_superedge(su, self.membership[w.index()]) {
                    return Err(format!("C+ entry ({u}, {w}) inside a superedge pair"));
                }
                if self.cminus[u.index()].contains(&w) {
                    return Err(format!("({u}, {w}) in both C+ and C-"));
                }
                if u < w {
                    cplus += 1;
                }
            }
            for &w in &self.cminus[u.index()] {
                if !self.cminus[w.index()].contains(&u) {
                    return Err(format!("C- entry ({u}, {w}) is asymmetric"));
                }
                if !self.is_superedge(su, self.membership[w.index()]) {
                    return Err(format!("C- entry ({u}, {w}) outside superedge pairs"));
                }
                if u < w {
                    cminus += 1;
                }
            }
        }
        if (superedges, cplus, cminus)
            != (self.superedge_count, self.cplus_count, self.cminus_count)
        {
            return Err(format!(
                "phi counters ({}, {}, {}) disagree with recount ({superedges}, {cplus}, {cminus})",
                self.superedge_count, self.cplus_count, self.cminus_count
            ));
        }
        if self.phi() > self.edge_count {
            return Err(format!("phi {} exceeds |E| {}", self.phi(), self.edge_count));
        }
        for (pos, &s) in self.live.iter().enumerate() {
            let sn = &self.supernodes[s.index()];
            if sn.live_pos != pos {
                return Err(format!("live index of {s} is stale"));
            }
            let sum: u64 = sn.members.iter().map(|u| self.degree[u.index()] as u64).sum();
            if sum != sn.degree_sum {
                return Err(format!("degree sum of {s} is stale"));
            }
        }
        Ok(())
    }

    /// Order-independent view used for structural comparison.
    #[allow(clippy::type_complexity)]
    pub fn canonical(
        &self,
    ) -> (
        Vec<(SupernodeId, Vec<NodeId>)>,
        Vec<(SupernodeId, SupernodeId)>,
        Vec<(NodeId, NodeId)>,
        Vec<(NodeId, NodeId)>,
    ) {
        let mut partition: Vec<(SupernodeId, Vec<NodeId>)> = self
            .live
            .iter()
            .map(|&s| {
                let mut m: Vec<NodeId> = self.supernodes[s.index()].members.iter().copied().collect();
                m.sort_unstable();
                (s, m)
            })
            .collect();
        partition.sort_unstable();
        let mut superedges = Vec::new();
        for &a in &self.live {
            for &b in &self.supernodes[a.index()].superedges {
                if a <= b {
                    superedges.push((a, b));
                }
            }
        }
        superedges.sort_unstable();
        let collect = |sets: &mut dyn Iterator<Item = (usize, Vec<NodeId>)>| {
            let mut out = Vec::new();
            for (i, ws) in sets {
                let u = NodeId(i as u32);
                for w in ws {
                    if u < w {
                        out.push((u, w));
                    }
                }
            }
            out.sort_unstable();
            out
        };
        let cplus = collect(
            &mut self
                .cplus
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.iter().copied().collect())),
        );
        let cminus = collect(
            &mut self
                .cminus
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.iter().copied().collect())),
        );
        (partition, superedges, cplus, cminus)
    }
}

impl PartialEq for Summary {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count
            && self.edge_count == other.edge_count
            && self.nodes().eq(other.nodes())
            && self.nodes().all(|u| self.degree[u.index()] == other.degree[u.index()])
            && self.canonical() == other.canonical()
    }
}

impl Eq for Summary {}
