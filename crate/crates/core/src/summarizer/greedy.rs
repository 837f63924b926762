use super::TrialOutcome;
use crate::error::SummaryError;
use crate::summary::{pair_cost, Summary};
use crate::types::{Destination, NodeId, StreamEvent, SupernodeId};

/// MoSSo-Greedy: each input node moves to whichever supernode (or fresh
/// singleton) minimizes phi, provided that does not increase it.
pub fn greedy_step(
    state: &mut Summary,
    event: &StreamEvent,
    outcomes: &mut Vec<TrialOutcome>,
) -> Result<(), SummaryError> {
    state.process_edge_change(event)?;
    for u in [event.u, event.v] {
        let (proposal, delta) = best_destination(state, u)?;
        if delta <= 0 {
            state.move_node(u, proposal)?;
        }
        outcomes.push(TrialOutcome {
            testing_node: u,
            proposal,
            delta,
            accepted: delta <= 0,
        });
    }
    Ok(())
}

/// The phi-minimizing destination for `y` over every live supernode and a
/// fresh singleton. Ties prefer staying put, then the smallest supernode
/// id, then the singleton.
///
/// The scan works on the state with `y` lifted out of its supernode `X`.
/// Placing `y` into a supernode `Z` costs `deg(y) - d(Z)` plus corrections
/// that are only nonzero for supernodes sharing edges with `y`'s neighbor
/// supernodes or holding superedges, so untouched supernodes are never
/// visited individually.
pub fn best_destination(state: &Summary, y: NodeId) -> Result<(Destination, i64), SummaryError> {
    let x = state.supernode_of(y)?;
    let deg = state.degree(y)? as i64;
    let profile = state.neighbor_profile(y);
    let d = |s: SupernodeId| profile.get(&s).copied().unwrap_or(0) as u64;
    let size = |s: SupernodeId| state.supernode_size(s) as u64;
    let sx = size(x);
    let x_pairs = state.edge_connected(x)?;
    // sizes with y lifted out
    let lifted = |s: SupernodeId| if s == x { sx - 1 } else { size(s) };

    let add_singleton: i64 = profile
        .iter()
        .map(|(&b, &k)| pair_cost(1, lifted(b), k as u64, false) as i64)
        .sum();
    let add_back: i64 = if sx == 1 {
        add_singleton
    } else {
        let mut total = 0i64;
        for (&b, &e) in x_pairs {
            let e = e as u64;
            total += if b == x {
                pair_cost(sx, sx, e, true) as i64 - pair_cost(sx - 1, sx - 1, e - d(x), true) as i64
            } else {
                pair_cost(sx, size(b), e, false) as i64
                    - pair_cost(sx - 1, size(b), e - d(b), false) as i64
            };
        }
        total
    };

    let mut corr = vec![0i64; state.supernode_slots()];
    // pairs (Z, B) where B holds neighbors of y, or B is what is left of X
    let mut sources: Vec<SupernodeId> = profile.keys().copied().collect();
    if sx > 1 && !profile.contains_key(&x) {
        sources.push(x);
    }
    for b in sources {
        let b_size = lifted(b);
        let db = d(b);
        for (&z, &e) in state.edge_connected(b)? {
            if z == x || z == b {
                continue;
            }
            let e = if b == x { e as u64 - d(z) } else { e as u64 };
            if e == 0 {
                continue;
            }
            let sz = size(z);
            let change = pair_cost(sz + 1, b_size, e + db, false) as i64
                - pair_cost(sz, b_size, e, false) as i64
                - db as i64;
            corr[z.index()] += change;
        }
    }
    // self pairs of supernodes holding neighbors of y
    for (&z, &k) in &profile {
        if z == x {
            continue;
        }
        let (sz, e) = (size(z), state.pair_edge_count(z, z) as u64);
        let change = pair_cost(sz + 1, sz + 1, e + k as u64, true) as i64
            - pair_cost(sz, sz, e, true) as i64;
        corr[z.index()] += change;
    }
    // superedges untouched by y's neighbors still grow with Z
    for &z in state.supernodes() {
        if z == x {
            continue;
        }
        let sz = size(z);
        for &b in state.superedge_neighbors(z)? {
            if b == x || profile.contains_key(&b) {
                continue;
            }
            let change = if b == z {
                let e = state.pair_edge_count(z, z) as u64;
                pair_cost(sz + 1, sz + 1, e, true) as i64 - pair_cost(sz, sz, e, true) as i64
            } else {
                let e = state.pair_edge_count(z, b) as u64;
                pair_cost(sz + 1, size(b), e, false) as i64 - pair_cost(sz, size(b), e, false) as i64
            };
            corr[z.index()] += change;
        }
    }

    let mut best = (Destination::Supernode(x), 0i64);
    for &z in state.supernodes() {
        if z == x {
            continue;
        }
        let add = deg - d(z) as i64 + corr[z.index()];
        let delta = add - add_back;
        let better = match best.0 {
            _ if delta < best.1 => true,
            Destination::Supernode(cur) if delta == best.1 => cur != x && z < cur,
            _ => false,
        };
        if better {
            best = (Destination::Supernode(z), delta);
        }
    }
    let singleton_delta = add_singleton - add_back;
    if singleton_delta < best.1 {
        best = (Destination::NewSingleton, singleton_delta);
    }
    Ok(best)
}
