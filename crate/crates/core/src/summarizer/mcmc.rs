use rand::Rng;
use rustc_hash::FxHashMap;

use super::{RunConfig, TrialOutcome};
use crate::error::SummaryError;
use crate::summary::Summary;
use crate::types::{Destination, NodeId, StreamEvent, SupernodeId};

/// MoSSo-MCMC: every neighbor of an input node is tested; candidates come
/// from the edge-weighted proposal and are accepted Metropolis-Hastings
/// style.
pub fn mcmc_step<R: Rng + ?Sized>(
    state: &mut Summary,
    config: &RunConfig,
    event: &StreamEvent,
    rng: &mut R,
    outcomes: &mut Vec<TrialOutcome>,
) -> Result<(), SummaryError> {
    state.process_edge_change(event)?;
    let eps = config.mcmc_epsilon;

    for u in [event.u, event.v] {
        for y in state.retrieve_neighborhood(u)? {
            let sy = state.supernode_of(y)?;
            let profile = state.neighbor_profile(y);
            let sx = anchor_supernode(state, y, &profile, rng)?;
            let sz = sample_proposal(state, sx, eps, rng)?;
            if sz == sy {
                outcomes.push(TrialOutcome {
                    testing_node: y,
                    proposal: Destination::Supernode(sz),
                    delta: 0,
                    accepted: true,
                });
                continue;
            }

            let delta = state.delta_with_profile(sy, Some(sz), &profile);
            let (forward, reverse) = proposal_sums(state, y, &profile, sy, sz, eps)?;
            let p = mcmc_acceptance(delta, forward, reverse, config.mcmc_beta);
            let accepted = rng.gen::<f64>() < p;
            if accepted {
                state.apply_move(y, sy, Some(sz), &profile);
            }
            outcomes.push(TrialOutcome {
                testing_node: y,
                proposal: Destination::Supernode(sz),
                delta,
                accepted,
            });
        }
    }
    Ok(())
}

/// Supernode of a uniform neighbor of `y`, drawn from the per-supernode
/// neighbor counts.
fn anchor_supernode<R: Rng + ?Sized>(
    state: &Summary,
    y: NodeId,
    profile: &FxHashMap<SupernodeId, u32>,
    rng: &mut R,
) -> Result<SupernodeId, SummaryError> {
    let mut r = rng.gen_range(0..state.degree(y)?);
    for (&s, &k) in profile {
        if r < k {
            return Ok(s);
        }
        r -= k;
    }
    Err(SummaryError::Integrity(format!(
        "neighbor counts of {y} do not add up to its degree"
    )))
}

/// `min(1, exp(-beta * delta) * reverse / forward)`.
pub fn mcmc_acceptance(delta: i64, forward: f64, reverse: f64, beta: f64) -> f64 {
    let ratio = (-beta * delta as f64).exp() * reverse / forward;
    if ratio.is_nan() {
        return 0.0;
    }
    ratio.min(1.0)
}

/// Probability of proposing each live supernode given the anchor supernode
/// `sx`: `(|E_{Z,X}| + eps) / (|E_X| + eps * |S|)`.
pub fn proposal_distribution(
    state: &Summary,
    sx: SupernodeId,
    eps: f64,
) -> Result<Vec<(SupernodeId, f64)>, SummaryError> {
    let pairs = state.edge_connected(sx)?;
    let total = state.incident_edge_count(sx) as f64 + eps * state.supernode_count() as f64;
    Ok(state
        .supernodes()
        .iter()
        .map(|&z| {
            let e = pairs.get(&z).copied().unwrap_or(0) as f64;
            (z, (e + eps) / total)
        })
        .collect())
}

/// Draws one supernode from [`proposal_distribution`] without building it.
pub fn sample_proposal<R: Rng + ?Sized>(
    state: &Summary,
    sx: SupernodeId,
    eps: f64,
    rng: &mut R,
) -> Result<SupernodeId, SummaryError> {
    let pairs = state.edge_connected(sx)?;
    let incident = state.incident_edge_count(sx) as f64;
    let live = state.supernodes();
    let r = rng.gen::<f64>() * (incident + eps * live.len() as f64);
    if r < incident {
        let mut acc = 0.0;
        let mut last = sx;
        for (&z, &e) in pairs {
            acc += e as f64;
            last = z;
            if r < acc {
                return Ok(z);
            }
        }
        return Ok(last);
    }
    Ok(live[rng.gen_range(0..live.len())])
}

/// Forward and reverse proposal mass for moving `y` from `sy` to `sz`,
/// each summed over the supernodes holding `y`'s neighbors and weighted by
/// the share of `y`'s neighbors inside them. The reverse terms use the
/// counts as they would be after the move.
fn proposal_sums(
    state: &Summary,
    y: NodeId,
    profile: &FxHashMap<SupernodeId, u32>,
    sy: SupernodeId,
    sz: SupernodeId,
    eps: f64,
) -> Result<(f64, f64), SummaryError> {
    let deg = state.degree(y)? as f64;
    let d = |s: SupernodeId| profile.get(&s).copied().unwrap_or(0) as u64;
    let count = |a: SupernodeId, b: SupernodeId| state.pair_edge_count(a, b) as u64;
    let live = state.supernode_count() as f64;
    let live_after = live - if state.supernode_size(sy) == 1 { 1.0 } else { 0.0 };
    let y_deg = state.degree(y)? as u64;

    let mut forward = 0.0;
    let mut reverse = 0.0;
    for (&b, &k) in profile {
        let weight = k as f64 / deg;
        let incident = state.incident_edge_count(b);
        forward += weight * (count(sz, b) as f64 + eps) / (incident as f64 + eps * live);

        let (e_after, incident_after) = if b == sy {
            (count(sy, sy) - d(sy), incident - y_deg + d(sy))
        } else if b == sz {
            (count(sy, sz) - d(sz) + d(sy), incident + y_deg - d(sz))
        } else {
            (count(sy, b) - d(b), incident)
        };
        reverse +=
            weight * (e_after as f64 + eps) / (incident_after as f64 + eps * live_after);
    }
    Ok((forward, reverse))
}
