use rand::Rng;

use super::mosso::pick_excluding;
use super::{try_move, RunConfig, TrialOutcome};
use crate::error::SummaryError;
use crate::summary::Summary;
use crate::types::{Destination, StreamEvent};

/// MoSSo-Simple: the testing pool is drawn from the materialized
/// neighborhood and every neighbor of `u` is a candidate.
pub fn mosso_simple_step<R: Rng + ?Sized>(
    state: &mut Summary,
    config: &RunConfig,
    event: &StreamEvent,
    rng: &mut R,
    outcomes: &mut Vec<TrialOutcome>,
) -> Result<(), SummaryError> {
    state.process_edge_change(event)?;

    for u in [event.u, event.v] {
        let neighbors = state.retrieve_neighborhood(u)?;
        if neighbors.is_empty() {
            continue;
        }
        let mut testing = Vec::new();
        for _ in 0..config.sample_count {
            let w = neighbors[rng.gen_range(0..neighbors.len())];
            if rng.gen_range(0..state.degree(w)?) == 0 {
                testing.push(w);
            }
        }
        for y in testing {
            let proposal = if rng.gen::<f64>() < config.escape_prob {
                Destination::NewSingleton
            } else {
                match pick_excluding(&neighbors, y, rng) {
                    Some(z) => Destination::Supernode(state.supernode_of(z)?),
                    None => continue,
                }
            };
            outcomes.push(try_move(state, y, proposal)?);
        }
    }
    Ok(())
}
