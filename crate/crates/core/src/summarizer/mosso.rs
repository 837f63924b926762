use rand::Rng;

use super::{try_move, RunConfig, TrialOutcome};
use crate::cluster::ClusterIndex;
use crate::error::SummaryError;
use crate::sampling::get_random_neighbor;
use crate::summary::Summary;
use crate::types::{Destination, NodeId, StreamEvent};

/// Full MoSSo: sampled testing pool, degree-filtered testing nodes,
/// candidates restricted to the testing pool within the node's coarse
/// cluster.
pub fn mosso_step<R: Rng + ?Sized>(
    state: &mut Summary,
    index: &mut ClusterIndex,
    config: &RunConfig,
    event: &StreamEvent,
    rng: &mut R,
    outcomes: &mut Vec<TrialOutcome>,
) -> Result<(), SummaryError> {
    state.process_edge_change(event)?;
    index.update_on_change(state, event);

    for u in [event.u, event.v] {
        if state.degree(u)? == 0 {
            continue;
        }
        let pool = get_random_neighbor(state, u, config.sample_count, rng)?;
        let mut testing = Vec::new();
        for &w in &pool {
            let deg = state.degree(w)?;
            if rng.gen_range(0..deg) == 0 {
                testing.push(w);
            }
        }
        if testing.is_empty() {
            continue;
        }

        // distinct pool members grouped by cluster, built on first use
        let mut clusters: Option<PoolClusters> = None;
        for y in testing {
            let proposal = if rng.gen::<f64>() < config.escape_prob {
                Destination::NewSingleton
            } else {
                let clusters = clusters.get_or_insert_with(|| group_by_cluster(index, &pool));
                let candidates = index.signature(y).map_or(&[][..], |sig| clusters.members(sig));
                let z = match pick_excluding(candidates, y, rng) {
                    Some(z) => z,
                    None => continue,
                };
                Destination::Supernode(state.supernode_of(z)?)
            };
            outcomes.push(try_move(state, y, proposal)?);
        }
    }
    Ok(())
}

/// Distinct clustered pool members sorted by (signature, node).
struct PoolClusters {
    signatures: Vec<u64>,
    nodes: Vec<NodeId>,
}

impl PoolClusters {
    fn members(&self, sig: u64) -> &[NodeId] {
        let lo = self.signatures.partition_point(|&s| s < sig);
        let hi = self.signatures.partition_point(|&s| s <= sig);
        &self.nodes[lo..hi]
    }
}

fn group_by_cluster(index: &ClusterIndex, pool: &[NodeId]) -> PoolClusters {
    let mut keyed: Vec<(u64, NodeId)> = pool
        .iter()
        .filter_map(|&w| index.signature(w).map(|sig| (sig, w)))
        .collect();
    keyed.sort_unstable();
    keyed.dedup();
    let (signatures, nodes) = keyed.into_iter().unzip();
    PoolClusters { signatures, nodes }
}

/// Uniform element of `pool` other than `y`, or `None` if there is none.
/// `pool` holds no duplicates.
pub(crate) fn pick_excluding<R: Rng + ?Sized>(
    pool: &[NodeId],
    y: NodeId,
    rng: &mut R,
) -> Option<NodeId> {
    let own = pool.iter().position(|&w| w == y);
    let others = pool.len() - usize::from(own.is_some());
    if others == 0 {
        return None;
    }
    let mut pick = rng.gen_range(0..others);
    if own.is_some_and(|p| pick >= p) {
        pick += 1;
    }
    Some(pool[pick])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ExactGraph;
    use crate::summarizer::{Algorithm, Summarizer};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pick_excluding_skips_self() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pool = [NodeId(1), NodeId(2), NodeId(3)];
        for _ in 0..200 {
            assert_ne!(pick_excluding(&pool, NodeId(2), &mut rng), Some(NodeId(2)));
        }
        assert_eq!(pick_excluding(&[NodeId(4)], NodeId(4), &mut rng), None);
        assert_eq!(pick_excluding(&[], NodeId(4), &mut rng), None);
        assert_eq!(pick_excluding(&[NodeId(5)], NodeId(4), &mut rng), Some(NodeId(5)));
    }

    #[test]
    fn isolated_edge() {
        let mut s = Summarizer::new(RunConfig::new(Algorithm::Mosso)).unwrap();
        s.process(&StreamEvent::insert(0, 1)).unwrap();
        assert_eq!(s.state().phi(), 1);
    }

    #[test]
    fn clique_built_edge_by_edge() {
        let config = RunConfig::new(Algorithm::Mosso).with_seed(17);
        let mut s = Summarizer::new(config).unwrap();
        let mut exact = ExactGraph::new();
        for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let ev = StreamEvent::insert(a, b);
            s.process(&ev).unwrap();
            exact.apply(&ev).unwrap();
        }
        assert!(s.state().phi() <= 6);
        exact.check_equivalence(s.state()).unwrap();
    }

    #[test]
    fn distinct_clusters_without_escape_only_apply_changes() {
        let config = RunConfig {
            escape_prob: 0.0,
            ..RunConfig::new(Algorithm::Mosso)
        };
        let mut s = Summarizer::new(config).unwrap();
        let mut outcomes = Vec::new();
        for i in 0..30u32 {
            let before = s.state().canonical();
            let ev = StreamEvent::insert(2 * i, 2 * i + 1);
            s.process_into(&ev, &mut outcomes).unwrap();
            // the only candidate for each testing node is itself
            assert!(outcomes.is_empty());
            let after = s.state().canonical();
            assert_eq!(before.0.len() + 2, after.0.len());
        }
    }
}
