use mosso::summarizer::{proposal_distribution, sample_proposal};
use mosso::{Algorithm, Destination, NodeId, RunConfig, StreamEvent, Summarizer, Summary};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn proposal_is_normalized(
        pairs in prop::collection::vec((0u32..20, 0u32..20), 1..80),
        merges in prop::collection::vec((0u32..20, 0u32..20), 0..15),
        eps in 0.01f64..5.0,
    ) {
        let mut s = Summary::new();
        for (a, b) in pairs {
            let ev = StreamEvent::insert(a, b);
            if a != b && !(s.has_node(ev.u) && s.has_node(ev.v) && s.check_adjacency(ev.u, ev.v).unwrap()) {
                s.process_edge_change(&ev).unwrap();
            }
        }
        let nodes: Vec<NodeId> = s.nodes().collect();
        prop_assume!(!nodes.is_empty());
        for (a, b) in merges {
            let (y, t) = (nodes[a as usize % nodes.len()], nodes[b as usize % nodes.len()]);
            let dest = Destination::Supernode(s.supernode_of(t).unwrap());
            s.move_node(y, dest).unwrap();
        }
        for &x in s.supernodes() {
            let total: f64 = proposal_distribution(&s, x, eps).unwrap().iter().map(|p| p.1).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn sampled_proposals_follow_distribution() {
    let mut s = Summary::new();
    for (a, b) in [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (3, 5)] {
        s.process_edge_change(&StreamEvent::insert(a, b)).unwrap();
    }
    let g = s.supernode_of(NodeId(0)).unwrap();
    s.move_node(NodeId(1), Destination::Supernode(g)).unwrap();
    let x = s.supernode_of(NodeId(3)).unwrap();
    let dist = proposal_distribution(&s, x, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws = 100_000;
    let mut counts = std::collections::HashMap::new();
    for _ in 0..draws {
        *counts.entry(sample_proposal(&s, x, 0.5, &mut rng).unwrap()).or_insert(0u32) += 1;
    }
    let tv: f64 = dist
        .iter()
        .map(|(z, p)| (counts.get(z).copied().unwrap_or(0) as f64 / draws as f64 - p).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.02, "tv {tv}");
}

#[test]
fn mcmc_run_is_reproducible() {
    let run = || {
        let mut s = Summarizer::new(RunConfig::new(Algorithm::Mcmc).with_seed(8)).unwrap();
        let mut log = Vec::new();
        for i in 0..60u32 {
            log.extend(s.process(&StreamEvent::insert(i % 13, 13 + (i * 7) % 11)).unwrap());
        }
        (log, s.state().to_snapshot_string())
    };
    assert_eq!(run(), run());
}
