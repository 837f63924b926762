use mosso::oracle::ExactGraph;
use mosso::stream::{generate_copying_model, make_fully_dynamic_stream, EdgeRecord};
use mosso::{Algorithm, Destination, NodeId, RunConfig, StreamEvent, Summarizer, Summary};
use proptest::prelude::*;

fn random_edges(n: u32, pairs: &[(u32, u32)]) -> Vec<EdgeRecord> {
    let mut seen = std::collections::BTreeSet::new();
    pairs
        .iter()
        .filter_map(|&(a, b)| {
            let (a, b) = (a % n, b % n);
            (a != b && seen.insert((a.min(b), a.max(b)))).then(|| EdgeRecord {
                u: NodeId(a.min(b)),
                v: NodeId(a.max(b)),
                timestamp: None,
            })
        })
        .collect()
}

fn replay_checked(config: RunConfig, events: &[StreamEvent]) {
    let mut s = Summarizer::new(config).unwrap();
    let mut exact = ExactGraph::new();
    let mut last_phi = 0u64;
    for ev in events {
        exact.apply(ev).unwrap();
        let outcomes = s.process(ev).unwrap();
        exact.check_equivalence(s.state()).unwrap();
        s.state().check_invariants().unwrap();
        assert!(s.state().phi() <= s.state().edge_count());
        if s.config().algorithm != Algorithm::Mcmc {
            // trials never grow phi: it can only have moved by the one edge
            assert!(s.state().phi() <= last_phi + 1, "{outcomes:?}");
            assert!(outcomes.iter().all(|o| o.accepted == (o.delta <= 0)));
        }
        last_phi = s.state().phi();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_algorithm_stays_lossless(
        n in 4u32..40,
        pairs in prop::collection::vec((0u32..64, 0u32..64), 1..160),
        del in 0.0f64..0.6,
        seed in any::<u64>(),
    ) {
        let edges = random_edges(n, &pairs);
        let events = make_fully_dynamic_stream(&edges, del, seed).unwrap();
        for alg in Algorithm::ALL {
            replay_checked(RunConfig::new(alg).with_seed(seed), &events);
        }
    }

    #[test]
    fn delta_matches_realized_move(
        n in 3u32..30,
        pairs in prop::collection::vec((0u32..64, 0u32..64), 1..120),
        moves in prop::collection::vec((0u32..64, 0u32..64, any::<bool>()), 1..60),
    ) {
        let mut s = Summary::new();
        for e in random_edges(n, &pairs) {
            s.process_edge_change(&StreamEvent::insert(e.u.0, e.v.0)).unwrap();
        }
        let nodes: Vec<NodeId> = s.nodes().collect();
        for (a, b, fresh) in moves {
            let y = nodes[a as usize % nodes.len()];
            let dest = if fresh {
                Destination::NewSingleton
            } else {
                Destination::Supernode(s.supernode_of(nodes[b as usize % nodes.len()]).unwrap())
            };
            let predicted = s.delta_phi(y, dest).unwrap();
            let before = s.phi() as i64;
            let realized = s.move_node(y, dest).unwrap();
            prop_assert_eq!(predicted, realized);
            prop_assert_eq!(before + realized, s.phi() as i64);
            s.check_invariants().unwrap();
            for u in &nodes {
                prop_assert_eq!(
                    s.degree(*u).unwrap() as usize,
                    s.retrieve_neighborhood(*u).unwrap().len()
                );
            }
        }
    }
}

#[test]
fn copying_model_replay_with_deletions() {
    let edges = generate_copying_model(300, 1500, 0.6, 4).unwrap();
    let events = make_fully_dynamic_stream(&edges, 0.2, 4).unwrap();
    for alg in [Algorithm::Mosso, Algorithm::MossoSimple] {
        replay_checked(RunConfig::new(alg).with_seed(11), &events);
    }
}
