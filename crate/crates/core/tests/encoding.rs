use mosso::oracle::{brute_force_phi, ExactGraph};
use mosso::summarizer::best_destination;
use mosso::{encode_pair, Destination, NodeId, StreamEvent, Summary};
use proptest::prelude::*;

fn build(n: u32, pairs: &[(u32, u32)], groups: &[u32]) -> (Summary, ExactGraph) {
    let mut s = Summary::new();
    let mut g = ExactGraph::new();
    for &(a, b) in pairs {
        let (a, b) = (a % n, b % n);
        let ev = StreamEvent::insert(a, b);
        if a != b && !g.has_edge(ev.u, ev.v) {
            g.apply(&ev).unwrap();
            s.process_edge_change(&ev).unwrap();
        }
    }
    // group label k: move into the supernode of the first node labelled k
    let nodes: Vec<NodeId> = s.nodes().collect();
    let mut leader = std::collections::HashMap::new();
    for (i, &u) in nodes.iter().enumerate() {
        let k = groups[i % groups.len()];
        match leader.get(&k) {
            None => {
                leader.insert(k, u);
            }
            Some(&l) => {
                let dest = Destination::Supernode(s.supernode_of(l).unwrap());
                s.move_node(u, dest).unwrap();
            }
        }
    }
    (s, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi_is_optimal_for_partition(
        n in 2u32..=50,
        pairs in prop::collection::vec((0u32..50, 0u32..50), 1..400),
        groups in prop::collection::vec(0u32..8, 1..50),
    ) {
        let (s, g) = build(n, &pairs, &groups);
        let partition: Vec<Vec<NodeId>> = s.canonical().0.into_iter().map(|(_, m)| m).collect();
        prop_assert_eq!(s.phi(), brute_force_phi(&g, &partition));
        for ((a, b), decision) in s.pair_encodings() {
            let count = s.pair_edge_count(a, b) as u64;
            let expected = encode_pair(
                s.supernode_size(a) as u64,
                s.supernode_size(b) as u64,
                count,
                a == b,
            ).unwrap();
            prop_assert_eq!(decision, expected);
            prop_assert_eq!(s.is_superedge(a, b), expected.use_superedge);
        }
        g.check_equivalence(&s).unwrap();
    }

    #[test]
    fn greedy_choice_is_global_minimum(
        n in 2u32..=50,
        pairs in prop::collection::vec((0u32..50, 0u32..50), 1..250),
        groups in prop::collection::vec(0u32..6, 1..50),
    ) {
        let (s, _) = build(n, &pairs, &groups);
        for y in s.nodes().collect::<Vec<_>>() {
            let (dest, delta) = best_destination(&s, y).unwrap();
            let mut min = s.delta_phi(y, Destination::NewSingleton).unwrap();
            for &z in s.supernodes() {
                min = min.min(s.delta_phi(y, Destination::Supernode(z)).unwrap());
            }
            prop_assert_eq!(delta, min.min(0));
            prop_assert_eq!(s.delta_phi(y, dest).unwrap(), delta);
        }
    }
}
