use std::collections::BTreeSet;

use mosso::{ClusterIndex, NodeId, StreamEvent, Summary};

fn jaccard(a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> f64 {
    a.intersection(b).count() as f64 / a.union(b).count() as f64
}

#[test]
fn collision_rate_tracks_jaccard() {
    // node 0 and node 1 have neighbourhoods over 100..140 with varying overlap
    let cases: [(u32, u32, u32, u32); 4] = [(0, 20, 10, 30), (0, 20, 0, 20), (0, 10, 10, 20), (0, 30, 5, 15)];
    for (a0, a1, b0, b1) in cases {
        let na: BTreeSet<u32> = (100 + a0..100 + a1).collect();
        let nb: BTreeSet<u32> = (100 + b0..100 + b1).collect();
        let expected = jaccard(&na, &nb);
        let trials = 2000;
        let mut hits = 0;
        for seed in 0..trials {
            let mut s = Summary::new();
            let mut idx = ClusterIndex::new(seed);
            for (u, ns) in [(0, &na), (1, &nb)] {
                for &w in ns {
                    let ev = StreamEvent::insert(u, w);
                    s.process_edge_change(&ev).unwrap();
                    idx.update_on_change(&s, &ev);
                }
            }
            hits += idx.same_cluster(NodeId(0), NodeId(1)) as u32;
        }
        let rate = hits as f64 / trials as f64;
        assert!((rate - expected).abs() <= 0.1, "rate {rate} vs jaccard {expected}");
    }
}

#[test]
fn signatures_survive_deletions() {
    let mut s = Summary::new();
    let mut idx = ClusterIndex::new(9);
    let mut events = Vec::new();
    for w in 1..30 {
        events.push(StreamEvent::insert(0, w));
    }
    for w in (1..30).step_by(2) {
        events.push(StreamEvent::delete(0, w));
    }
    for ev in &events {
        s.process_edge_change(ev).unwrap();
        idx.update_on_change(&s, ev);
        let expected = s
            .retrieve_neighborhood(NodeId(0))
            .unwrap()
            .into_iter()
            .map(|w| idx.hash(w))
            .min();
        assert_eq!(idx.signature(NodeId(0)), expected);
    }
}
