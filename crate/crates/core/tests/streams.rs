use std::collections::BTreeSet;

use mosso::oracle::ExactGraph;
use mosso::stream::{
    generate_copying_model, make_fully_dynamic_stream, make_insertion_stream, validate_soundness,
    EdgeRecord, Ordering,
};
use mosso::{EventKind, NodeId};

fn edges(n: usize) -> Vec<EdgeRecord> {
    generate_copying_model(n / 3, n, 0.5, 77).unwrap()
}

#[test]
fn insertion_stream_covers_every_edge_once() {
    let es = edges(300);
    let s = make_insertion_stream(&es, Ordering::Random, 1);
    assert_eq!(s.len(), es.len());
    assert!(s.iter().all(|e| e.kind == EventKind::Insert));
    assert_eq!(s, make_insertion_stream(&es, Ordering::Random, 1));
    assert_ne!(s, make_insertion_stream(&es, Ordering::Random, 2));
}

#[test]
fn deletion_extremes() {
    let es = edges(500);
    let none = make_fully_dynamic_stream(&es, 0.0, 3).unwrap();
    assert!(none.iter().all(|e| e.kind == EventKind::Insert));
    let all = make_fully_dynamic_stream(&es, 1.0, 3).unwrap();
    assert_eq!(all.len(), 2 * es.len());
    validate_soundness(&all).unwrap();
    assert!(make_fully_dynamic_stream(&es, 1.5, 3).is_err());
}

#[test]
fn deletion_count_is_binomial_and_replay_matches() {
    let n = 10_000;
    let es: Vec<EdgeRecord> = (0..n as u32)
        .map(|i| EdgeRecord { u: NodeId(i), v: NodeId(n as u32 + i), timestamp: None })
        .collect();
    let s = make_fully_dynamic_stream(&es, 0.1, 42).unwrap();
    validate_soundness(&s).unwrap();
    let deletions = s.iter().filter(|e| e.kind == EventKind::Delete).count() as f64;
    let sigma = (n as f64 * 0.1 * 0.9).sqrt();
    assert!((deletions - 1000.0).abs() <= 3.0 * sigma, "{deletions}");

    let mut g = ExactGraph::new();
    for e in &s {
        g.apply(e).unwrap();
    }
    let deleted: BTreeSet<_> = s.iter().filter(|e| e.kind == EventKind::Delete).map(|e| e.edge()).collect();
    let expected: Vec<_> = es.iter().map(|e| (e.u, e.v)).filter(|p| !deleted.contains(p)).collect::<BTreeSet<_>>().into_iter().collect();
    assert_eq!(g.edges(), expected);
}

#[test]
fn copying_model_output_is_simple() {
    for beta in [0.0, 0.5, 1.0] {
        let es = generate_copying_model(1000, 4000, beta, 9).unwrap();
        assert!(es.len() <= 4000 && es.len() >= 999, "{beta}: {}", es.len());
        let set: BTreeSet<_> = es.iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(set.len(), es.len());
        assert!(es.iter().all(|e| e.u < e.v));
    }
}
