use mosso::stream::{generate_copying_model, make_fully_dynamic_stream};
use mosso::{Algorithm, RunConfig, StreamEvent};
use mosso_bench::{
    loglog_slope, median, query, run, sweep, write_csv, write_sweep_csv, RunOptions, SweepParam, CSV_HEADER,
};

fn events() -> Vec<StreamEvent> {
    let edges = generate_copying_model(300, 1_500, 0.6, 4).unwrap();
    make_fully_dynamic_stream(&edges, 0.2, 4).unwrap()
}

#[test]
fn samples_land_on_the_interval_and_at_the_end() {
    let events = events();
    let opts = RunOptions {
        report_interval: 100,
        verify_interval: 250,
        ..Default::default()
    };
    let report = run(&RunConfig::new(Algorithm::Mosso), &events, &opts).unwrap();
    let n = events.len() as u64;
    let expected = n / 100 + u64::from(!n.is_multiple_of(100));
    assert_eq!(report.samples.len() as u64, expected);
    assert_eq!(report.samples.last().unwrap().events_processed, n);
    assert_eq!(report.verifications, n / 250 + u64::from(!n.is_multiple_of(250)));
    for pair in report.samples.windows(2) {
        assert!(pair[0].peak_entries <= pair[1].peak_entries);
        assert!(pair[0].elapsed_nanos <= pair[1].elapsed_nanos);
    }
    for s in &report.samples {
        assert!(s.compression_ratio <= 1.0);
        assert!(s.peak_entries >= s.node_count + s.phi);
    }
    assert_eq!(report.total_nanos, report.samples.last().unwrap().elapsed_nanos);
}

#[test]
fn csv_has_the_fixed_columns() {
    let report = run(&RunConfig::new(Algorithm::MossoSimple), &events(), &RunOptions::default()).unwrap();
    let mut out = Vec::new();
    write_csv(&report.samples, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 6);
    assert!(lines.next().is_none());
}

#[test]
fn snapshot_answers_neighbor_queries() {
    let dir = tempfile::tempdir().unwrap();
    let snapshot = dir.path().join("final.snapshot");
    let events = events();
    let opts = RunOptions {
        snapshot_out: Some(snapshot.clone()),
        ..Default::default()
    };
    let report = run(&RunConfig::new(Algorithm::Greedy), &events, &opts).unwrap();
    for u in report.state().nodes().take(20) {
        let mut want = report.state().retrieve_neighborhood(u).unwrap();
        let mut got = query(&snapshot, u.0).unwrap();
        want.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, want);
    }
    assert!(query(&snapshot, 1_000_000).is_err());
}

#[test]
fn sweep_rows_follow_values_then_seeds() {
    let events = events();
    let base = RunConfig::new(Algorithm::Mosso);
    let rows = sweep(SweepParam::SampleCount, &[10.0, 40.0], &[1, 2], &base, &events).unwrap();
    let keys: Vec<(f64, u64)> = rows.iter().map(|r| (r.value, r.seed)).collect();
    assert_eq!(keys, [(10.0, 1), (10.0, 2), (40.0, 1), (40.0, 2)]);
    assert!(sweep(SweepParam::SampleCount, &[2.5], &[1], &base, &events).is_err());
    assert!(sweep(SweepParam::EscapeProb, &[1.5], &[1], &base, &events).is_err());

    let mut out = Vec::new();
    write_sweep_csv(SweepParam::SampleCount, &rows, &mut out).unwrap();
    assert!(String::from_utf8(out).unwrap().starts_with("sample_count,seed,ratio,elapsed_ns\n10,1,"));
}

#[test]
fn statistics_helpers() {
    assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
    assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    let square: Vec<(f64, f64)> = (1..50).map(|i| (i as f64, (i * i) as f64 * 3.0)).collect();
    assert!((loglog_slope(&square) - 2.0).abs() < 1e-9);
    let with_zero = [(0.0, 1.0), (1.0, 2.0), (2.0, 4.0)];
    assert!((loglog_slope(&with_zero) - 1.0).abs() < 1e-9);
}
