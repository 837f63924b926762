//! Replay harness: drives a summarizer over an event stream, sampling
//! metrics, verifying against an exact replay, and writing snapshots.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use mosso::oracle::ExactGraph;
use mosso::{NodeId, RunConfig, StreamEvent, Summarizer, Summary};

pub const CSV_HEADER: &str = "events,phi,edges,ratio,elapsed_ns,peak_entries";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSample {
    pub events_processed: u64,
    pub phi: u64,
    pub live_edges: u64,
    pub compression_ratio: f64,
    /// Time spent inside the summarizer so far.
    pub elapsed_nanos: u64,
    pub peak_entries: u64,
    /// Nodes seen so far; not part of the CSV.
    pub node_count: u64,
}

impl MetricSample {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.events_processed,
            self.phi,
            self.live_edges,
            self.compression_ratio,
            self.elapsed_nanos,
            self.peak_entries
        )
    }
}

pub fn write_csv<W: Write>(samples: &[MetricSample], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in samples {
        writeln!(out, "{}", s.csv_row())?;
    }
    out.flush()
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Emit a sample every this many events; 0 samples only the end.
    pub report_interval: u64,
    /// Check against the exact replay every this many events and at the
    /// end; 0 disables checking.
    pub verify_interval: u64,
    pub metrics_out: Option<PathBuf>,
    /// Defaults to the metrics path with a `.snapshot` extension.
    pub snapshot_out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunReport {
    pub samples: Vec<MetricSample>,
    pub summarizer: Summarizer,
    pub total_nanos: u64,
    pub verifications: u64,
}

impl RunReport {
    pub fn state(&self) -> &Summary {
        self.summarizer.state()
    }

    pub fn final_ratio(&self) -> f64 {
        self.state().compression_ratio()
    }
}

/// Replays `events`. Only summarizer calls are timed.
pub fn run(config: &RunConfig, events: &[StreamEvent], opts: &RunOptions) -> Result<RunReport> {
    let mut summarizer = Summarizer::new(config.clone())?;
    let mut exact = (opts.verify_interval > 0).then(ExactGraph::new);
    let mut samples = Vec::new();
    let mut outcomes = Vec::new();
    let mut elapsed = 0u64;
    let mut peak = 0u64;
    let mut verifications = 0;

    for (i, ev) in events.iter().enumerate() {
        let done = i as u64 + 1;
        outcomes.clear();
        let start = Instant::now();
        summarizer
            .process_into(ev, &mut outcomes)
            .with_context(|| format!("event {done} ({ev})"))?;
        elapsed += start.elapsed().as_nanos() as u64;
        peak = peak.max(summarizer.state().stored_entries());

        if let Some(exact) = exact.as_mut() {
            exact.apply(ev)?;
            if done.is_multiple_of(opts.verify_interval) || done == events.len() as u64 {
                exact
                    .check_equivalence(summarizer.state())
                    .context("verification failed")?;
                verifications += 1;
            }
        }
        let at_report = opts.report_interval > 0 && done.is_multiple_of(opts.report_interval);
        if at_report || done == events.len() as u64 {
            samples.push(sample(summarizer.state(), done, elapsed, peak));
        }
    }

    if let Some(path) = &opts.metrics_out {
        write_csv(&samples, BufWriter::new(create(path)?))?;
    }
    let snapshot = opts
        .snapshot_out
        .clone()
        .or_else(|| opts.metrics_out.as_ref().map(|p| p.with_extension("snapshot")));
    if let Some(path) = snapshot {
        summarizer
            .state()
            .save_snapshot(BufWriter::new(create(&path)?))?;
    }
    Ok(RunReport {
        samples,
        summarizer,
        total_nanos: elapsed,
        verifications,
    })
}

fn sample(state: &Summary, events: u64, elapsed: u64, peak: u64) -> MetricSample {
    MetricSample {
        events_processed: events,
        phi: state.phi(),
        live_edges: state.edge_count(),
        compression_ratio: state.compression_ratio(),
        elapsed_nanos: elapsed,
        peak_entries: peak,
        node_count: state.node_count() as u64,
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("cannot create {}", path.display()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    EscapeProb,
    SampleCount,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::EscapeProb => "escape_prob",
            SweepParam::SampleCount => "sample_count",
        }
    }

    pub fn apply(self, base: &RunConfig, value: f64) -> Result<RunConfig> {
        let mut c = base.clone();
        match self {
            SweepParam::EscapeProb => c.escape_prob = value,
            SweepParam::SampleCount => {
                if value < 1.0 || value.fract() != 0.0 {
                    bail!("sample count must be a positive integer, got {value}");
                }
                c.sample_count = value as usize;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub seed: u64,
    pub final_ratio: f64,
    pub total_nanos: u64,
}

/// One replay per `(value, seed)`, in that nesting order.
pub fn sweep(
    param: SweepParam,
    values: &[f64],
    seeds: &[u64],
    base: &RunConfig,
    events: &[StreamEvent],
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &value in values {
        for &seed in seeds {
            let config = param.apply(base, value)?.with_seed(seed);
            let report = run(&config, events, &RunOptions::default())?;
            rows.push(SweepRow {
                value,
                seed,
                final_ratio: report.final_ratio(),
                total_nanos: report.total_nanos,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(param: SweepParam, rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{},seed,ratio,elapsed_ns", param.name())?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.value, r.seed, r.final_ratio, r.total_nanos)?;
    }
    out.flush()
}

/// Neighbors of `node` recovered from a snapshot file.
pub fn query(snapshot: &Path, node: u32) -> Result<Vec<NodeId>> {
    let file = File::open(snapshot).with_context(|| format!("cannot open {}", snapshot.display()))?;
    let state = Summary::load_snapshot(std::io::BufReader::new(file))?;
    Ok(state.retrieve_neighborhood(NodeId(node))?)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Least-squares slope of `ln y` against `ln x` over positive points.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    cov / var
}
