use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mosso::stream::{
    generate_copying_model, load_edge_list, make_fully_dynamic_stream, make_insertion_stream, EdgeList,
    Ordering, StreamSource, StreamSpec,
};
use mosso::{Algorithm, RunConfig, StreamEvent};
use mosso_bench::{query, run, sweep, write_sweep_csv, RunOptions, SweepParam};

#[derive(Parser)]
#[command(name = "mosso-bench", about = "Replay edge streams through the graph summarizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay one stream, writing metrics and a final snapshot.
    Run(RunArgs),
    /// Replay once per parameter value and seed; prints final ratios and runtimes.
    Sweep(SweepArgs),
    /// Print the neighbors of a node stored in a snapshot.
    Query {
        snapshot: PathBuf,
        node: u32,
    },
    /// Write a copying-model edge list.
    Generate {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 0.5)]
        copy_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StreamKind {
    /// Insertions only, by timestamp when present.
    Insertion,
    /// Random insertions with delayed random deletions.
    Dynamic,
    /// A `+ u v` / `- u v` stream file.
    File,
}

#[derive(Args)]
struct StreamArgs {
    #[arg(long, default_value = "mosso", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "dynamic")]
    stream: StreamKind,
    #[arg(long, default_value_t = 0.1)]
    deletion_prob: f64,
    #[arg(long, default_value_t = 0.3)]
    escape_prob: f64,
    #[arg(long, default_value_t = 120)]
    samples: usize,
    #[arg(long, default_value_t = 10.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, default_value_t = 1000)]
    report_interval: u64,
    /// 0 disables verification.
    #[arg(long, default_value_t = 0)]
    verify_interval: u64,
    #[arg(long)]
    snapshot_out: Option<PathBuf>,
    #[arg(long)]
    metrics_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamArg {
    EscapeProb,
    Samples,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    stream: StreamArgs,
    #[arg(long, value_enum)]
    param: ParamArg,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    /// Comma-separated seeds; defaults to `--seed`.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: mosso::summarizer::ConfigError| e.to_string())
}

impl StreamArgs {
    fn config(&self) -> Result<RunConfig> {
        let config = RunConfig {
            algorithm: self.algorithm,
            escape_prob: self.escape_prob,
            sample_count: self.samples,
            mcmc_beta: self.beta,
            mcmc_epsilon: self.epsilon,
            seed: self.seed,
            hash_seed: None,
        };
        config.validate()?;
        Ok(config)
    }

    /// The stream plus, for edge-list input, the dense-to-original id map.
    fn events(&self) -> Result<(Vec<StreamEvent>, Option<EdgeList>)> {
        let context = || format!("cannot build stream from {}", self.input.display());
        if let StreamKind::File = self.stream {
            let spec = StreamSpec::new(StreamSource::StreamFile(self.input.clone()));
            return Ok((spec.build().with_context(context)?, None));
        }
        let list = load_edge_list(&self.input).with_context(context)?;
        let events = match self.stream {
            StreamKind::Insertion => make_insertion_stream(&list.edges, Ordering::Timestamp, self.seed),
            _ => {
                if !(0.0..1.0).contains(&self.deletion_prob) {
                    bail!("deletion probability {} not in [0, 1)", self.deletion_prob);
                }
                make_fully_dynamic_stream(&list.edges, self.deletion_prob, self.seed)?
            }
        };
        Ok((events, Some(list)))
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let stdout = std::io::stdout();
    match cli.command {
        Command::Run(args) => {
            let config = args.stream.config()?;
            let (events, list) = args.stream.events()?;
            let opts = RunOptions {
                report_interval: args.report_interval,
                verify_interval: args.verify_interval,
                metrics_out: args.metrics_out.clone(),
                snapshot_out: args.snapshot_out,
            };
            let report = run(&config, &events, &opts)?;
            let snapshot = opts
                .snapshot_out
                .or_else(|| opts.metrics_out.map(|p| p.with_extension("snapshot")));
            if let (Some(list), Some(snapshot)) = (list, snapshot) {
                let path = snapshot.with_extension("ids");
                list.write_id_map(BufWriter::new(File::create(&path)?))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            if args.metrics_out.is_none() {
                mosso_bench::write_csv(&report.samples, stdout.lock())?;
            }
            let state = report.state();
            eprintln!(
                "{}: {} events, phi {}, edges {}, ratio {:.4}, {:.3} s",
                config.algorithm,
                events.len(),
                state.phi(),
                state.edge_count(),
                report.final_ratio(),
                report.total_nanos as f64 * 1e-9
            );
        }
        Command::Sweep(args) => {
            let base = args.stream.config()?;
            let (events, _) = args.stream.events()?;
            let param = match args.param {
                ParamArg::EscapeProb => SweepParam::EscapeProb,
                ParamArg::Samples => SweepParam::SampleCount,
            };
            let seeds = if args.seeds.is_empty() {
                vec![base.seed]
            } else {
                args.seeds
            };
            let rows = sweep(param, &args.values, &seeds, &base, &events)?;
            match args.out {
                Some(path) => write_sweep_csv(param, &rows, BufWriter::new(File::create(path)?))?,
                None => write_sweep_csv(param, &rows, stdout.lock())?,
            }
        }
        Command::Query { snapshot, node } => {
            let neighbors = query(&snapshot, node)?;
            let mut out = stdout.lock();
            let line: Vec<String> = neighbors.iter().map(|n| n.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Command::Generate {
            nodes,
            edges,
            copy_prob,
            seed,
            out,
        } => {
            let list = generate_copying_model(nodes, edges, copy_prob, seed)?;
            let mut w = BufWriter::new(File::create(&out)?);
            for e in &list {
                writeln!(w, "{} {}", e.u, e.v)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
