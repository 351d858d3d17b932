//! `netresil` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use netresil::community;
use netresil::io::{self as gio, CsvColumns};
use netresil::metrics::MetricSet;
use netresil::percolation::{self, AttackKind, AttackStrategy};
use netresil::report::{self, CountryMapping, ReportOptions, SeriesFormat};
use netresil::synth::{self, GeneratorModel, GeneratorSpec};
use netresil::{CleaningPolicy, Measure};

#[derive(Parser)]
#[command(name = "netresil", version, about = "Overlay network robustness analysis")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Input file (edge-list CSV for `ingest`, graph JSON otherwise)
    #[arg(short, long, global = true)]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// RNG seed for randomized commands
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress human-readable summaries on stderr
    #[arg(short, long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Clean an edge-list CSV and write the graph JSON
    Ingest(IngestArgs),
    /// Print the full metrics snapshot of a graph
    Stats,
    /// Rank nodes by a centrality measure (CSV)
    Centrality(CentralityArgs),
    /// Louvain communities (JSON)
    Communities(CommunityArgs),
    /// Run a node-removal attack and write the per-step trace
    Percolate(PercolateArgs),
    /// Generate a synthetic graph (JSON)
    Generate(GenerateArgs),
    /// Full analysis report (JSON)
    Report(ReportArgs),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long, default_value = "Src IP")]
    src_col: String,
    #[arg(long, default_value = "Dst IP")]
    dst_col: String,
    /// Column holding tunnel identifiers (enables tunnel-cascade grouping)
    #[arg(long)]
    tunnel_col: Option<String>,
    #[arg(long, value_enum, default_value_t = Policy::TunnelCascade)]
    policy: Policy,
    /// Where to write the cleaning report JSON (stderr otherwise)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    TunnelCascade,
    RowOnly,
}

#[derive(Args)]
struct CentralityArgs {
    #[arg(long, default_value = "total-degree")]
    measure: String,
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Args)]
struct CommunityArgs {
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    /// Only list communities with more than this many members
    #[arg(long, default_value_t = 5)]
    min_size: usize,
}

#[derive(Args)]
struct PercolateArgs {
    #[arg(long, default_value = "adaptive")]
    strategy: String,
    #[arg(long, default_value = "total-degree")]
    measure: String,
    #[arg(long, default_value_t = 3)]
    steps: usize,
    /// Comma list of density, apl, transitivity, centralization, components, all
    #[arg(long, default_value = "density,apl")]
    metrics: String,
    /// Output format; inferred from the --output extension when omitted
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    edges: Option<usize>,
    /// CSV with `out,in` columns, one row per node (configuration model)
    #[arg(long)]
    degrees: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    UniformRandom,
    PreferentialAttachment,
    BidirectedStar,
    DirectedConfiguration,
}

#[derive(Args)]
struct ReportArgs {
    /// `label,country` CSV for the degree-by-country table
    #[arg(long)]
    countries: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    top: usize,
    #[arg(long, default_value_t = 3)]
    steps: usize,
    #[arg(long, default_value_t = 5)]
    min_size: usize,
}

enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Ingest(args) => ingest(g, args),
        Command::Stats => stats(g),
        Command::Centrality(args) => {
            let graph = load(g)?;
            let measure: Measure = args.measure.parse().map_err(usage)?;
            emit(g, &report::centrality_csv(&graph, measure, args.top)?)
        }
        Command::Communities(args) => {
            let seed = require_seed(g, "communities")?;
            let graph = load(g)?;
            let partition = community::louvain(&graph, seed, args.resolution)?;
            let doc = community::CommunityReport::new(&partition, args.min_size);
            if !g.quiet {
                eprintln!(
                    "{} communities, modularity {:.6}",
                    partition.community_count, partition.modularity
                );
            }
            emit(g, &pretty(&doc)?)
        }
        Command::Percolate(args) => percolate(g, args),
        Command::Generate(args) => generate(g, args),
        Command::Report(args) => {
            let seed = require_seed(g, "report")?;
            let graph = load(g)?;
            let countries = args
                .countries
                .as_ref()
                .map(|p| CountryMapping::load(p).with_context(|| format!("reading {}", p.display())))
                .transpose()?;
            let options = ReportOptions {
                top: args.top,
                steps: args.steps,
                seed,
                min_community_size: args.min_size,
                countries,
            };
            emit(g, &pretty(&report::analysis_report(&graph, &options)?)?)
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn require_input(g: &Global) -> Result<&Path, Failure> {
    g.input
        .as_deref()
        .ok_or_else(|| Failure::Usage("--input is required".into()))
}

fn require_seed(g: &Global, command: &str) -> Result<u64, Failure> {
    g.seed
        .ok_or_else(|| Failure::Usage(format!("`{command}` is randomized and requires --seed")))
}

fn load(g: &Global) -> Result<netresil::DirectedGraph, Failure> {
    let path = require_input(g)?;
    Ok(gio::load_graph(path).with_context(|| format!("reading graph {}", path.display()))?)
}

fn pretty<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn emit(g: &Global, text: &str) -> Outcome {
    match &g.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn ingest(g: &Global, args: &IngestArgs) -> Outcome {
    let path = require_input(g)?;
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    let columns = CsvColumns {
        src: args.src_col.clone(),
        dst: args.dst_col.clone(),
        tunnel: args.tunnel_col.clone(),
    };
    let records = gio::read_edge_records(file, &columns)?;
    let policy = match args.policy {
        Policy::TunnelCascade => CleaningPolicy::TunnelCascade,
        Policy::RowOnly => CleaningPolicy::RowOnly,
    };
    let (kept, mut cleaning) = netresil::clean_records(&records, policy);
    let (graph, build) = netresil::build_graph(&kept)?;
    cleaning.absorb(build);
    let summary = pretty(&cleaning)?;
    match &args.report {
        Some(p) => fs::write(p, &summary).with_context(|| format!("writing {}", p.display()))?,
        None if !g.quiet => eprint!("{summary}"),
        None => {}
    }
    if !g.quiet {
        eprintln!("graph: {} nodes, {} edges", graph.node_count(), graph.edge_count());
    }
    emit(g, &gio::graph_to_json(&graph))
}

fn stats(g: &Global) -> Outcome {
    let path = require_input(g)?;
    let snapshot =
        report::stats_command(path).with_context(|| format!("reading graph {}", path.display()))?;
    if !g.quiet {
        let opt = |x: Option<f64>| x.map_or("n/a".to_owned(), gio::format_sig9);
        eprintln!(
            "n={} m={} density={} apl={} transitivity={} centralization={}",
            snapshot.n,
            snapshot.m,
            opt(snapshot.density),
            opt(snapshot.apl),
            opt(snapshot.transitivity),
            opt(snapshot.centralization_total)
        );
    }
    emit(g, &report::snapshot_json(&snapshot))
}

fn percolate(g: &Global, args: &PercolateArgs) -> Outcome {
    let kind: AttackKind = args.strategy.parse().map_err(usage)?;
    let measure: Measure = args.measure.parse().map_err(usage)?;
    let metrics: MetricSet = args.metrics.parse().map_err(usage)?;
    let seed = match kind {
        AttackKind::Random => Some(require_seed(g, "percolate --strategy random")?),
        _ => g.seed,
    };
    let graph = load(g)?;
    let strategy = AttackStrategy { kind, measure, seed };
    let trace = percolation::run_attack(&graph, &strategy, args.steps, &metrics)?;
    let format = match (args.format, &g.output) {
        (Some(Format::Csv), _) => SeriesFormat::Csv,
        (Some(Format::Json), _) => SeriesFormat::Json,
        (None, Some(path)) => SeriesFormat::from_path(path),
        (None, None) => SeriesFormat::Json,
    };
    if !g.quiet {
        for step in trace.steps.iter().skip(1) {
            eprintln!(
                "step {}: removed {} (degree {})",
                step.step,
                step.removed.as_ref().map_or("-", |l| l.as_str()),
                step.removed_degree
            );
        }
    }
    emit(g, &report::emit_trace_series(&trace, format))
}

fn read_degrees(path: &Path) -> anyhow::Result<(Vec<usize>, Vec<usize>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .with_context(|| format!("missing `{name}` column in {}", path.display()))
    };
    let (out_col, in_col) = (col("out")?, col("in")?);
    let (mut outs, mut ins) = (Vec::new(), Vec::new());
    for row in reader.records() {
        let row = row?;
        let field = |i: usize| -> anyhow::Result<usize> {
            Ok(row.get(i).unwrap_or("").trim().parse()?)
        };
        outs.push(field(out_col)?);
        ins.push(field(in_col)?);
    }
    Ok((outs, ins))
}

fn generate(g: &Global, args: &GenerateArgs) -> Outcome {
    let needs = |what: &str| Failure::Usage(format!("--{what} is required for this model"));
    let seed = match args.model {
        Model::BidirectedStar => g.seed.unwrap_or(0),
        _ => require_seed(g, "generate")?,
    };
    let spec = match args.model {
        Model::UniformRandom | Model::PreferentialAttachment => {
            let nodes = args.nodes.ok_or_else(|| needs("nodes"))?;
            let edges = args.edges.ok_or_else(|| needs("edges"))?;
            let model = if matches!(args.model, Model::UniformRandom) {
                GeneratorModel::UniformRandom { edges }
            } else {
                GeneratorModel::PreferentialAttachment { edges }
            };
            GeneratorSpec { model, nodes, seed }
        }
        Model::BidirectedStar => GeneratorSpec::star(args.nodes.ok_or_else(|| needs("nodes"))?),
        Model::DirectedConfiguration => {
            let path = args.degrees.as_ref().ok_or_else(|| needs("degrees"))?;
            let (outs, ins) = read_degrees(path)?;
            GeneratorSpec::configuration(outs, ins, seed)
        }
    };
    let graph = synth::generate(&spec)?;
    if !g.quiet {
        eprintln!("generated {} nodes, {} edges", graph.node_count(), graph.edge_count());
    }
    emit(g, &gio::graph_to_json(&graph))
}
