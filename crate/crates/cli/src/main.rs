//! `gospal` — auctions for a single resource over a conflict graph.
//!
//! Subcommands: `graph gen`, `auction run`, `experiment run`, `compare`.
//! Exit codes: 0 success, 2 validation error, 3 cap exceeded, 4 I/O error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gospal_core::graph::{
    generate_configuration_model, load_graph, store_graph, DegreeDistribution, GraphError,
};
use gospal_core::mechanisms::{
    conflict_free_grouping, run_mechanism, AuctionOutcome, BidVector, GroupPartition,
    MechanismError, MechanismTag, DEFAULT_MWIS_CAP,
};
use gospal_core::metrics::{jain_index, MetricsReport};
use gospal_core::simulate::{
    run_repeated_auction, sig6, summary_json, write_frames_csv, ExperimentConfig, SimError,
};
use gospal_core::{ConflictGraph, ValueVector};

/// Output directory fallback for `experiment run`.
const OUT_DIR_ENV: &str = "GOSPAL_OUT_DIR";

#[derive(Parser)]
#[command(name = "gospal", version, about = "Strategy-proof auctions on conflict graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conflict-graph utilities.
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    /// Single-auction execution.
    Auction {
        #[command(subcommand)]
        command: AuctionCommand,
    },
    /// Batch experiments from a config file.
    Experiment {
        #[command(subcommand)]
        command: ExperimentCommand,
    },
    /// Run every mechanism on one instance and print a comparison table.
    Compare(CompareArgs),
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Generate a random graph with the configuration model.
    Gen(GraphGenArgs),
}

#[derive(Args)]
struct GraphGenArgs {
    /// Number of users.
    #[arg(long)]
    n: usize,
    /// Degree probabilities, e.g. 0.1,0.2,0.3,0.4.
    #[arg(long, value_delimiter = ',')]
    pmf: Vec<f64>,
    /// Degree values matching --pmf; defaults to 1,2,...,len(pmf).
    #[arg(long, value_delimiter = ',')]
    support: Option<Vec<usize>>,
    /// RNG seed; random when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Output graph file (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum AuctionCommand {
    /// Run one mechanism on one instance and print the outcome JSON.
    Run(AuctionRunArgs),
}

#[derive(Args)]
struct AuctionRunArgs {
    /// Graph file (JSON).
    #[arg(long)]
    graph: PathBuf,
    /// Inline bids, e.g. 5,7,8,9,6,9.
    #[arg(long, value_delimiter = ',', conflicts_with = "bids_file")]
    bids: Option<Vec<f64>>,
    /// File with a JSON array of bids.
    #[arg(long)]
    bids_file: Option<PathBuf>,
    /// Mechanism: gospal | vcg | small | greedy.
    #[arg(long)]
    mechanism: String,
    /// Master seed (used for the grouping); random when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Pin the grouping instead of randomizing, e.g. "1,5|2,4|3,6".
    #[arg(long)]
    partition: Option<String>,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Run the experiment described by a JSON or TOML config file.
    Run(ExperimentRunArgs),
}

#[derive(Args)]
#[command(after_help = "\
OUTPUT FILES:
  frames.csv    columns: replication, frame, mechanism, welfare, utilization,
                jain_running; one row per frame per mechanism, then one
                summary row per replication and mechanism (frame = \"summary\",
                welfare/utilization = per-frame means, jain_running = final
                Jain index of the allocation fractions)
  summary.json  per-mechanism means across replications, plus per-user mean
                price/utility when all replications share one topology")]
struct ExperimentRunArgs {
    /// Config file (.json or .toml).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: $GOSPAL_OUT_DIR, then ".").
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CompareArgs {
    /// Graph file (JSON).
    #[arg(long)]
    graph: PathBuf,
    /// Inline bids, e.g. 5,7,8,9,6,9.
    #[arg(long, value_delimiter = ',', conflicts_with = "bids_file")]
    bids: Option<Vec<f64>>,
    /// File with a JSON array of bids.
    #[arg(long)]
    bids_file: Option<PathBuf>,
    /// Mechanisms to compare (default: all four, skipping vcg above its cap).
    #[arg(long, value_delimiter = ',')]
    mechanisms: Option<Vec<String>>,
    /// Master seed (used for the grouping); random when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Pin the grouping instead of randomizing, e.g. "1,5|2,4|3,6".
    #[arg(long)]
    partition: Option<String>,
}

enum CliError {
    Validation(String),
    Cap(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Cap(m) | CliError::Io(m) => m,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<MechanismError> for CliError {
    fn from(e: MechanismError) -> Self {
        match e {
            MechanismError::OrderingCapExceeded { .. }
            | MechanismError::SolverCapExceeded { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Io(_) => CliError::Io(e.to_string()),
            SimError::Graph(g) => g.into(),
            SimError::Mechanism(m) => m.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Graph {
            command: GraphCommand::Gen(args),
        } => graph_gen(args),
        Command::Auction {
            command: AuctionCommand::Run(args),
        } => auction_run(args),
        Command::Experiment {
            command: ExperimentCommand::Run(args),
        } => experiment_run(args),
        Command::Compare(args) => compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

/// Every run reports the seed actually used, so it can be replayed.
fn effective_seed(requested: Option<u64>) -> u64 {
    let seed = requested.unwrap_or_else(rand::random);
    eprintln!("master seed: {seed}");
    seed
}

fn graph_gen(args: GraphGenArgs) -> Result<(), CliError> {
    let seed = effective_seed(args.seed);
    let support = args
        .support
        .unwrap_or_else(|| (1..=args.pmf.len()).collect());
    let dist = DegreeDistribution::new(support, args.pmf)?;
    let graph = generate_configuration_model(args.n, &dist, seed)?;
    store_graph(&graph, &args.out)?;
    eprintln!(
        "wrote {} (n = {}, edges = {}, max degree = {})",
        args.out.display(),
        graph.n(),
        graph.edge_count(),
        graph.max_degree()
    );
    Ok(())
}

fn read_bids(inline: Option<Vec<f64>>, file: Option<&Path>) -> Result<BidVector, CliError> {
    let raw = match (inline, file) {
        (Some(bids), _) => bids,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<Vec<f64>>(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        }
        (None, None) => {
            return Err(CliError::Validation(
                "either --bids or --bids-file is required".to_string(),
            ))
        }
    };
    Ok(BidVector::new(raw)?)
}

fn parse_partition(spec: &str, g: &ConflictGraph) -> Result<GroupPartition, CliError> {
    let mut groups = Vec::new();
    for part in spec.split('|') {
        let members = part
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| CliError::Validation(format!("bad partition entry {s:?}: {e}")))
            })
            .collect::<Result<Vec<usize>, CliError>>()?;
        groups.push(members);
    }
    Ok(GroupPartition::new(g, groups)?)
}

fn resolve_partition(
    spec: Option<&str>,
    g: &ConflictGraph,
    seed: u64,
) -> Result<GroupPartition, CliError> {
    match spec {
        Some(s) => parse_partition(s, g),
        None => Ok(conflict_free_grouping(g, seed)),
    }
}

/// Rounds every number in a JSON tree to 6 significant digits.
fn round_numbers(value: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match value {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.as_i64().is_none() && n.as_u64().is_none() => {
                let rounded: f64 = sig6(x).parse().unwrap_or(x);
                serde_json::Number::from_f64(rounded)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            }
            _ => Value::Number(n),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(round_numbers).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_numbers(v))).collect())
        }
        other => other,
    }
}

fn single_auction_metrics(outcome: &AuctionOutcome, values: &ValueVector) -> serde_json::Value {
    let counts: Vec<usize> = (1..=values.len())
        .map(|i| outcome.allocation.is_allocated(i) as usize)
        .collect();
    let report = MetricsReport::for_frame(outcome, values, &counts, 1);
    serde_json::json!({
        "social_welfare": report.social_welfare,
        "utilization": report.utilization,
        "per_user_utility": report.per_user_utility,
        "jain_index": report.jain_index,
    })
}

fn auction_run(args: AuctionRunArgs) -> Result<(), CliError> {
    let seed = effective_seed(args.seed);
    let graph = load_graph(&args.graph)?;
    let bids = read_bids(args.bids, args.bids_file.as_deref())?;
    let mechanism: MechanismTag = args.mechanism.parse()?;
    let partition = resolve_partition(args.partition.as_deref(), &graph, seed)?;
    let outcome = run_mechanism(mechanism, &graph, &bids, Some(&partition))?;

    println!("{}", round_numbers(outcome.to_json()));
    // Truthful reading: reported welfare treats bids as valuations.
    let values = ValueVector::new(bids.as_slice().to_vec())?;
    println!("{}", round_numbers(single_auction_metrics(&outcome, &values)));
    Ok(())
}

fn experiment_run(args: ExperimentRunArgs) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    eprintln!("master seed: {}", cfg.seed);

    let out_dir = args
        .out_dir
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)?;

    let result = run_repeated_auction(&cfg)?;

    let csv_path = out_dir.join("frames.csv");
    let mut csv_bytes = Vec::new();
    write_frames_csv(&result, &mut csv_bytes)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", csv_path.display())))?;
    fs::write(&csv_path, csv_bytes)?;

    let summary = summary_json(&result);
    let json_path = out_dir.join("summary.json");
    fs::write(&json_path, format!("{summary:#}\n"))?;

    eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
    println!("{summary}");
    Ok(())
}

fn compare(args: CompareArgs) -> Result<(), CliError> {
    let seed = effective_seed(args.seed);
    let graph = load_graph(&args.graph)?;
    let bids = read_bids(args.bids, args.bids_file.as_deref())?;
    let partition = resolve_partition(args.partition.as_deref(), &graph, seed)?;

    let mechanisms: Vec<MechanismTag> = match &args.mechanisms {
        Some(tags) => tags
            .iter()
            .map(|t| t.parse::<MechanismTag>().map_err(CliError::from))
            .collect::<Result<_, _>>()?,
        None => {
            let mut all = MechanismTag::ALL.to_vec();
            if graph.n() > DEFAULT_MWIS_CAP {
                eprintln!(
                    "note: skipping vcg (n = {} exceeds exact-solver cap {})",
                    graph.n(),
                    DEFAULT_MWIS_CAP
                );
                all.retain(|&t| t != MechanismTag::Vcg);
            }
            all
        }
    };

    let mut table = String::new();
    writeln!(
        table,
        "{:<10} {:>12} {:>12} {:>12} {:>10}",
        "mechanism", "welfare", "utilization", "revenue", "jain"
    )
    .unwrap();
    for mechanism in mechanisms {
        let outcome = run_mechanism(mechanism, &graph, &bids, Some(&partition))?;
        let counts: Vec<usize> = (1..=graph.n())
            .map(|i| outcome.allocation.is_allocated(i) as usize)
            .collect();
        let fractions: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        let jain = jain_index(&fractions).unwrap_or(0.0);
        let revenue: f64 = outcome.prices.iter().sum();
        writeln!(
            table,
            "{:<10} {:>12} {:>12} {:>12} {:>10}",
            mechanism.to_string(),
            sig6(outcome.perceived_utility),
            outcome.allocation.count(),
            sig6(revenue),
            sig6(jain)
        )
        .unwrap();
    }
    print!("{table}");
    Ok(())
}
