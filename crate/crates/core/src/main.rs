use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use venuerisk::harness::{calibrate_pi, run_study};
use venuerisk::io::{
    estimate_participants, load_config, load_participants, write_calibration, write_edges, write_estimate,
    write_study, LoadedConfig,
};
use venuerisk::network::project_weights;
use venuerisk::parallel::with_threads;
use venuerisk::scenarios::ScenarioKind;
use venuerisk::{Error, Result};

#[derive(Parser)]
#[command(name = "venuerisk", version, about = "Venue-based HIV risk estimation and replication studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replication study and write summary.json and replications.csv.
    Simulate(SimulateArgs),
    /// Sweep transmission probabilities and write calibration.csv.
    Calibrate(CalibrateArgs),
    /// Score participants with the venue risk estimator and the baselines.
    Estimate(EstimateArgs),
    /// Write the venue-to-venue projection as an edge list.
    Project(ProjectArgs),
}

#[derive(Args)]
struct Threads {
    /// Worker threads for the replication pool (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Transmission probability; repeat for several.
    #[arg(long = "pi")]
    pi: Vec<f64>,
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    #[arg(long)]
    two_cluster: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[command(flatten)]
    threads: Threads,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pi_grid: Vec<f64>,
    #[arg(long)]
    reps: usize,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    threads: Threads,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    pi: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn in_pool<R: Send>(threads: &Threads, f: impl FnOnce() -> R + Send) -> R {
    match threads.threads {
        Some(n) => with_threads(n, f),
        None => f(),
    }
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let LoadedConfig { mut study, base } = load_config(&args.config)?;
    if !args.pi.is_empty() {
        study.pi_values = args.pi;
    }
    if let Some(kind) = args.scenario {
        study.scenario.kind = kind;
    }
    if args.two_cluster && study.two_cluster.is_none() {
        study.two_cluster = Some(Default::default());
    }
    if let Some(seed) = args.seed {
        study.master_seed = seed;
    }
    if let Some(reps) = args.reps {
        study.replications = reps;
    }
    let base = base.load()?;
    let output = in_pool(&args.threads, || run_study(&study, &base))?;
    report(&write_study(&output, &args.out)?);
    Ok(())
}

fn calibrate(args: CalibrateArgs) -> Result<()> {
    let LoadedConfig { study, base } = load_config(&args.config)?;
    let base = base.load()?;
    let curve = in_pool(&args.threads, || calibrate_pi(&base, &args.pi_grid, args.reps, &study))?;
    report(&[write_calibration(&curve, &args.out)?]);
    Ok(())
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let table = load_participants(&args.data)?;
    let scored = estimate_participants(&table, args.pi)?;
    report(&write_estimate(&scored, &table, &args.out)?);
    Ok(())
}

fn project(args: ProjectArgs) -> Result<()> {
    let table = load_participants(&args.data)?;
    let sample = table.sample_data()?;
    let graph = project_weights(sample.z.view());
    report(&[write_edges(&graph, &table.venues, &args.out)?]);
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::DegenerateStudy { .. } => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Estimate(a) => estimate(a),
        Command::Project(a) => project(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
