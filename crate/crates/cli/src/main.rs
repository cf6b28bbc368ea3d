use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minimax_cli::{data_root, parse_k_range, run, CliError, OutputFormat, RunConfig};
use minimax_core::datagen::{generate, Family, SimSpec};
use minimax_core::ingest::write_features;
use minimax_core::{Linkage, Metric};

/// Compare linkage rules for hierarchical clustering across every cluster count.
///
/// Without a subcommand, runs the benchmark.
#[derive(Parser)]
#[command(name = "minimax", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    bench: BenchArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run the benchmark (the default).
    Bench(BenchArgs),
    /// Write a simulated dataset as a feature CSV.
    Generate(GenerateArgs),
}

#[derive(Args, Default)]
struct BenchArgs {
    /// Directory that descriptor and data paths are relative to
    /// [env: MINIMAX_DATA_ROOT; default: ./data].
    #[arg(long)]
    data_root: Option<PathBuf>,
    /// Dataset name, descriptor path, or built-in simulation such as
    /// `spherical-l2`. Repeatable.
    #[arg(long = "dataset")]
    datasets: Vec<String>,
    /// Linkage rule (single, complete, average, centroid, centroid-means,
    /// minimax). Repeatable; defaults to the standard five.
    #[arg(long = "linkage")]
    linkages: Vec<String>,
    /// Inclusive cluster-count range `a:b`, or a single `k`.
    #[arg(long, value_parser = parse_k_range)]
    k_range: Option<(usize, usize)>,
    /// Seed for simulated datasets.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
    /// Override the dataset metric: L1, L2 or correlation.
    #[arg(long)]
    metric: Option<String>,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    Csv,
    Svg,
    #[default]
    Both,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    points_per_cluster: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let mut config = RunConfig::new(data_root(args.data_root), args.out_dir);
    config.datasets = args.datasets;
    if !args.linkages.is_empty() {
        config.linkages = args
            .linkages
            .iter()
            .map(|l| l.parse::<Linkage>().map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<_, _>>()?;
    }
    config.k_range = args.k_range;
    config.seed = args.seed;
    config.format = match args.format {
        Format::Csv => OutputFormat::Csv,
        Format::Svg => OutputFormat::Svg,
        Format::Both => OutputFormat::Both,
    };
    config.metric = args
        .metric
        .map(|m| m.parse::<Metric>().map_err(|e| CliError::Config(e.to_string())))
        .transpose()?;

    let output = run(&config)?;
    if !output.report.rows.is_empty() {
        print!("{}", output.report.render_text());
    }
    eprintln!(
        "wrote {} curve rows for {} dataset(s) to {}",
        output.curves.rows.len(),
        output.curves.datasets().len(),
        config.out_dir.display()
    );
    Ok(())
}

fn generate_cmd(args: GenerateArgs) -> Result<(), CliError> {
    let family: Family = args
        .family
        .parse()
        .map_err(|e: minimax_core::Error| CliError::Config(e.to_string()))?;
    let mut spec = SimSpec::new(family, args.seed);
    if let Some(v) = args.clusters {
        spec.clusters = v;
    }
    if let Some(v) = args.points_per_cluster {
        spec.points_per_cluster = v;
    }
    if let Some(v) = args.dim {
        spec.dim = v;
    }
    let sim = generate(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?),
        None => Box::new(io::stdout().lock()),
    };
    write_features(&sim.features, &sim.labels, out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Some(Command::Generate(args)) => generate_cmd(args),
        Some(Command::Bench(args)) => bench(args),
        None => bench(cli.bench),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
