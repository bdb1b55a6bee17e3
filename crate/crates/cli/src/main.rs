use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use summstat_core::batch::{process_file, MethodDefaults, StudyRecord};
use summstat_core::format::format_trimmed;
use summstat_core::order_stats::{generate_table, TableKind};
use summstat_core::simulation::{
    default_rules, quartile_grid, run_configs, write_cells_csv, DistributionSpec, SdRule,
    SimulationConfig, Study, DEFAULT_REPS, DEFAULT_SEED,
};
use summstat_core::{MethodId, Scenario};

const THREADS_VAR: &str = "SUMMSTAT_THREADS";

#[derive(Parser)]
#[command(
    name = "summstat",
    version,
    about = "Estimate sample mean and standard deviation from reported summary statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate mean and standard deviation for one study.
    Estimate(EstimateArgs),
    /// Print the range and interquartile scaling constants.
    Tables(TablesArgs),
    /// Run a simulation study and write per-cell relative errors as CSV.
    Simulate(SimulateArgs),
    /// Enrich a CSV file of study summaries.
    Batch(BatchArgs),
}

fn positive(s: &str) -> std::result::Result<u64, String> {
    match s.parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err("expected a positive integer".into()),
    }
}

fn mean_method(s: &str) -> std::result::Result<MethodId, String> {
    let m: MethodId = s.parse().map_err(|e: summstat_core::Error| e.to_string())?;
    if m.is_mean() {
        Ok(m)
    } else {
        Err(format!("'{s}' is not a mean method"))
    }
}

fn sd_method(s: &str) -> std::result::Result<MethodId, String> {
    let m: MethodId = s.parse().map_err(|e: summstat_core::Error| e.to_string())?;
    if m.is_mean() {
        Err(format!("'{s}' is not a standard deviation method"))
    } else {
        Ok(m)
    }
}

#[derive(Args)]
struct EstimateArgs {
    /// Sample size.
    #[arg(long)]
    n: u64,
    #[arg(long, allow_hyphen_values = true)]
    min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    median: f64,
    #[arg(long, allow_hyphen_values = true)]
    q3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    max: Option<f64>,
    #[arg(long, value_parser = mean_method)]
    mean_method: Option<MethodId>,
    #[arg(long, value_parser = sd_method)]
    sd_method: Option<MethodId>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Xi,
    Eta,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Largest n for xi, largest Q for eta.
    #[arg(long, value_parser = positive)]
    max: u64,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyName {
    #[value(name = "c1-normal")]
    C1Normal,
    #[value(name = "c1-skewed")]
    C1Skewed,
    C2,
    C3,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["study", "custom"]))]
struct SimulateArgs {
    /// Preset study.
    #[arg(long, value_enum)]
    study: Option<StudyName>,
    /// Custom parent distribution, e.g. `normal:50,17`, `lognormal:4,0.3`,
    /// `beta:9,4`, `exponential:10`, `weibull:2,35`.
    #[arg(long)]
    custom: Option<String>,
    /// Custom mode: sample sizes 4Q+1 for Q = 1..=q-max.
    #[arg(long, default_value_t = 50, conflicts_with = "study", value_parser = positive)]
    q_max: u64,
    /// Custom mode: explicit comma-separated sample sizes instead of --q-max.
    #[arg(long, value_delimiter = ',', conflicts_with = "study")]
    n: Option<Vec<u64>>,
    /// Custom mode: scenarios to evaluate.
    #[arg(
        long = "scenario",
        value_delimiter = ',',
        default_value = "C1",
        conflicts_with = "study"
    )]
    scenarios: Vec<String>,
    /// Custom mode: standard deviation rules evaluated for every scenario
    /// (default: a scenario-specific set).
    #[arg(long = "sd-methods", value_delimiter = ',', conflicts_with = "study")]
    sd_methods: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_REPS, value_parser = clap::value_parser!(u32).range(1..))]
    reps: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Mean method for rows that do not name one.
    #[arg(long, value_parser = mean_method)]
    mean_method: Option<MethodId>,
    /// Standard deviation method for rows that do not name one.
    #[arg(long, value_parser = sd_method)]
    sd_method: Option<MethodId>,
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let record = StudyRecord {
        study_id: String::new(),
        n: args.n,
        min: args.min,
        q1: args.q1,
        median: args.median,
        q3: args.q3,
        max: args.max,
        mean_method: args.mean_method,
        sd_method: args.sd_method,
    };
    let e = record.enrich(MethodDefaults::default())?.estimate;
    let flags: Vec<&str> = e.flags.iter().map(|f| f.token()).collect();
    println!("scenario={}", e.scenario);
    println!("mean={}", format_trimmed(e.mean, 6));
    println!("sd={}", format_trimmed(e.sd, 6));
    println!("mean_method={}", e.mean_method);
    println!("sd_method={}", e.sd_method);
    println!("flags={}", flags.join(";"));
    Ok(())
}

fn tables(args: TablesArgs) -> Result<()> {
    let kind = match args.kind {
        Kind::Xi => TableKind::Xi,
        Kind::Eta => TableKind::Eta,
    };
    let table = generate_table(kind, args.max)?;
    emit(args.out.as_deref(), table.to_csv().as_bytes())
}

fn custom_configs(args: &SimulateArgs, spec: &str) -> Result<Vec<SimulationConfig>> {
    let dist: DistributionSpec = spec.parse()?;
    let n_grid = args.n.clone().unwrap_or_else(|| quartile_grid(args.q_max));
    let rules: Option<Vec<SdRule>> = args
        .sd_methods
        .as_ref()
        .map(|v| v.iter().map(|s| s.parse()).collect())
        .transpose()?;
    let mut methods = BTreeMap::new();
    for s in &args.scenarios {
        let scenario: Scenario = s.parse()?;
        methods.insert(
            scenario,
            rules.clone().unwrap_or_else(|| default_rules(scenario)),
        );
    }
    Ok(vec![SimulationConfig {
        dist,
        n_grid,
        reps: args.reps,
        master_seed: args.seed,
        mean_method: MethodId::MeanSimple,
        methods,
    }])
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let configs = match (args.study, args.custom.as_deref()) {
        (Some(study), _) => {
            let study = match study {
                StudyName::C1Normal => Study::C1Normal,
                StudyName::C1Skewed => Study::C1Skewed,
                StudyName::C2 => Study::C2,
                StudyName::C3 => Study::C3,
            };
            study.configs(args.reps, args.seed)
        }
        (None, Some(spec)) => custom_configs(&args, spec)?,
        (None, None) => bail!("either --study or --custom is required"),
    };
    let cells = run_configs(&configs)?;
    let mut buf = Vec::new();
    write_cells_csv(&cells, &mut buf)?;
    emit(args.out.as_deref(), &buf)
}

fn batch(args: BatchArgs) -> Result<()> {
    let defaults = MethodDefaults {
        mean: args.mean_method,
        sd: args.sd_method,
    };
    let counts = process_file(&args.input, &args.output, defaults)?;
    println!(
        "processed={} enriched={} rejected={}",
        counts.processed, counts.enriched, counts.rejected
    );
    Ok(())
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot configure thread pool")
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Tables(a) => tables(a),
        Command::Simulate(a) => simulate(a),
        Command::Batch(a) => batch(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
