//! `rfpns`: generate instances, run single optimizations, and execute
//! seeded benchmark suites.
//!
//! Exit codes: 0 success, 2 invalid flags or configuration, 3 I/O failure,
//! 4 runtime failure (for example an absorbing state).

mod error;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use rfpns::bench::{
    self, instance_rng, render_table, render_tts_table, run_on_instance_recorded, AlgorithmSpec,
    ExperimentSpec, InitialState, ManifestSpec, ProblemSpec, TtsSpec,
};
use rfpns::numerics::{RngStream, ScheduleSpec};
use rfpns::optimizers::{write_visits_csv, PnsMethod};
use rfpns::problems::{Instance, DEFAULT_MAX_ATTEMPTS, DEFAULT_STEP_SIGMA};

use error::{CliError, EXIT_CONFIG};

#[derive(Debug, Parser)]
#[command(name = "rfpns", version, about = "Rejection-free annealing and partial neighbor search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random problem instance and write it as JSON.
    Generate(GenerateArgs),
    /// Run one optimizer on an instance file.
    Run(RunArgs),
    /// Run a seeded comparison suite described by a JSON spec.
    Bench(SuiteArgs),
    /// Run a time-to-solution study described by a JSON spec.
    Tts(SuiteArgs),
    /// Render the summary of a finished bench or tts run.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Qubo,
    Knapsack,
    Ising3xor,
    Simplexqp,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of variables.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Knapsack capacity W.
    #[arg(long)]
    capacity: Option<f64>,
    /// Leave the QUBO diagonal at zero.
    #[arg(long)]
    no_diagonal: bool,
    /// Proposal scale for simplex instances.
    #[arg(long)]
    step_sigma: Option<f64>,
    /// Retries for drawing an invertible 3R3XOR system.
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    max_attempts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Initial {
    Default,
    Random,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Instance JSON written by `generate`.
    #[arg(long)]
    instance: PathBuf,
    /// `sa`, `rf`, `pns` or `tabu`, or a full algorithm string such as
    /// `pns:B:0.5` or `pns:count:20`.
    #[arg(long)]
    alg: String,
    /// Subset fraction for `pns`.
    #[arg(long)]
    fraction: Option<f64>,
    /// Subset method for `pns`: A, B, C or D.
    #[arg(long)]
    method: Option<PnsMethod>,
    /// Fixed number of candidates for `pns`, instead of a fraction.
    #[arg(long)]
    count: Option<usize>,
    /// Tabu window length for `tabu`.
    #[arg(long)]
    tabu_length: Option<usize>,
    /// `constant:<T>` or `geometric:<T0>:<T1>`.
    #[arg(long, default_value = "constant:1")]
    schedule: ScheduleSpec,
    /// Number of steps.
    #[arg(long)]
    iters: usize,
    /// Random seed; derived from the clock and echoed when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Initial::Default)]
    initial: Initial,
    /// Write every visited state as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Record cumulative wall time in the trace.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// JSON spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Base seed; overrides the one in the spec.
    #[arg(long)]
    seed: u64,
    /// Output prefix: writes `<out>samples.csv`, `<out>summary.csv` and
    /// `<out>manifest.json`.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads. Results do not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Manifest JSON written by `bench` or `tts`.
    #[arg(long)]
    manifest: PathBuf,
    /// Also write one long-form row per run, for plotting.
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Generate(args) => generate(&args),
        Command::Run(args) => run(&args),
        Command::Bench(args) => bench_suite(&args),
        Command::Tts(args) => tts_suite(&args),
        Command::Report(args) => report(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn generate(args: &GenerateArgs) -> Result<(), CliError> {
    let problem = match args.kind {
        Kind::Qubo => ProblemSpec::Qubo {
            n: args.n,
            with_diagonal: !args.no_diagonal,
        },
        Kind::Knapsack => ProblemSpec::Knapsack {
            n: args.n,
            capacity: args
                .capacity
                .ok_or_else(|| CliError::Config("knapsack needs --capacity".into()))?,
        },
        Kind::Ising3xor => ProblemSpec::IsingXor {
            n: args.n,
            max_attempts: args.max_attempts,
        },
        Kind::Simplexqp => ProblemSpec::SimplexQp {
            n: args.n,
            step_sigma: args.step_sigma.unwrap_or(DEFAULT_STEP_SIGMA),
        },
    };
    if args.capacity.is_some() && args.kind != Kind::Knapsack {
        return Err(CliError::Config("--capacity only applies to knapsack".into()));
    }
    if args.step_sigma.is_some() && args.kind != Kind::Simplexqp {
        return Err(CliError::Config("--step-sigma only applies to simplexqp".into()));
    }
    if args.no_diagonal && args.kind != Kind::Qubo {
        return Err(CliError::Config("--no-diagonal only applies to qubo".into()));
    }
    problem.validate()?;
    // slot 0 of the bench instance stream, so `bench` with the same base
    // seed reproduces this instance first
    let instance = problem.generate(&mut instance_rng(args.seed, 0))?;
    let text = instance.to_json() + "\n";
    fs::write(&args.out, &text).map_err(|e| CliError::io(&args.out, e))?;
    println!("kind {}", instance.kind());
    println!("n {}", instance.n());
    if let Instance::IsingXor(x) = &instance {
        println!("clauses {}", x.clauses().len());
    }
    println!("sha256 {}", sha256_hex(text.as_bytes()));
    Ok(())
}

fn algorithm_from_flags(args: &RunArgs) -> Result<AlgorithmSpec, CliError> {
    let pns_flags = args.fraction.is_some() || args.method.is_some() || args.count.is_some();
    let spec = match args.alg.as_str() {
        "sa" | "rf" if pns_flags || args.tabu_length.is_some() => {
            return Err(CliError::Config(format!("{} takes no subset or tabu flags", args.alg)))
        }
        "pns" if args.tabu_length.is_some() => {
            return Err(CliError::Config("--tabu-length only applies to tabu".into()))
        }
        "pns" => match (args.count, args.fraction) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either --count or --fraction, not both".into()))
            }
            (Some(count), None) if args.method.is_none() => AlgorithmSpec::PnsCount { count },
            (Some(_), None) => {
                return Err(CliError::Config("--method cannot be combined with --count".into()))
            }
            (None, Some(fraction)) => AlgorithmSpec::Pns {
                method: args.method.unwrap_or(PnsMethod::RandomEveryStep),
                fraction,
            },
            (None, None) => return Err(CliError::Config("pns needs --fraction or --count".into())),
        },
        "tabu" if pns_flags => {
            return Err(CliError::Config("tabu takes no subset flags".into()))
        }
        "tabu" => AlgorithmSpec::Tabu {
            length: args
                .tabu_length
                .ok_or_else(|| CliError::Config("tabu needs --tabu-length".into()))?,
        },
        other if pns_flags || args.tabu_length.is_some() => {
            return Err(CliError::Config(format!(
                "'{other}' already fixes its parameters; drop the extra flags"
            )))
        }
        other => other.parse().map_err(CliError::Config)?,
    };
    spec.strategy()?;
    Ok(spec)
}

fn clock_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let alg = algorithm_from_flags(args)?;
    let initial = match args.initial {
        Initial::Default => InitialState::Default,
        Initial::Random => InitialState::Random,
    };
    let instance = Instance::load(&args.instance)?;
    if initial == InitialState::Random
        && !matches!(instance, Instance::Qubo(_) | Instance::IsingXor(_))
    {
        return Err(CliError::Config(
            "--initial random is only offered for qubo and ising3xor".into(),
        ));
    }
    if matches!(instance, Instance::SimplexQp(_))
        && !matches!(alg, AlgorithmSpec::Sa | AlgorithmSpec::PnsCount { .. })
    {
        return Err(CliError::Config(format!(
            "{alg} is not defined on the simplex; use sa or pns with --count"
        )));
    }
    let config = alg
        .config(&args.schedule, args.iters)?
        .recording(args.trace.is_some())
        .with_timing(args.timing);
    config.validate()?;
    if config.pns.is_some() {
        config.evaluations_per_step(instance.n())?;
    }
    let seed = args.seed.unwrap_or_else(clock_seed);
    println!("SEED {seed}");
    let record = run_on_instance_recorded(&instance, initial, &config, &RngStream::new(seed, 0))?;
    if let Some(path) = &args.trace {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        write_visits_csv(&record.visited, BufWriter::new(file)).map_err(|e| CliError::io(path, e))?;
    }
    let out = record.outcome;
    println!("EVALUATIONS {}", out.evaluations);
    println!("STEPS_RUN {}", out.steps);
    println!("BEST {} STEPS {}", out.best, out.steps_to_best);
    Ok(())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn bench_suite(args: &SuiteArgs) -> Result<(), CliError> {
    let mut spec = ExperimentSpec::from_json(&read_text(&args.spec)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.spec.display())))?;
    spec.base_seed = args.seed;
    spec.validate()?;
    let summary = bench::run_experiment(&spec, args.jobs)?;
    let files = bench::summarize_to_files(&summary, &args.out)?;
    print!("{}", render_table(&summary.rows));
    println!("SAMPLES {}", files.samples.display());
    println!("MANIFEST {}", files.manifest.display());
    if !summary.failures.is_empty() {
        return Err(CliError::Runtime(format!(
            "{} of {} runs failed; see the manifest",
            summary.failures.len(),
            summary.failures.len() + summary.completed
        )));
    }
    Ok(())
}

fn tts_suite(args: &SuiteArgs) -> Result<(), CliError> {
    let mut spec = TtsSpec::from_json(&read_text(&args.spec)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.spec.display())))?;
    spec.base_seed = args.seed;
    spec.validate()?;
    let summary = bench::time_to_solution(&spec, args.jobs)?;
    let files = bench::tts_to_files(&summary, &args.out)?;
    print!("{}", render_tts_table(&summary.rows));
    println!("SAMPLES {}", files.samples.display());
    println!("MANIFEST {}", files.manifest.display());
    if !summary.failures.is_empty() {
        return Err(CliError::Runtime(format!(
            "{} runs failed; see the manifest",
            summary.failures.len()
        )));
    }
    Ok(())
}

fn report(args: &ReportArgs) -> Result<(), CliError> {
    let manifest = bench::read_manifest(&args.manifest)?;
    let dir = args.manifest.parent().unwrap_or(Path::new("."));
    let summary_path = dir.join(&manifest.summary_file);
    let samples_path = dir.join(&manifest.samples_file);
    match &manifest.run {
        ManifestSpec::Experiment(_) => {
            let rows = bench::read_summary_csv(&summary_path)?;
            print!("{}", render_table(&rows));
            if let Some(plot) = &args.plot {
                let samples = bench::read_samples_csv(&samples_path)?;
                bench::write_csv(plot, &bench::plot_rows(&samples))?;
            }
        }
        ManifestSpec::Tts(_) => {
            let rows = bench::read_tts_summary_csv(&summary_path)?;
            print!("{}", render_tts_table(&rows));
            if let Some(plot) = &args.plot {
                let samples = bench::read_tts_samples_csv(&samples_path)?;
                bench::write_csv(plot, &samples)?;
            }
        }
    }
    if !manifest.failures.is_empty() {
        println!("FAILURES {}", manifest.failures.len());
    }
    Ok(())
}
