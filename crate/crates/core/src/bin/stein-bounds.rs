use clap::{Parser, Subcommand, ValueEnum};
use stein_core::bounds::{write_records, BoundReport};
use stein_core::error::SteinError;
use stein_core::harness::{
    be_sweep, rademacher_spec, run, ExperimentConfig, ExperimentReport, Format, ModelSpec, OutputSpec,
    RandomAdmissible, TaskParams,
};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DOMINATION: u8 = 3;

#[derive(Parser)]
#[command(name = "stein-bounds", version, about = "Normal-approximation bounds checked against exact and Monte Carlo distances")]
struct Cli {
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo replications (overrides the config).
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<CliFormat>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Json,
    Csv,
}

impl From<CliFormat> for Format {
    fn from(f: CliFormat) -> Self {
        match f {
            CliFormat::Json => Format::Json,
            CliFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a JSON experiment config.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check one Stein identity on a built-in model.
    Verify {
        #[arg(value_enum)]
        identity: Identity,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
    },
    /// Canned sweeps.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    Characterization,
    ZeroBias,
    Regression,
    Antisymmetry,
    Generator,
}

impl Identity {
    fn task(self) -> &'static str {
        match self {
            Identity::Characterization => "characterization",
            Identity::ZeroBias => "zero_bias_identity",
            Identity::Regression => "regression",
            Identity::Antisymmetry => "antisymmetry",
            Identity::Generator => "generator_identity",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    IidRademacher,
    /// Random admissible n×n array, generated from the seed.
    Combinatorial,
}

#[derive(Subcommand)]
enum Experiment {
    /// Berry–Esseen and Wasserstein bounds for iid Rademacher sums over n.
    BeSweep {
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
}

enum Failure {
    Config(SteinError),
    Run(SteinError),
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Run(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_seed(seed: Option<u64>) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure::Config(SteinError::Config("--seed is required".into())))
}

fn run_config(cfg: &ExperimentConfig) -> Result<ExperimentReport, Failure> {
    run(cfg).map_err(|e| match e {
        SteinError::Config(_) | SteinError::UnknownTask(_) | SteinError::TaskMismatch { .. } | SteinError::Matrix(_) => {
            Failure::Config(e)
        }
        e => Failure::Run(e),
    })
}

fn checks_csv(report: &ExperimentReport) -> Result<String, SteinError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["task", "name", "residual", "std_err", "tolerance", "passed"])?;
    for c in &report.checks {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            c.task.clone(),
            c.name.clone(),
            c.residual.to_string(),
            opt(c.std_err),
            opt(c.tolerance),
            c.passed.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| SteinError::Io(e.into_error()))?).expect("utf-8"))
}

fn main_inner(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Bounds { config } => {
            let mut cfg = ExperimentConfig::load(&config).map_err(Failure::Config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(r) = cli.reps {
                cfg.reps = r;
            }
            if let Some(t) = cli.threads {
                cfg.threads = Some(t);
            }
            if let Some(f) = cli.format {
                cfg.output.format = f.into();
            }
            if let Some(o) = &cli.out {
                cfg.output.path = Some(o.clone());
            }
            cfg.validate().map_err(Failure::Config)?;
            let report = run_config(&cfg)?;
            emit(&report.render(cfg.output.format).map_err(Failure::Run)?, cfg.output.path.as_ref())?;
            for e in &report.errors {
                eprintln!("task {} failed: {}", e.task, e.message);
            }
            Ok(if report.has_exact_violation() {
                EXIT_DOMINATION
            } else if !report.errors.is_empty() {
                EXIT_FAILURE
            } else {
                0
            })
        }
        Command::Verify { identity, model, n } => {
            let seed = require_seed(cli.seed)?;
            let spec = match model {
                ModelArg::IidRademacher => rademacher_spec(n),
                ModelArg::Combinatorial => ModelSpec::Combinatorial {
                    matrix_path: None,
                    random_admissible: Some(RandomAdmissible { n, seed }),
                },
            };
            let format: Format = cli.format.map(Into::into).unwrap_or_default();
            let cfg = ExperimentConfig {
                model: spec,
                tasks: vec![identity.task().to_string()],
                reps: cli.reps.unwrap_or(100_000),
                seed,
                output: OutputSpec { path: cli.out.clone(), format },
                threads: cli.threads,
                params: TaskParams::default(),
            };
            cfg.validate().map_err(Failure::Config)?;
            let report = run_config(&cfg)?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => checks_csv(&report),
            }
            .map_err(Failure::Run)?;
            emit(&text, cli.out.as_ref())?;
            for e in &report.errors {
                eprintln!("task {} failed: {}", e.task, e.message);
            }
            Ok(if report.errors.is_empty() && report.all_checks_passed() { 0 } else { EXIT_FAILURE })
        }
        Command::Experiment { which: Experiment::BeSweep { n } } => {
            let seed = require_seed(cli.seed)?;
            let reps = cli.reps.unwrap_or(100_000);
            if reps < stein_core::harness::MIN_REPS {
                return Err(Failure::Config(SteinError::Config(format!("reps = {reps} < {}", stein_core::harness::MIN_REPS))));
            }
            if let Some(0) = cli.threads {
                return Err(Failure::Config(SteinError::Config("threads must be positive".into())));
            }
            let sweep = || be_sweep(&n, reps, seed, stein_core::distributions::DEFAULT_STATE_CAP);
            let rows = match cli.threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Failure::Config(SteinError::Config(e.to_string())))?
                    .install(sweep),
                None => sweep(),
            }
            .map_err(|e| match e {
                SteinError::Config(_) => Failure::Config(e),
                e => Failure::Run(e),
            })?;
            let text = render_rows(&rows, cli.format.map(Into::into).unwrap_or_default()).map_err(Failure::Run)?;
            emit(&text, cli.out.as_ref())?;
            Ok(if rows.iter().any(BoundReport::exact_violation) { EXIT_DOMINATION } else { 0 })
        }
    }
}

fn render_rows(rows: &[BoundReport], format: Format) -> Result<String, SteinError> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_records(rows, &mut buf)?;
            Ok(String::from_utf8(buf).expect("utf-8"))
        }
        Format::Json => {
            let records: Vec<_> = rows.iter().map(BoundReport::record).collect();
            Ok(serde_json::to_string_pretty(&records)? + "\n")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
