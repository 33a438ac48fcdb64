//! Command-line front end: experiment configs in, traces and reports out.

pub mod config;
pub mod output;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use catvisc::exec::Execution;
use catvisc::lemma_suite::{self, SuiteOptions, SUITE_NAMES};
use catvisc::projections::project_segment;
use catvisc::viscosity;
use catvisc::GeodesicSegment;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ExperimentConfig, ProjectQuery};

/// Failures, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad usage or configuration, including a violated hypothesis (exit 2).
    Config(String),
    /// A runtime invariant or a checked inequality failed (exit 1).
    Failure(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Failure(_) => ExitCode::from(1),
        }
    }
}

impl From<catvisc::Error> for CliError {
    fn from(e: catvisc::Error) -> Self {
        use catvisc::Error as E;
        match e {
            E::RuntimeInvariant { .. } | E::Divergence(_) => CliError::Failure(e.to_string()),
            E::Config { ref hypothesis, .. } => {
                CliError::Config(format!("hypothesis violated: {hypothesis}\n{e}"))
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "catvisc", version, about = "Viscosity iteration and lemma checks on CAT(kappa) model spaces")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the viscosity iteration from a config file.
    Iterate(IterateArgs),
    /// Run the iteration with f replaced by the constant map to u.
    Halpern(IterateArgs),
    /// Print the two-triangle complex that violates the N-property.
    Counterexample {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the randomized inequality suites.
    Lemmas(LemmaArgs),
    /// Project a point onto a geodesic segment.
    Project {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// CSV trace path; overrides `output.trace` in the config.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// JSON summary path; overrides `output.summary`. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Allow the glued complex, which lacks the N-property. Results are
    /// reported but carry no convergence claim.
    #[arg(long = "explore-no-N")]
    pub explore_no_n: bool,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    /// One of lemma-3-1, lemma-3-2, lemma-3-3, h, or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Break every checked inequality, to confirm the suites can fail.
    #[arg(long, hide = true)]
    pub mutate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Runs a parsed command line, printing errors to stderr.
pub fn run(cli: Cli) -> ExitCode {
    let stdout = io::stdout();
    match dispatch(cli, &mut stdout.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Iterate(args) => iterate(&args, false, cli.seed, out),
        Command::Halpern(args) => iterate(&args, true, cli.seed, out),
        Command::Counterexample { format } => counterexample(format, out),
        Command::Lemmas(args) => lemmas(&args, cli.seed, out),
        Command::Project { config, out: path } => project(&config, path.as_deref(), out),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => writeln!(out, "{text}").map_err(|e| CliError::Failure(format!("cannot write output: {e}"))),
    }
}

fn iterate(args: &IterateArgs, halpern: bool, seed: u64, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    let config: ExperimentConfig = config::parse(&read(&args.config)?)?;
    let cfg = config.build(halpern, args.explore_no_n, seed)?;
    let trace = viscosity::run_viscosity(&cfg)?;

    if let Some(path) = args.trace.as_ref().or(config.output.trace.as_ref()) {
        write_file(path, output::trace_csv(&trace).as_bytes())?;
    }
    let summary = output::Summary::new(if halpern { "halpern" } else { "iterate" }, config.clone(), seed, &trace);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    emit(args.out.as_ref().or(config.output.summary.as_ref()).map(|p| p.as_path()), &json, out)?;
    if args.explore_no_n && !trace.report.n_property {
        eprintln!("note: the space lacks the N-property; the run is exploratory and carries no convergence claim");
    }
    Ok(ExitCode::SUCCESS)
}

fn counterexample(format: Format, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    let report = catvisc::glued::standard().n_property_witness()?;
    let text = match format {
        Format::Text => output::counterexample_text(&report),
        Format::Json => output::counterexample_json(&report),
    };
    emit(None, &text, out)?;
    Ok(ExitCode::SUCCESS)
}

fn lemmas(args: &LemmaArgs, seed: u64, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be positive".into()));
    }
    if args.suite != "all" && !SUITE_NAMES.contains(&args.suite.as_str()) {
        return Err(CliError::Config(format!(
            "unknown suite {:?}; expected one of {} or all",
            args.suite,
            SUITE_NAMES.join(", ")
        )));
    }
    let opts = SuiteOptions {
        trials: args.trials,
        seed,
        execution: Execution::default(),
        mutate: args.mutate,
    };
    let reports = lemma_suite::run_suite(&args.suite, &opts)?;
    let report = output::LemmaReport::new(seed, args.trials, reports);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = &args.out {
        write_file(path, json.as_bytes())?;
    }
    match args.format {
        Format::Json => emit(None, &json, out)?,
        Format::Text => emit(None, &output::lemma_text(&report), out)?,
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn project(path: &Path, out_path: Option<&Path>, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    let query: ProjectQuery = config::parse(&read(path)?)?;
    let space = query.space.build()?;
    let seg = GeodesicSegment::new(&space, query.a.build(&space)?, query.b.build(&space)?)?;
    let x = query.x.build(&space)?;
    let result = project_segment(&space, &seg, &x)?;
    let json = serde_json::to_string_pretty(&result).expect("projection serializes");
    emit(out_path, &json, out)?;
    Ok(ExitCode::SUCCESS)
}
