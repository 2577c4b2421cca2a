use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonsep_cli::config::{load_config, ConfigFile, Overrides};
use nonsep_cli::record::{read_json_lines, write_csv, write_json_lines};
use nonsep_cli::{run, summarize, CliError, ExperimentConfig, ExperimentKind, OutputFormat, RunRecord};
use nonsep_core::games::MetricKind;
use nonsep_core::{Execution, Label};

/// Exact simulations of Weyl representations and the games built on them.
///
/// Exit status: 0 when every check passes, 1 when a bound or reproduction
/// check fails, 2 on a config error, 3 on an IO error.
#[derive(Parser)]
#[command(name = "nonsep", version)]
struct Cli {
    /// Run trials on the current thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weyl relations on random parameters and kets.
    CcrCheck(RunArgs),
    /// Shift witnesses ruling out eigenvectors of the conjugate Weyl operators.
    LemmaWitness(RunArgs),
    /// Witnesses that no product-representation vector is an EPR state.
    EprWitness(RunArgs),
    /// The sum/difference representation and its exact EPR state.
    GnsDemo(RunArgs),
    /// Guessing game with one basis vector per input.
    GameNonseparable(RunArgs),
    /// Random or fixture strategies against the dimension bound.
    GameFinite(RunArgs),
    /// Seesaw search for the best finite strategy.
    GameOptimize(RunArgs),
    /// Guessing game with an epsilon-ball success criterion.
    GameEpsilon(RunArgs),
    /// Binary chain encoding and decoding.
    ChainRoundtrip(RunArgs),
    /// Runs every `[[experiment]]` of a config file.
    Suite(SuiteArgs),
    /// Renders tables from json-lines record files.
    Summarize { files: Vec<PathBuf> },
    /// Re-runs each record's config echo and compares the results.
    Rerun(RerunArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// json-lines or csv.
    #[arg(long, value_name = "FORMAT")]
    format: Option<OutputFormat>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, value_name = "N")]
    trials: Option<usize>,
    /// Hilbert-space dimension.
    #[arg(long = "n", value_name = "N")]
    n: Option<usize>,
    /// Number of inputs.
    #[arg(long, value_name = "N")]
    inputs: Option<usize>,
    #[arg(long, value_name = "N")]
    restarts: Option<usize>,
    #[arg(long, value_name = "N")]
    iterations: Option<usize>,
    /// Exact rational, e.g. 1/10.
    #[arg(long, value_name = "RATIONAL")]
    epsilon: Option<Label>,
    /// standard, discrete or dyadic.
    #[arg(long, value_name = "METRIC")]
    metric: Option<MetricKind>,
    /// 0, pi/2, pi, 3pi/2 or an exact pair cos,sin such as 3/5,4/5.
    #[arg(long, value_name = "ANGLE")]
    theta: Option<String>,
    #[arg(long = "x", value_name = "RATIONAL", allow_hyphen_values = true)]
    x: Option<Label>,
    #[arg(long = "p", value_name = "RATIONAL", allow_hyphen_values = true)]
    p: Option<Label>,
    #[arg(long, value_name = "N")]
    sites: Option<usize>,
    #[arg(long, value_name = "N")]
    max_support: Option<usize>,
    /// JSON strategy fixture for game-finite.
    #[arg(long, value_name = "PATH")]
    strategy: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Replaces the seed of every experiment.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RerunArgs {
    record_file: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

impl RunArgs {
    fn overrides(self) -> (Option<PathBuf>, Overrides) {
        let o = Overrides {
            seed: self.seed,
            trials: self.trials,
            n: self.n,
            inputs: self.inputs,
            restarts: self.restarts,
            iterations: self.iterations,
            epsilon: self.epsilon,
            metric: self.metric,
            theta: self.theta,
            x: self.x,
            p: self.p,
            sites: self.sites,
            max_support: self.max_support,
            strategy: self.strategy,
            out: self.output.out,
            format: self.output.format,
        };
        (self.config, o)
    }
}

enum Sink {
    Stdout,
    File(PathBuf, BufWriter<File>),
}

impl Sink {
    /// Creates the output file up front so an unwritable path fails early.
    fn open(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => {
                let f = File::create(p).map_err(|e| CliError::io(p, e))?;
                Ok(Sink::File(p.to_path_buf(), BufWriter::new(f)))
            }
        }
    }

    fn write(self, format: OutputFormat, records: &[RunRecord]) -> Result<(), CliError> {
        match self {
            Sink::Stdout => {
                emit(io::stdout().lock(), format, records).map_err(|e| CliError::Io(format!("stdout: {e}")))
            }
            Sink::File(p, w) => {
                emit(w, format, records).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
            }
        }
    }
}

fn emit<W: Write>(mut w: W, format: OutputFormat, records: &[RunRecord]) -> Result<(), String> {
    match format {
        OutputFormat::JsonLines => write_json_lines(&mut w, records).map_err(|e| e.to_string())?,
        OutputFormat::Csv => write_csv(&mut w, records).map_err(|e| e.to_string())?,
    }
    w.flush().map_err(|e| e.to_string())
}

fn report(record: &RunRecord) {
    let a = &record.aggregate;
    eprintln!(
        "{}: {} ({} over {} trials: min {:e}, max {:e}, violations {}) in {} ms",
        record.config.kind,
        if record.pass { "PASS" } else { "FAIL" },
        a.statistic,
        a.count,
        a.min,
        a.max,
        a.violations,
        record.duration_ms
    );
}

fn status(pass: bool) -> u8 {
    if pass {
        0
    } else {
        1
    }
}

fn single(kind: ExperimentKind, args: RunArgs, exec: Execution) -> Result<u8, CliError> {
    let (path, overrides) = args.overrides();
    let mut config = match &path {
        None => ExperimentConfig::new(kind),
        Some(p) => match load_config(p, Some(kind))? {
            ConfigFile::Single(c) if c.kind == kind => *c,
            ConfigFile::Single(c) => {
                return Err(CliError::Config(format!(
                    "{} describes {}, not {kind}",
                    p.display(),
                    c.kind
                )))
            }
            ConfigFile::Suite(_) => {
                return Err(CliError::Config(format!(
                    "{} is a suite; use `nonsep suite`",
                    p.display()
                )))
            }
        },
    };
    overrides.apply(&mut config);
    let config = config.resolve()?;
    let sink = Sink::open(config.out.as_deref())?;
    let format = config.format.unwrap_or_default();
    let record = run(&config, exec)?;
    report(&record);
    let pass = record.pass;
    sink.write(format, &[record])?;
    Ok(status(pass))
}

fn suite(args: SuiteArgs, exec: Execution) -> Result<u8, CliError> {
    let configs = match load_config(&args.config, None)? {
        ConfigFile::Single(c) => vec![*c],
        ConfigFile::Suite(cs) => cs,
    };
    let mut resolved = Vec::with_capacity(configs.len());
    for mut c in configs {
        if let Some(seed) = args.seed {
            c.seed = seed;
        }
        resolved.push(c.resolve()?);
    }
    let sink = Sink::open(args.output.out.as_deref())?;
    let mut records = Vec::with_capacity(resolved.len());
    for c in &resolved {
        let r = run(c, exec)?;
        report(&r);
        records.push(r);
    }
    let pass = records.iter().all(|r| r.pass);
    sink.write(args.output.format.unwrap_or_default(), &records)?;
    Ok(status(pass))
}

fn read_records(path: &Path) -> Result<Vec<RunRecord>, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_json_lines(BufReader::new(f)).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
    })
}

fn summarize_files(files: &[PathBuf]) -> Result<u8, CliError> {
    let mut records = Vec::new();
    for f in files {
        records.extend(read_records(f)?);
    }
    print!("{}", summarize(&records));
    Ok(0)
}

fn rerun(args: RerunArgs, exec: Execution) -> Result<u8, CliError> {
    let old = read_records(&args.record_file)?;
    let sink = Sink::open(args.output.out.as_deref())?;
    let mut fresh = Vec::with_capacity(old.len());
    let mut ok = true;
    for r in &old {
        let again = run(&r.config, exec)?;
        let same = again.aggregate == r.aggregate && again.payload_sha256 == r.payload_sha256;
        println!(
            "{}: {} ({})",
            r.config.kind,
            if same { "reproduced" } else { "DIFFERS" },
            if again.pass { "pass" } else { "fail" }
        );
        ok &= same && again.pass;
        fresh.push(again);
    }
    if args.output.out.is_some() {
        sink.write(args.output.format.unwrap_or_default(), &fresh)?;
    }
    Ok(status(ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let result = match cli.command {
        Command::CcrCheck(a) => single(ExperimentKind::CcrCheck, a, exec),
        Command::LemmaWitness(a) => single(ExperimentKind::LemmaWitness, a, exec),
        Command::EprWitness(a) => single(ExperimentKind::EprWitness, a, exec),
        Command::GnsDemo(a) => single(ExperimentKind::GnsDemo, a, exec),
        Command::GameNonseparable(a) => single(ExperimentKind::GameNonseparable, a, exec),
        Command::GameFinite(a) => single(ExperimentKind::GameFinite, a, exec),
        Command::GameOptimize(a) => single(ExperimentKind::GameOptimize, a, exec),
        Command::GameEpsilon(a) => single(ExperimentKind::GameEpsilon, a, exec),
        Command::ChainRoundtrip(a) => single(ExperimentKind::ChainRoundtrip, a, exec),
        Command::Suite(a) => suite(a, exec),
        Command::Summarize { files } => summarize_files(&files),
        Command::Rerun(a) => rerun(a, exec),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("nonsep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
