use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use manoma::config::{parse_config, RunConfig};
use manoma::output::{write_outage_csv, write_single_csv, write_sweep_csv};
use manoma::scenario::{draw_scenario, run_sweep, run_trial};
use manoma::validation::{run_suite, SuiteSizes};
use manoma::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

/// Movable-antenna NOMA downlink simulator.
#[derive(Debug, Parser)]
#[command(name = "manoma", version)]
struct Cli {
    /// JSON configuration; omitted fields take the reference defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `mc.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `mc.trials`.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Overrides `mc.threads` (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dumps every scheme for trial `mc.trial`.
    Single,
    /// Mean rates and outage against the normalised region size A/λ.
    SweepRegion,
    /// Mean rates and outage against total transmit power in dBm.
    SweepPower,
    /// Outage probabilities against total transmit power in dBm.
    Outage,
    /// Runs the numerical self-checks and prints a PASS/FAIL report.
    Validate {
        /// Use the full acceptance sample sizes.
        #[arg(long)]
        full: bool,
    },
}

enum Failure {
    Config(String),
    Io(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) => Failure::Io(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let text = match &cli.config {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?,
        None => "{}".to_string(),
    };
    let mut cfg = parse_config(&text).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.mc.trials = trials;
    }
    if let Some(threads) = cli.threads {
        cfg.mc.threads = threads;
    }
    if let Some(out) = &cli.out {
        cfg.output.path = Some(out.to_string_lossy().into_owned());
    }
    cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(cfg)
}

/// Renders the command's output into memory; returns the bytes and whether
/// every validation check passed.
fn render(command: &Command, cfg: &RunConfig) -> Result<(Vec<u8>, bool), Failure> {
    let spec = cfg.scenario_spec();
    let mut buf = Vec::new();
    let mut ok = true;
    match command {
        Command::Single => {
            let draw = draw_scenario(&spec, cfg.mc.trial)?;
            write_single_csv(&mut buf, &run_trial(&draw, &cfg.sca))?;
        }
        Command::SweepRegion => {
            let rows = run_sweep(&spec, &cfg.region_sweep(), cfg.mc.trials, &cfg.sca)?;
            write_sweep_csv(&mut buf, &rows)?;
        }
        Command::SweepPower => {
            let rows = run_sweep(&spec, &cfg.power_sweep(), cfg.mc.trials, &cfg.sca)?;
            write_sweep_csv(&mut buf, &rows)?;
        }
        Command::Outage => {
            let rows = run_sweep(&spec, &cfg.power_sweep(), cfg.mc.trials, &cfg.sca)?;
            write_outage_csv(&mut buf, &rows)?;
        }
        Command::Validate { full } => {
            let sizes = if *full {
                SuiteSizes::full()
            } else {
                SuiteSizes::quick()
            };
            let report = run_suite(&spec, &sizes);
            ok = report.all_passed();
            buf.extend_from_slice(report.to_string().as_bytes());
        }
    }
    Ok((buf, ok))
}

fn emit(bytes: &[u8], path: Option<&str>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Io(format!("cannot write {p}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.mc.threads)
        .build()
        .map_err(|e| {
            Failure::Config(format!(
                "cannot start {} worker threads: {e}",
                cfg.mc.threads
            ))
        })?;
    let (bytes, ok) = pool.install(|| render(&cli.command, &cfg))?;
    emit(&bytes, cfg.output.path.as_deref())?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Validation("one or more checks failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
