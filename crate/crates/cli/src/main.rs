mod commands;
mod report;
mod scenario;

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

use commands::{Command, Ctx};
use report::{ensure_dir, write_json, RunReport};

/// Bad input: unreadable or invalid scenario, or a command that does not
/// apply to it. Exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ValidationError(pub String);

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_COMPUTATION: u8 = 3;

/// Growth, Wiman-Valiron discs, inverse branches and IFS dimension bounds
/// for direct tracts of entire functions.
#[derive(Debug, Parser)]
#[command(name = "wvtract", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Progress messages on standard error.
    #[arg(long)]
    verbose: bool,
    /// Record per-stage wall-clock times in the report (breaks byte
    /// identity between runs).
    #[arg(long)]
    timings: bool,
}

fn execute(cli: &Cli) -> u8 {
    if cli.threads > 0 {
        // fails only when a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let loaded = match scenario::load(&cli.scenario) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    if let Err(e) = ensure_dir(&cli.out) {
        eprintln!("error: {e:#}");
        return EXIT_COMPUTATION;
    }
    let mut report = RunReport::new(cli.command.name(), &loaded.scenario, &loaded.input_hash, loaded.warnings.clone());
    let mut ctx = Ctx {
        loaded: &loaded,
        out: &cli.out,
        verbose: cli.verbose,
        timings: cli.timings,
        stdout: Vec::new(),
    };
    let outcome = commands::run(cli.command, &mut ctx, &mut report);
    let code = match &outcome {
        Ok(()) => EXIT_OK,
        Err(e) if e.downcast_ref::<ValidationError>().is_some() => EXIT_VALIDATION,
        Err(_) => EXIT_COMPUTATION,
    };
    if let Err(e) = &outcome {
        eprintln!("error: {e:#}");
        report.fail(e);
    }
    if let Err(e) = write_json(&cli.out, &format!("{}.json", cli.command.name()), &report) {
        eprintln!("error: {e:#}");
        return EXIT_COMPUTATION;
    }
    for line in &ctx.stdout {
        println!("{line}");
    }
    code
}

fn main() -> ExitCode {
    ExitCode::from(execute(&Cli::parse()))
}
