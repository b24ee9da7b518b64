use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavelast_cli::config::{Emit, Mode};
use cavelast_cli::golden::{golden_dir, write_golden};
use cavelast_cli::{compare_runs, load_scenario, run_scenario, CliError, RunOptions, BUNDLED};

#[derive(Parser)]
#[command(name = "cavelast", version, about = "Cavitation energies in 2-D nonlinear elasticity")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimize (or evaluate, per the scenario) and write artifacts.
    Run(RunArgs),
    /// Evaluate the energy of the initial deformation without minimizing.
    Eval(RunArgs),
    /// Compare two run directories.
    Compare { a: PathBuf, b: PathBuf },
    /// Regenerate the radial golden files.
    Golden {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    List,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario file or bundled scenario name.
    scenario: String,
    /// Output directory (overrides the scenario).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifacts to write: any of svg,csv,raster,inverse.
    #[arg(long)]
    emit: Option<String>,
}

fn run(args: RunArgs, mode: Option<Mode>) -> Result<i32, CliError> {
    let (cfg, base_dir) = load_scenario(&args.scenario)?;
    let emit = args.emit.as_deref().map(Emit::parse).transpose().map_err(CliError::Invalid)?;
    let opts = RunOptions { out: args.out, emit, mode, base_dir };
    let outcome = run_scenario(&cfg, &opts)?;
    print!("{}", outcome.summary.to_text());
    println!("output = {}", outcome.dir.display());
    Ok(outcome.code)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Run(a) => run(a, None),
        Cmd::Eval(a) => run(a, Some(Mode::Evaluate)),
        Cmd::Compare { a, b } => {
            let rep = compare_runs(&a, &b)?;
            print!("{}", rep.to_text());
            Ok(if rep.alarm { 4 } else { 0 })
        }
        Cmd::Golden { out } => {
            let dir = out.unwrap_or_else(golden_dir);
            write_golden(&dir)?;
            println!("golden files written to {}", dir.display());
            Ok(0)
        }
        Cmd::List => {
            for (name, _) in BUNDLED {
                println!("{name}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
