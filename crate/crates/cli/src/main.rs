use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flux_eit_cli::commands::{run, Command};
use flux_eit_cli::lab::Lab;
use flux_eit_cli::recipes::Figure;
use flux_eit_cli::{parse_config, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "flux-eit", version, about = "Probe response of a driven three-level flux-qubit circuit")]
struct Cli {
    /// Configuration file; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps; all cores when omitted.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Six lowest levels and transition frequencies over `sweep.flux`.
    Spectrum,
    /// Three-level current matrix elements over `sweep.flux`.
    Currents,
    /// Damping rates along `sweep.axis`.
    Rates,
    /// Susceptibility around the probe windows.
    Susceptibility,
    /// EIT / ATS labels of the probe windows.
    Classify,
    /// Time-domain check of the susceptibility at the figure parameter sets.
    OracleCheck,
    /// Plot-ready tables of one figure.
    Reproduce {
        #[arg(value_parser = ["fig2", "fig4", "fig5", "fig6", "fig7", "fig8"])]
        figure: String,
    },
}

fn load(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() })?;
            Ok(parse_config(&text)?)
        }
    }
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let cfg = load(&cli.config)?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let cmd = match &cli.cmd {
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Currents => Command::Currents,
        Cmd::Rates => Command::Rates,
        Cmd::Susceptibility => Command::Susceptibility,
        Cmd::Classify => Command::Classify,
        Cmd::OracleCheck => Command::OracleCheck,
        Cmd::Reproduce { figure } => Command::Reproduce(Figure::parse(figure).expect("checked by clap")),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start the worker pool: {e}")))?;
    let lab = Lab::new();
    for p in pool.install(|| run(cmd, &cfg, &lab, &out))? {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let err = CliError::Usage(first);
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
