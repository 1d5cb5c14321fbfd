use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use casimir_cli::commands;
use casimir_cli::config::{Format, RunConfig};
use casimir_cli::table::Table;
use casimir_cli::verify;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "casimir", version, about = "Casimir and Casimir-Polder energies by several independent routes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Plate energies by the zero-temperature, Matsubara or real-frequency route.
    Lifshitz,
    /// Sum over the real modes of a discrete-bath cavity.
    Modes,
    /// Complex resonances and their generalized mode sum.
    ComplexModes {
        #[arg(long)]
        quasistatic: bool,
    },
    /// Energy and force on a Gaussian dipole above a half-space.
    CasimirPolder,
    /// Both sides of the sum-over-poles identity over a random sweep.
    IdentityCheck {
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Run the acceptance suites and print a pass/fail table.
    Verify {
        /// Run a single criterion, 1 to 8.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        criterion: Option<u8>,
    },
}

fn error_record(kind: &str, message: &str) {
    let rec = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{rec}");
}

fn emit(table: &Table, cfg: &RunConfig) -> std::io::Result<()> {
    let format = cfg.output.format.unwrap_or_default();
    match &cfg.output.path {
        Some(p) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(p)?);
            table.write(&mut f, format, cfg.reference_wavenumber)?;
            f.flush()
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock, format, cfg.reference_wavenumber)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                error_record("ConfigError", &e);
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    if cli.tol.is_some() {
        cfg.tol = cli.tol;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if cli.out.is_some() {
        cfg.output.path = cli.out.clone();
    }
    if cli.format.is_some() {
        cfg.output.format = cli.format;
    }
    if let Err(e) = cfg.check() {
        error_record("ConfigError", &e.to_string());
        return ExitCode::from(2);
    }

    let result = match cli.command {
        Command::Lifshitz => commands::lifshitz(&cfg),
        Command::Modes => commands::modes(&cfg),
        Command::ComplexModes { quasistatic } => {
            cfg.complex_modes.quasistatic |= quasistatic;
            commands::complex_modes(&cfg)
        }
        Command::CasimirPolder => commands::casimir_polder(&cfg),
        Command::IdentityCheck { sweep } => {
            if let Some(n) = sweep {
                cfg.identity.sweep = n;
            }
            commands::identity(&cfg)
        }
        Command::Verify { criterion } => {
            let outcomes: Vec<_> = match criterion {
                Some(id) => vec![verify::criterion(id as usize, cfg.seed, cfg.threads)],
                None => (1..=8)
                    .map(|id| {
                        let o = verify::criterion(id, cfg.seed, cfg.threads);
                        println!("{}", o.line());
                        o
                    })
                    .collect(),
            };
            if criterion.is_some() {
                println!("{}", outcomes[0].line());
            }
            if cfg.output.path.is_some() {
                if let Err(e) = emit(&verify::table(&outcomes), &cfg) {
                    error_record("IoError", &e.to_string());
                    return ExitCode::from(1);
                }
            }
            return if outcomes.iter().all(|o| o.passed) { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match result {
        Ok(table) => match emit(&table, &cfg) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                error_record("IoError", &e.to_string());
                ExitCode::from(1)
            }
        },
        Err(e) => {
            error_record(e.kind(), &e.to_string());
            ExitCode::from(1)
        }
    }
}
