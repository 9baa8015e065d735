use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use edge_eigen::harness::{parse_config, run_command, write_output, Command, Destination};
use edge_eigen::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    K2,
    Predict,
    Solve,
    Sweep,
    Scan,
    Lemma,
    GaugeCheck,
    Keps,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::K2 => Command::K2,
            Cmd::Predict => Command::Predict,
            Cmd::Solve => Command::Solve,
            Cmd::Sweep => Command::Sweep,
            Cmd::Scan => Command::Scan,
            Cmd::Lemma => Command::Lemma,
            Cmd::GaugeCheck => Command::GaugeCheck,
            Cmd::Keps => Command::KEps,
        }
    }
}

/// Band-edge eigenvalue predictor and solver for fast-oscillating potentials.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Experiment description (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `solver.points_per_fast_period`.
    #[arg(long)]
    points_per_period: Option<usize>,
}

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = Command::from(cli.command);

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(source) => {
            eprintln!("error: {}", Error::Io { path: cli.config.clone(), source });
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut cfg = match parse_config(&text, command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(p) = cli.points_per_period {
        cfg.solver = cfg.solver.with_points_per_period(p);
        if let Err(e) = cfg.solver.validate() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }

    let output = match run_command(command, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                Error::Io { .. } => EXIT_IO,
                Error::Config(_) | Error::NonZeroMean | Error::InvalidArgument(_) => EXIT_CONFIG,
                _ if command == Command::Solve => EXIT_NOT_CONVERGED,
                _ => EXIT_IO,
            });
        }
    };

    let dest = cli.out.as_deref().map_or(Destination::Stdout, Destination::File);
    if let Err(e) = write_output(output.table.render().as_bytes(), dest) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_IO);
    }
    if !output.converged {
        eprintln!("error: solver did not converge");
        return ExitCode::from(EXIT_NOT_CONVERGED);
    }
    ExitCode::SUCCESS
}
