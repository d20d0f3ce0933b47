use std::path::PathBuf;

use clap::{Parser, Subcommand};
use eigenbundle_cli::commands::{self, Outcome, RelationsArgs};
use eigenbundle_cli::config::{parse_grid, Overrides, DEFAULT_N_PHI, DEFAULT_N_THETA};
use eigenbundle_cli::ExitCode;

/// Eigenbundle Chern numbers, equivalence invariants and constructions for
/// normal matrix fields over S² and S² × S².
#[derive(Debug, Parser)]
#[command(name = "ebundle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a field, order its spectrum and report the diagonalizability obstruction.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The unitary-equivalence invariant of two fields (pass --config twice).
    Theta {
        #[arg(long, num_args = 1, required = true)]
        config: Vec<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a field with a prescribed obstruction and write it as an EBF1 file.
    Construct {
        /// bloch | clutching
        kind: String,
        /// bloch: k=<k>; clutching: <c1,...,cn>
        #[arg(allow_hyphen_values = true)]
        params: String,
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integer relations among eigenbundle Chern classes.
    Relations {
        /// Degree-4 constraint for three bands over S² × S²: k1 k2 l1 l2.
        #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["K1", "K2", "L1", "L2"])]
        star: Option<Vec<i64>>,
        /// List the possible two-band obstructions over S² × S².
        #[arg(long, requires = "bound")]
        enumerate_n2: bool,
        #[arg(long)]
        bound: Option<u32>,
        /// Projective-space dimension m for the CPᵐ check.
        #[arg(long, requires = "coeffs")]
        cp: Option<u32>,
        /// Comma-separated Chern coefficients for --cp.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        coeffs: Option<Vec<i64>>,
    },
}

#[derive(Debug, clap::Args)]
struct Tuning {
    /// Mesh resolution NTxNP, overriding the config.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    #[arg(long)]
    tol_normal: Option<f64>,
    #[arg(long)]
    tol_gap: Option<f64>,
}

impl Tuning {
    fn overrides(&self) -> Overrides {
        Overrides { grid: self.grid, tol_normal: self.tol_normal, tol_gap: self.tol_gap }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Analyze { config, tuning, out } => commands::analyze(&config, &tuning.overrides(), out.as_deref()),
        Command::Theta { config, tuning, out } => {
            if config.len() != 2 {
                return usage("theta", "theta needs exactly two --config arguments");
            }
            commands::theta(&config[0], &config[1], &tuning.overrides(), out.as_deref())
        }
        Command::Construct { kind, params, grid, out } => {
            commands::construct(&kind, &params, grid.unwrap_or((DEFAULT_N_THETA, DEFAULT_N_PHI)), &out)
        }
        Command::Relations { star, enumerate_n2, bound, cp, coeffs } => {
            let args = RelationsArgs {
                star: star.map(|v| [v[0], v[1], v[2], v[3]]),
                enumerate_bound: if enumerate_n2 { bound } else { None },
                cp: cp.map(|m| (m, coeffs.unwrap_or_default())),
            };
            commands::relations(&args)
        }
    }
}

fn usage(command: &str, message: &str) -> Outcome {
    let mut report = eigenbundle_cli::report::Report::new(command);
    report.finish(ExitCode::Usage, Some(message));
    Outcome { report, code: ExitCode::Usage }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::Usage.code() } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = run(cli);
    print!("{}", outcome.report.render());
    if outcome.code != ExitCode::Ok {
        if let Some(msg) = outcome.report.get("error") {
            eprintln!("ebundle: {msg}");
        }
    }
    std::process::exit(outcome.code.code());
}
