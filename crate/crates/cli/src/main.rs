//! `isocone`: membership, order, axiom, saturation and classification
//! commands over JSON cone documents.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "isocone", version, about = "Noncommutative ordered cones in finite-dimensional matrix algebras")]
struct Cli {
    /// Membership and eigenvalue-gap tolerance (default: the cone document's, else 1e-9).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// RNG seed (default: the cone document's, else 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the machine-readable report here.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide membership of an element; exit 0 inside, 1 outside, 2 boundary.
    Check { spec: PathBuf, element: PathBuf },
    /// Inner ordering of a non-derogatory inside element as a Hasse DOT graph.
    InnerOrder {
        spec: PathBuf,
        element: PathBuf,
        /// DOT output file (stdout when absent).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Randomized check of the isocone axioms.
    Axioms {
        spec: Option<PathBuf>,
        /// Check the cone spanned by a generator document instead.
        #[arg(long, value_name = "GENERATORS", conflicts_with = "spec")]
        saturation: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Grow a generator set under the isocone operations.
    Saturate {
        generators: PathBuf,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        /// Per-round CSV: round, span_dim, triviality_witnessed.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Recover the normal form of an oracle document and print it as a cone document.
    Classify {
        spec: PathBuf,
        /// Random verification samples.
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Bloch directions probed per 2x2 block.
        #[arg(long, default_value_t = 2562)]
        grid: usize,
    },
    /// Compare two density matrices in the state order.
    StateCompare { spec: PathBuf, rho1: PathBuf, rho2: PathBuf },
    /// Accepted Bloch directions of a 2x2 block on a sphere grid, as CSV.
    BlochExport {
        spec: PathBuf,
        #[arg(long, default_value_t = 2562)]
        samples: usize,
        /// 1-based block index (default: the first 2x2 block).
        #[arg(long)]
        block: Option<usize>,
        /// CSV output file (stdout when absent): x, y, z, accepted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // usage errors must not collide with the verdict exit codes 0/1/2
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { report::EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
