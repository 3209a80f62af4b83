//! Command-line driver: solves the endpoint equations, traces Stokes
//! graphs, rasters phase diagrams, and computes high-precision orthogonal
//! polynomial zeros, exporting everything as JSON/CSV/PGM files.
//!
//! Exit codes: 0 success, 1 numerical failure (machine-readable JSON on
//! stderr), 2 usage error.

mod opts;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "scurve", version, about = "S-curves, equilibrium densities and phase diagrams for polynomial exponential weights")]
struct Cli {
    /// JSON file whose keys override the command-line flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (created if missing)
    #[arg(long, global = true, default_value = "scurve-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form one-cut solution of the cubic model on branch k, with
    /// Stokes graph and sign map
    Onecut {
        /// coefficient t of W(z) = z^3/3 - t z, e.g. "-1.1" or "0.5+0.3i"
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// branch index 0, 1 or 2
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// sign-map resolution
        #[arg(long, default_value_t = 128)]
        res: usize,
    },
    /// Two-cut solution of the cubic model by continuation, with Stokes
    /// graph and sign map
    Twocut {
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// JSON file with endpoints [[re,im];...] used to seed Newton
        #[arg(long)]
        seed_file: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        res: usize,
    },
    /// Stokes lines and sign map for a cubic branch or explicit endpoints
    Stokes {
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        /// explicit endpoint list "re,im;re,im;..." (consecutive pairs form cuts)
        #[arg(long, allow_hyphen_values = true)]
        endpoints: Option<String>,
        #[arg(long, default_value_t = 128)]
        res: usize,
    },
    /// Phase-diagram raster over a t-grid plus boundary polylines
    Phase {
        /// grid "re0:re1:im0:im1:n"
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// contour pair "i,j"
        #[arg(long, default_value = "1,2")]
        pair: String,
        /// skip boundary tracing
        #[arg(long, default_value_t = false)]
        no_boundaries: bool,
    },
    /// Zeros of p_n for the cubic weight, compared against the predicted cuts
    Zeros {
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "1,2")]
        pair: String,
        #[arg(long, default_value_t = 120)]
        digits: u32,
        /// dump the moment table as decimal strings
        #[arg(long, default_value_t = false)]
        dump_moments: bool,
    },
    /// Classify t along a path and report the transition events
    Sweep {
        /// path "a -> b [-> c ...]"
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        #[arg(long, default_value = "1,2")]
        pair: String,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SCURVE_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match run::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(run::CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(run::CliError::Numerical(err)) => {
            let payload = serde_json::json!({
                "error": format!("{err}"),
                "kind": format!("{err:?}").split([' ', '{']).next().unwrap_or("Unknown"),
            });
            eprintln!("{payload}");
            ExitCode::from(1)
        }
        Err(run::CliError::Io(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
