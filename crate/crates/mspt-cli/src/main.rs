//! `mspt`: batch runner for the mspt library.
//!
//! Exit codes: 0 success, 1 verdict or acceptance mismatch, 2 configuration
//! error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "mspt", version, about = "Coupled-wire anomalies and mixed-state edge ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output directory for CSV and JSON artifacts.
    #[arg(long, default_value = "mspt-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct BlockSource {
    /// Built-in block or scenario name.
    #[arg(long, conflicts_with = "file")]
    pub scenario: Option<String>,
    /// JSON block file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct EnsembleOverrides {
    /// JSON ensemble file; the flags below override its fields.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    /// Fixed winding sector.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<i64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub wilson: Option<f64>,
    /// Pair budget of the Rényi-2 estimator.
    #[arg(long)]
    pub pairs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate symmetric null vertex vectors of a building block.
    GapScan {
        #[command(flatten)]
        source: BlockSource,
        /// Coefficient bound per entry.
        #[arg(long, default_value_t = mspt::wire::DEFAULT_BOUND)]
        bound: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Anomaly matrix, flux insertion and realizability of a channel set.
    Anomaly {
        #[command(flatten)]
        source: BlockSource,
        #[command(flatten)]
        common: Common,
    },
    /// Ground-state charge of the edge ring against mass winding.
    SpectralFlow {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        wilson: f64,
        /// Windings, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,-1,0,1,2")]
        w: Vec<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Disorder-averaged edge correlator with a decay-law fit.
    EdgeCorr {
        #[command(flatten)]
        ensemble: EnsembleOverrides,
        /// G, S or renyi2.
        #[arg(long, default_value = "G")]
        operator: String,
        #[command(flatten)]
        common: Common,
    },
    /// Strong and weak symmetry of a small ensemble's density matrix.
    SymmetryCheck {
        #[command(flatten)]
        ensemble: EnsembleOverrides,
        #[command(flatten)]
        common: Common,
    },
    /// Run every acceptance check.
    VerifyAll {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = mspt::verify::VERIFY_PAIR_BUDGET)]
        pairs: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GapScan { source, bound, common } => commands::gap_scan(&source, bound, &common),
        Command::Anomaly { source, common } => commands::anomaly(&source, &common),
        Command::SpectralFlow { n, m, wilson, w, common } => commands::spectral_flow(n, m, wilson, &w, &common),
        Command::EdgeCorr { ensemble, operator, common } => commands::edge_corr(&ensemble, &operator, &common),
        Command::SymmetryCheck { ensemble, common } => commands::symmetry_check(&ensemble, &common),
        Command::VerifyAll { seed, pairs, common } => commands::verify_all(seed, pairs, &common),
    };
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::from(if outcome.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
