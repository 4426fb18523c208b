//! `firmnet`: file-based pipeline over the two-layer firm network.

mod analysis;
mod bn;
mod load;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "firmnet", version, about = "Industry structure analyses on a transaction + joint-patent firm network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Merge the source files into one network and write its edge lists, degrees and diagnostics.
    Ingest(analysis::IngestArgs),
    /// Fit a discrete power law to a degree sequence.
    Plfit(analysis::PlfitArgs),
    /// Industry-by-industry money, transaction and joint-patent matrices and their correlations.
    Iotables(analysis::IotablesArgs),
    /// Per-industry pseudolikelihood fits of the five link-configuration models.
    Ergm(analysis::ErgmArgs),
    /// Per-industry split and connected extraction, as node and link counts.
    Subnet(analysis::SubnetArgs),
    /// Exhaustive Bayesian-network structure search over pair records.
    Bnlearn(bn::BnlearnArgs),
    /// Conditional G-tests over pair records.
    Bnci(bn::BnciArgs),
    /// Synthetic inputs with known ground truth.
    #[command(subcommand)]
    Synth(synth::SynthCommand),
}

/// Output directory and worker count, shared by every subcommand.
#[derive(Args, Clone)]
pub struct Common {
    /// Directory for output files (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads for per-industry and per-candidate work.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Ingest(a) => &a.common,
        Command::Plfit(a) => &a.common,
        Command::Iotables(a) => &a.common,
        Command::Ergm(a) => &a.common,
        Command::Subnet(a) => &a.common,
        Command::Bnlearn(a) => &a.common,
        Command::Bnci(a) => &a.common,
        Command::Synth(s) => s.common(),
    }
    .clone();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(common.jobs as usize).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| {
        std::fs::create_dir_all(&common.out)
            .map_err(|e| anyhow::anyhow!("{}: {e}", common.out.display()))?;
        match cli.command {
            Command::Ingest(a) => analysis::ingest(a),
            Command::Plfit(a) => analysis::plfit(a),
            Command::Iotables(a) => analysis::iotables(a),
            Command::Ergm(a) => analysis::ergm(a),
            Command::Subnet(a) => analysis::subnet(a),
            Command::Bnlearn(a) => bn::bnlearn(a),
            Command::Bnci(a) => bn::bnci(a),
            Command::Synth(s) => synth::run(s),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
