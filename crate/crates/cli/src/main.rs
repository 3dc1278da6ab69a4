//! `bblocks`: builds pairs of non-congruent billiard tables with matched
//! periodic orbits and checks them.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod exit;

#[derive(Debug, Parser)]
#[command(name = "bblocks", version, about = "Glued billiard tables with matched periodic orbits")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Run configuration (TOML sections per module); the shipped default is used if absent.
    #[arg(long, global = true, env = "BBLOCKS_CONFIG")]
    pub config: Option<PathBuf>,
    /// Directory for produced files.
    #[arg(long, global = true, env = "BBLOCKS_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,
    /// Multiplier applied to every tolerance.
    #[arg(long, global = true, env = "BBLOCKS_TOL_SCALE", default_value_t = 1.0)]
    pub tol_scale: f64,
    /// Overrides the construction seed.
    #[arg(long, global = true, env = "BBLOCKS_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the matching scheme and write both tables, certificates, log and manifest.
    Construct,
    /// Re-check constructed tables against their certificates.
    Verify {
        table_a: PathBuf,
        table_b: PathBuf,
        certificates: PathBuf,
    },
    /// Invariant report of one table, or the comparison of two.
    Invariants {
        table: PathBuf,
        other: Option<PathBuf>,
        /// Also run the glancing-orbit harness and write glancing.csv.
        #[arg(long)]
        glancing: bool,
    },
    /// Export closed orbits of a table.
    Orbits {
        table: PathBuf,
        /// Certificates whose angles are launched from the first joint.
        #[arg(long)]
        certs: Option<PathBuf>,
        /// Explicit launch angles.
        #[arg(long, num_args = 1..)]
        theta: Vec<f64>,
        /// Maximal-perimeter polygons with these vertex counts.
        #[arg(long, num_args = 1..)]
        ngon: Vec<usize>,
    },
    /// Draw tables (side by side) and optional orbits as SVG.
    Render {
        #[arg(required = true, num_args = 1..=2)]
        tables: Vec<PathBuf>,
        /// Orbit files, paired with the tables in order.
        #[arg(long)]
        orbit: Vec<PathBuf>,
        /// Output file.
        #[arg(long, default_value = "tables.svg")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("bblocks: {failure}");
            failure.exit_code()
        }
    }
}
