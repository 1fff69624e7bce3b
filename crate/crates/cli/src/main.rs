mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Failure, Outcome};

/// Exact computations with abelian groups, towers and twisted K-theory.
#[derive(Debug, Parser)]
#[command(name = "twistk", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Certification bound for "eventually" verdicts.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(2..))]
    pub bound: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Read the JSON payload from this file instead of standard input.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smith normal form of a matrix payload.
    Snf,
    /// Canonical form of a group payload.
    Group,
    /// Kernel, image and cokernel of a homomorphism payload.
    Hom,
    /// Exactness of a sequence payload.
    Exact,
    /// Limits of towers.
    Tower(TowerArgs),
    /// Twisted K-theory and K-homology.
    Ktwist(KtwistArgs),
    /// Periodic cyclic homology dimensions.
    Hp(HpArgs),
    /// Truncations of countable products of cyclic groups.
    Product(ProductArgs),
    /// Table of c(n, l) with divisibility and first-1 columns.
    Grid(GridArgs),
    /// Rank check between twisted K-theory and HP.
    Chern(ChernArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TowerOp {
    Lim,
    Lim1,
    Colim,
    Milnor,
}

#[derive(Debug, Args)]
pub struct TowerArgs {
    #[arg(value_enum)]
    pub op: TowerOp,
    /// Builtin tower; without it the tower is read from the payload.
    #[arg(long, value_parser = twistk_core::json::BUILTIN_TOWERS)]
    pub builtin: Option<String>,
    /// Builtin parameters as a JSON object.
    #[arg(long)]
    pub params: Option<String>,
    /// Twist level for `su-twisted`.
    #[arg(long)]
    pub level: Option<u64>,
    /// Multiplier for `z-times-2`.
    #[arg(long, allow_hyphen_values = true)]
    pub factor: Option<i64>,
    /// Prime for `z-mod-2n`.
    #[arg(long)]
    pub prime: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Su,
    SuInf,
    S3,
    S3Union,
}

#[derive(Debug, Args)]
pub struct KtwistArgs {
    #[arg(long, value_enum, required_unless_present = "table")]
    pub space: Option<Space>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub level: Option<u64>,
    #[arg(long)]
    pub twist: Option<String>,
    /// Twisted K-homology instead of K-theory.
    #[arg(long)]
    pub homology: bool,
    /// Finite truncation to show for `s3-union`.
    #[arg(long)]
    pub truncate: Option<usize>,
    /// Emit the c-table for `n ≤ N_MAX`, `l ≤ LEVEL_MAX`.
    #[arg(long, num_args = 2, value_names = ["N_MAX", "LEVEL_MAX"])]
    pub table: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct HpArgs {
    #[arg(long, value_enum)]
    pub space: Space,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub truncate: Option<usize>,
    /// Twisted HP, derived from twisted K.
    #[arg(long)]
    pub twisted: bool,
    #[arg(long)]
    pub level: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// `n ↦ n`.
    Identity,
    /// `n ↦ m`.
    Constant,
}

#[derive(Debug, Args)]
pub struct ProductArgs {
    #[arg(long, value_enum, default_value_t = Family::Identity)]
    pub family: Family,
    /// Order for the constant family.
    #[arg(long)]
    pub m: Option<String>,
    /// First index of the family.
    #[arg(long, default_value_t = 1)]
    pub first: usize,
    /// Truncation index.
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n_max: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub level_max: u64,
}

#[derive(Debug, Args)]
pub struct ChernArgs {
    /// Space to check; without it `{"k_total": group, "hp_dim": n}` is read
    /// from the payload.
    #[arg(long, value_enum)]
    pub space: Option<Space>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub level: Option<u64>,
}

fn emit(global: &GlobalArgs, outcome: &Outcome) -> Result<(), Failure> {
    let text = match global.format {
        Format::Json => twistk_core::json::render(&outcome.json),
        Format::Table => outcome.table.clone(),
    };
    match &global.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::new(format!("output: cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = commands::run(&cli).and_then(|outcome| {
        emit(&cli.global, &outcome)?;
        Ok(outcome.status)
    });
    match result {
        Ok(status) => ExitCode::from(status.code()),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(1)
        }
    }
}
