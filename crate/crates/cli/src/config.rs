//! Command-line arguments and the serializable run configuration.
//!
//! Every subcommand's arguments double as a config record, so a run can be
//! saved to TOML/JSON and replayed with `pordkit run FILE`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pordkit_core::enumerate::DEFAULT_BUDGET;
use pordkit_core::projector::DEFAULT_PRECISION;
use pordkit_core::BlockShape;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "pordkit",
    version,
    about = "Exact p-adic checks around P-ordinary vectors for GL_n"
)]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(flatten)]
    pub output: OutputOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(flatten)]
    Task(Task),
    /// Replay a saved run configuration (TOML or JSON).
    Run { file: PathBuf },
}

/// Parameters shared by all commands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
#[serde(default)]
pub struct Globals {
    /// Residue characteristic.
    #[arg(long, global = true, default_value_t = 3)]
    pub p: u64,
    /// Iwahori level.
    #[arg(long, global = true, default_value_t = 1)]
    pub r: u32,
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Working precision R, results are exact mod p^R.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
    /// Maximum number of enumeration candidates.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET as u64)]
    pub budget: u64,
}

impl Default for Globals {
    fn default() -> Self {
        Self {
            p: 3,
            r: 1,
            seed: 0,
            precision: DEFAULT_PRECISION,
            budget: DEFAULT_BUDGET as u64,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Clone, Debug, Args)]
pub struct OutputOpts {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Task {
    /// Double-coset decomposition checks for one shape.
    Cosets(CosetsArgs),
    /// Valuation verdict for a weight and central character.
    Ordinarity(OrdinarityArgs),
    /// Unit-root projector of an integral matrix.
    Projector(ProjectorArgs),
    /// Weyl index sets for a pair of block lists.
    Weyl(WeylArgs),
    /// Orders of the finite groups attached to a shape.
    Orders(OrdersArgs),
    /// Coset checks over a grid of shapes, primes and levels.
    Sweep(SweepArgs),
}

/// A block shape given by its signature and the two partitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct ShapeArgs {
    /// Total size; optional when both `a` and `b` are given.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    pub a: usize,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    /// Partition of `a`, comma separated; a single block by default.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_top: Option<Vec<usize>>,
    /// Partition of `b`, comma separated; a single block by default.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_bot: Option<Vec<usize>>,
}

fn single_block(k: usize) -> Vec<usize> {
    if k == 0 {
        Vec::new()
    } else {
        vec![k]
    }
}

impl ShapeArgs {
    pub fn build(&self) -> Result<BlockShape, CliError> {
        let b = match (self.b, self.n) {
            (Some(b), _) => b,
            (None, Some(n)) => n
                .checked_sub(self.a)
                .ok_or_else(|| CliError::Config(format!("a = {} exceeds n = {n}", self.a)))?,
            (None, None) => return Err(CliError::Config("give --b or --n".into())),
        };
        if let Some(n) = self.n {
            if n != self.a + b {
                return Err(CliError::Config(format!(
                    "n = {n} but a + b = {}",
                    self.a + b
                )));
            }
        }
        let top = self.d_top.clone().unwrap_or_else(|| single_block(self.a));
        let bot = self.d_bot.clone().unwrap_or_else(|| single_block(b));
        if top.iter().sum::<usize>() != self.a || bot.iter().sum::<usize>() != b {
            return Err(CliError::Config(format!(
                "partitions {top:?} and {bot:?} must sum to a = {} and b = {b}",
                self.a
            )));
        }
        Ok(BlockShape::from_parts(&top, &bot)?)
    }
}

fn default_j() -> usize {
    1
}

fn default_samples() -> usize {
    500
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct CosetsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub shape: ShapeArgs,
    /// Block index of the Hecke element, 1-based in Hecke order.
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_j")]
    pub j: usize,
    /// Check every block index instead of `--j`.
    #[arg(long)]
    #[serde(default)]
    pub all_j: bool,
    /// Sampled double-coset elements per check.
    #[arg(long, default_value_t = 500)]
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct OrdinarityArgs {
    /// Ordinarity config file (TOML or JSON).
    pub config: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct ProjectorArgs {
    /// Matrix file: `{"p": 3, "rows": [[1, 1], [0, 3]]}`, entries integers or "num/den".
    pub matrix: PathBuf,
    /// Compare against `U^{N!}` for this `N`; defaults to max(dim, 6).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_n: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct WeylArgs {
    /// Block sizes of `L`, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub l_blocks: Vec<usize>,
    /// Block sizes of `M`; equal to `L` when omitted.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_blocks: Option<Vec<usize>>,
    /// Cross-check against brute-force conjugation over F_p.
    #[arg(long)]
    #[serde(default)]
    pub oracle: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct OrdersArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub shape: ShapeArgs,
}

fn default_n_min() -> usize {
    2
}

fn default_n_max() -> usize {
    4
}

fn default_primes() -> Vec<u64> {
    vec![2, 3]
}

fn default_levels() -> Vec<u32> {
    vec![1, 2]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    #[arg(long, default_value_t = 4)]
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',', default_values_t = default_primes())]
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = default_levels())]
    #[serde(default = "default_levels")]
    pub levels: Vec<u32>,
    #[arg(long, default_value_t = 500)]
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

/// A replayable run: global parameters plus one command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub globals: Globals,
    pub task: Task,
}

/// Parses TOML for `.toml` files and JSON otherwise.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let is_toml = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    } else {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}
