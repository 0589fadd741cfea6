use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Cover-encoding experiments: instance generation, adaptive walks,
/// restart p-values, cluster statistics, number partitioning and
/// reachability checks on encoding digraphs.
#[derive(Parser, Debug)]
#[command(name = "coverenc", version, args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write seeded periodic L×L spin-glass instances.
    Gen(GenArgs),
    /// Run one adaptive walk and record its objective.
    Walk(WalkArgs),
    /// Encoded walks against restart walks: empirical p-values.
    Compare(CompareArgs),
    /// Cluster sizes of walk forests against surrogate forests.
    Clusters(ClustersArgs),
    /// Number partitioning: differencing heuristic or prepartition walk.
    Npp(NppArgs),
    /// Check the reachability condition on an encoding digraph.
    SemigroupCheck(SemigroupArgs),
    /// Brute-force optimum of a small instance.
    GroundTruth(GroundTruthArgs),
    /// Re-execute the run recorded in a manifest.
    Replay(ReplayArgs),
    /// Run gen, compare and clusters from a TOML experiment file.
    Run(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Walk(_) => "walk",
            Command::Compare(_) => "compare",
            Command::Clusters(_) => "clusters",
            Command::Npp(_) => "npp",
            Command::SemigroupCheck(_) => "semigroup-check",
            Command::GroundTruth(_) => "ground-truth",
            Command::Replay(_) => "replay",
            Command::Run(_) => "run",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Write into a non-empty output directory, replacing files.
    #[arg(long)]
    pub force: bool,
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GenArgs {
    /// Side length L (at least 3).
    #[arg(long = "side", short = 'L')]
    pub side: usize,
    /// Number of instances.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkKind {
    Encoded,
    Direct,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WalkArgs {
    #[arg(long, value_enum)]
    pub kind: WalkKind,
    /// Instance file.
    #[arg(long)]
    pub instance: PathBuf,
    /// Number of steps.
    #[arg(long)]
    pub t: u64,
    /// Steps at which the objective is written; defaults to t.
    #[arg(long, value_delimiter = ',')]
    pub record_at: Vec<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CompareArgs {
    /// Directory of instance files (or a single file).
    #[arg(long)]
    pub instances: PathBuf,
    /// Walk lengths t.
    #[arg(long, value_delimiter = ',', required = true)]
    pub t: Vec<u64>,
    /// Restart periods tau; each must divide every t.
    #[arg(long, value_delimiter = ',', required = true)]
    pub tau: Vec<u64>,
    /// Restart walks per p-value.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClustersArgs {
    /// Encoded-walk state files, or directories of them.
    #[arg(long, num_args = 1.., required = true)]
    pub states: Vec<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NppMode {
    Kk,
    Walk,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct NppArgs {
    /// Numbers file: a JSON array or numbers separated by whitespace/commas.
    #[arg(long)]
    pub numbers: PathBuf,
    #[arg(long, value_enum)]
    pub mode: NppMode,
    /// Walk length (walk mode).
    #[arg(long, default_value_t = 1000)]
    pub t: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    /// Schemata over {0,1,*}.
    Schema,
    /// Forests on labelled sites, one vertex per edge set.
    Forest,
    /// Forests up to equal component structure, one vertex per set partition.
    ForestClasses,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SemigroupArgs {
    #[arg(long, value_enum)]
    pub space: Space,
    /// Schema length or number of sites.
    #[arg(long)]
    pub n: usize,
    /// Remove the arc `TAIL->HEAD` (vertex labels as in the report).
    #[arg(long)]
    pub drop_arc: Option<String>,
    /// Schema digraph without arcs between vertices of equal h.
    #[arg(long)]
    pub no_sideways: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
#[group(required = true, multiple = false)]
pub struct GroundTruthSource {
    /// Spin-glass instance file.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Number-partitioning numbers file.
    #[arg(long)]
    pub numbers: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GroundTruthArgs {
    #[command(flatten)]
    pub source: GroundTruthSource,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunArgs {
    /// Experiment file (TOML).
    pub config: PathBuf,
    /// Output directory; overrides `out` in the file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}
