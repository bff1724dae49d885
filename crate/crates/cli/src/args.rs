//! Flag definitions. Every subcommand's flags serialize under their long
//! names, which is the form echoed into provenance and read back by `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use treecode::pauli::Pauli;

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "treecode", version, about = "Tree tensor-network codes: distances, flows, decoding")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Master seed; every random stream derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Primary output file; secondary tables go next to it. Default stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// TOML file mirroring the flags, or an earlier output file whose header is reused.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Code distance of identical-node, explicit or random trees.
    Distance(DistanceArgs),
    /// Pareto-pruned search for the best tree over a gate pool.
    Search(SearchArgs),
    /// Classes of single-gate trees by level-1 enumerator.
    Classify(ClassifyArgs),
    /// Heralded-error flows and their fixed points.
    Flow(FlowArgs),
    /// Exact results for the Bell tree under heralded flips.
    Bell(BellArgs),
    /// Population-dynamics estimate of the decoding failure probability.
    Popdyn(PopdynArgs),
    /// Direct Monte Carlo of optimal decoding on an explicit tree.
    Sample(SampleArgs),
    /// Symbolic vector or coset enumerators.
    Enumerate(EnumerateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Distance(_) => "distance",
            Command::Search(_) => "search",
            Command::Classify(_) => "classify",
            Command::Flow(_) => "flow",
            Command::Bell(_) => "bell",
            Command::Popdyn(_) => "popdyn",
            Command::Sample(_) => "sample",
            Command::Enumerate(_) => "enumerate",
        }
    }
}

pub const COMMAND_NAMES: [&str; 8] =
    ["distance", "search", "classify", "flow", "bell", "popdyn", "sample", "enumerate"];

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DistanceArgs {
    /// Gate name or file holding a four-line image table.
    #[arg(long, default_value = "opt152")]
    pub gate: String,
    /// Stabilizer input; defaults to the gate's conventional one.
    #[arg(long)]
    pub stab: Option<Pauli>,
    #[arg(long, default_value_t = 12)]
    pub tmax: usize,
    /// Tree file (JSON); reports the distance of that one tree.
    #[arg(long, conflicts_with = "random")]
    pub tree: Option<PathBuf>,
    /// Erasure pattern for `--tree`: JSON `{"leaves": [bool], "links": [bool]}`.
    #[arg(long, requires = "tree")]
    pub erasures: Option<PathBuf>,
    /// Gate whose identical-node tree normalizes the `--tree` distance.
    #[arg(long, requires = "tree")]
    pub reference: Option<String>,
    /// Mean distance of trees with uniformly random gates.
    #[arg(long)]
    pub random: bool,
    #[arg(long, default_value_t = 3000)]
    pub samples: usize,
    /// Depths `t <= exclude` are left out of the random growth fit.
    #[arg(long, default_value_t = 7)]
    pub exclude: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SearchArgs {
    /// Pool entries `gate[:stab]`.
    #[arg(long, value_delimiter = ',', default_value = "opt152:X,v:X")]
    pub pool: Vec<String>,
    #[arg(long, default_value_t = 14)]
    pub tmax: usize,
    /// Keep every distinct distance vector instead of the Pareto front.
    #[arg(long)]
    pub no_prune: bool,
    /// Write the best tree at `tmax` as JSON.
    #[arg(long)]
    pub tree_out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivalenceArg {
    Exact,
    Relabel,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ClassifyArgs {
    #[arg(long, value_enum, default_value_t = EquivalenceArg::Relabel)]
    pub equivalence: EquivalenceArg,
    /// Depth at which growth is judged.
    #[arg(long, default_value_t = 20)]
    pub t_check: usize,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Random,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FlowArgs {
    #[arg(long, conflicts_with = "ensemble")]
    pub gate: Option<String>,
    #[arg(long)]
    pub stab: Option<Pauli>,
    /// Average over uniformly random gates.
    #[arg(long, value_enum)]
    pub ensemble: Option<Ensemble>,
    /// Initial class distribution `n,x,z,y,a`; rescaled to sum to one.
    #[arg(long, group = "start")]
    pub init: Option<String>,
    /// Initial erasure rate.
    #[arg(long, group = "start")]
    pub erasure: Option<f64>,
    /// Initial heralded bit- and phase-flip rate.
    #[arg(long, group = "start")]
    pub bitphase: Option<f64>,
    /// Heralded bit- and phase-flip rate on every link.
    #[arg(long)]
    pub bulk_bitphase: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub tmax: usize,
    /// Locate fixed points from a grid of simplex seeds.
    #[arg(long)]
    pub fixed_points: bool,
    /// Seed grid resolution per simplex edge.
    #[arg(long, default_value_t = 8)]
    pub divisions: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
#[command(group = clap::ArgGroup::new("mode").multiple(false))]
pub struct BellArgs {
    /// Fixed points of the loss flows against the bulk rate.
    #[arg(long, group = "mode")]
    pub phase_diagram: bool,
    /// Exact distribution of the conditional distance.
    #[arg(long, group = "mode")]
    pub conditional_distance: bool,
    /// Thresholds for balanced erasure patterns.
    #[arg(long, group = "mode")]
    pub balanced: bool,
    /// Magnetization fixed points of the ferromagnetic flow.
    #[arg(long, group = "mode")]
    pub ferro: bool,
    /// Sampled drift of the conditional distance per step.
    #[arg(long, group = "mode")]
    pub walk_bias: bool,
    /// Surface rate.
    #[arg(short = 'p', long = "p")]
    pub p: Option<f64>,
    /// Bulk rate.
    #[arg(short = 'q', long = "q")]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub tau: usize,
    /// Largest bulk rate on the scan grids.
    #[arg(long, default_value_t = 0.06)]
    pub q_max: f64,
    /// Points on the scan grids.
    #[arg(long, default_value_t = 61)]
    pub points: usize,
    /// Truncation of the distance axis.
    #[arg(long, default_value_t = 4096)]
    pub d_max: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Fewest samples per bias row.
    #[arg(long, default_value_t = 500)]
    pub min_count: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    General,
    Css,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisArg {
    X,
    Z,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RescaleArg {
    None,
    Z,
    Z2,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PopdynArgs {
    #[arg(long, default_value = "opt152")]
    pub gate: String,
    #[arg(long)]
    pub stab: Option<Pauli>,
    /// `general`: depolarizing noise on four classes; `css`: bit flips on one
    /// logical of the Bell tree.
    #[arg(long, value_enum, default_value_t = Mode::General)]
    pub mode: Mode,
    /// Logical tracked in `css` mode.
    #[arg(long, value_enum, default_value_t = BasisArg::X)]
    pub basis: BasisArg,
    /// Surface error rate.
    #[arg(short = 'p', long = "p")]
    pub p: f64,
    /// Bulk error rate per link.
    #[arg(short = 'q', long = "q", default_value_t = 0.0)]
    pub q: f64,
    /// Population size.
    #[arg(short = 'M', long = "m", default_value_t = 10_000)]
    pub m: usize,
    #[arg(long, default_value_t = 4)]
    pub runs: usize,
    #[arg(long, default_value_t = 20)]
    pub tmax: usize,
    /// Replace one member at a time instead of whole generations.
    #[arg(long)]
    pub continuous: bool,
    /// Pool decodability values into a histogram.
    #[arg(long)]
    pub histogram: bool,
    #[arg(long, value_enum, default_value_t = RescaleArg::None)]
    pub rescale: RescaleArg,
    #[arg(long, default_value_t = 0.01)]
    pub bin_width: f64,
    /// Generations pooled; defaults to the last five.
    #[arg(long, value_delimiter = ',')]
    pub generations: Vec<usize>,
    /// Bytes the populations may occupy.
    #[arg(long)]
    pub memory_budget: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SampleArgs {
    #[arg(long, default_value = "opt152")]
    pub gate: String,
    #[arg(long)]
    pub stab: Option<Pauli>,
    /// Tree depth.
    #[arg(short, long, default_value_t = 8)]
    pub t: usize,
    /// Depolarizing rate on the leaves.
    #[arg(short = 'p', long = "p")]
    pub p: f64,
    /// Depolarizing rate on every link.
    #[arg(short = 'q', long = "q")]
    pub q: Option<f64>,
    #[arg(short = 'n', long = "n", default_value_t = 100_000)]
    pub n: usize,
    /// Also sum over every leaf pattern (small trees only).
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EnumerateArgs {
    #[arg(long, default_value = "bell")]
    pub gate: String,
    #[arg(long)]
    pub stab: Option<Pauli>,
    #[arg(short, long, default_value_t = 1)]
    pub t: usize,
    /// Tree file (JSON); takes precedence over `--gate` and `--t`.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Error string, one Pauli per leaf, for the coset enumerator.
    #[arg(long)]
    pub errors: Option<String>,
}
