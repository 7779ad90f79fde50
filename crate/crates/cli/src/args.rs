use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

#[derive(Parser, Debug, Serialize)]
#[command(name = "commbound", version, about = "Lower bounds for block-composed two-party functions")]
pub struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (overrides COMMBOUND_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Disable data parallelism.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Balance, exact rank, spectrum, S4 containment and discrepancy of a sign matrix.
    AnalyzeMatrix(AnalyzeArgs),
    /// Approximate degree of a Boolean function, optionally with a dual witness.
    ApproxDegree(ApproxArgs),
    /// Block composition f∘gⁿ with optional rank-formula and witness checks.
    Compose(ComposeArgs),
    /// Evaluate a lower bound on a block composition.
    LowerBound(LowerBoundArgs),
    /// Regularity, orthogonality and bounds for group-valued maps.
    GroupCheck(GroupArgs),
    /// Search for strongly balanced sign matrices.
    SearchBalanced(SearchArgs),
    /// Run the seeded property suites.
    VerifySuite(SuiteArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AnalyzeMatrix(_) => "analyze-matrix",
            Command::ApproxDegree(_) => "approx-degree",
            Command::Compose(_) => "compose",
            Command::LowerBound(_) => "lower-bound",
            Command::GroupCheck(_) => "group-check",
            Command::SearchBalanced(_) => "search-balanced",
            Command::VerifySuite(_) => "verify-suite",
        }
    }
}

/// A file path or a `builtin:NAME` reference.
#[derive(Clone, Debug)]
pub enum Source {
    Builtin(String),
    File(PathBuf),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Builtin(name) => write!(f, "builtin:{name}"),
            Source::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl Serialize for Source {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn existing_file(text: &str) -> Result<PathBuf, String> {
    let p = PathBuf::from(text);
    if p.is_file() {
        Ok(p)
    } else {
        Err(format!("no such file: {text}"))
    }
}

/// Matrix inputs: `builtin:S4`, `builtin:J2x2`, or a path.
pub fn matrix_source(text: &str) -> Result<Source, String> {
    match text.strip_prefix("builtin:") {
        Some(name) => Ok(Source::Builtin(name.to_string())),
        None => existing_file(text).map(Source::File),
    }
}

/// Function inputs: `NAME:arity` when no such file exists, else a path.
pub fn function_source(text: &str) -> Result<Source, String> {
    let p = PathBuf::from(text);
    if p.is_file() {
        return Ok(Source::File(p));
    }
    if text.contains(':') {
        return Ok(Source::Builtin(text.to_string()));
    }
    Err(format!("`{text}` is neither NAME:arity nor an existing file"))
}

pub fn path_source(text: &str) -> Result<PathBuf, String> {
    existing_file(text)
}

pub fn epsilon(text: &str) -> Result<f64, String> {
    let e: f64 = text.parse().map_err(|_| format!("`{text}` is not a number"))?;
    if (0.0..1.0).contains(&e) {
        Ok(e)
    } else {
        Err(format!("{e} is outside [0, 1)"))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct AnalyzeArgs {
    /// Sign matrix file or builtin:NAME.
    #[arg(long, value_parser = matrix_source)]
    pub input: Source,
    /// Relative cutoff for the numeric rank.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Largest shorter side for exhaustive discrepancy.
    #[arg(long, default_value_t = commbound::bounds::DEFAULT_DISC_CAP)]
    pub disc_cap: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ApproxArgs {
    /// NAME:arity (PARITY, AND, OR, MAJ, CONST) or a truth-table file.
    #[arg(long, value_parser = function_source)]
    pub function: Source,
    #[arg(long, value_parser = epsilon)]
    pub epsilon: f64,
    /// Also emit and verify a dual polynomial.
    #[arg(long)]
    pub dual: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ComposeArgs {
    #[arg(long, value_parser = function_source)]
    pub function: Source,
    #[arg(long, value_parser = matrix_source)]
    pub inner: Source,
    /// Number of blocks; defaults to the arity of the outer function.
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Compare the exact rank with the rank formula.
    #[arg(long)]
    pub verify_rank: bool,
    /// Build the witness matrix from a dual polynomial.
    #[arg(long)]
    pub witness: bool,
    /// Error level for the witness.
    #[arg(long, value_parser = epsilon, default_value = "0.3333333333333333")]
    pub epsilon: f64,
    /// Distribution for a weighted witness.
    #[arg(long, value_parser = path_source)]
    pub mu: Option<PathBuf>,
    /// Include the composed (and witness) matrices in the report.
    #[arg(long)]
    pub print_matrix: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    Sherstov,
    Disc,
    Shizhu,
}

#[derive(Args, Debug, Serialize)]
pub struct LowerBoundArgs {
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    #[arg(long, value_parser = function_source)]
    pub function: Source,
    #[arg(long, value_parser = matrix_source)]
    pub inner: Source,
    /// Distribution on the inner matrix (shizhu only; uniform by default).
    #[arg(long, value_parser = path_source)]
    pub mu: Option<PathBuf>,
    #[arg(long, value_parser = epsilon, default_value = "0.3333333333333333")]
    pub epsilon0: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct GroupArgs {
    /// Group map file; repeat for a block product.
    #[arg(long, value_parser = path_source)]
    pub gmap: Vec<PathBuf>,
    /// Character table JSON (general groups); Abelian tables are generated.
    #[arg(long, value_parser = path_source)]
    pub table: Option<PathBuf>,
    /// Comma-separated real values of f on the group elements.
    #[arg(long, allow_hyphen_values = true)]
    pub function: Option<String>,
    /// Comma-separated easy character indices (default: the trivial character).
    #[arg(long, value_delimiter = ',')]
    pub easy: Option<Vec<usize>>,
    #[arg(long, value_parser = epsilon, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Sign-matrix blocks for the Z₂ degeneration check.
    #[arg(long, value_parser = matrix_source, num_args = 1.., conflicts_with = "gmap")]
    pub degeneration: Vec<Source>,
    /// Cyclic moduli, one per block, for a random product search.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["gmap", "degeneration"])]
    pub line_regular_search: Option<Vec<usize>>,
    #[arg(long, default_value_t = 3)]
    pub block_rows: usize,
    #[arg(long, default_value_t = 3)]
    pub block_cols: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long, default_value_t = 0)]
    pub min_rank: usize,
    /// Reject matrices containing this pattern up to permutation.
    #[arg(long, value_parser = matrix_source)]
    pub forbid: Option<Source>,
    /// Stop after this many matrices.
    #[arg(long, default_value_t = 10)]
    pub max: usize,
    #[arg(long, default_value_t = 50_000_000)]
    pub max_nodes: u64,
    /// List every matrix, not only canonical representatives.
    #[arg(long, conflicts_with_all = ["forbid", "min_rank"])]
    pub exhaustive: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run only these suites.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}
