mod commands;
mod doc;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use smcirc::{Error, Fp, Limits};

/// Set-multilinear circuit and branching-program toolkit.
///
/// Every command reads one JSON document (from `--in` or standard input)
/// and writes one JSON document (to `--out` or standard output).
#[derive(Parser, Debug)]
#[command(name = "smcirc", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Field characteristic.
    #[arg(
        long,
        global = true,
        env = "SMCIRC_PRIME",
        default_value_t = 2_147_483_647
    )]
    pub prime: u64,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_terms: usize,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_types: usize,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_size: usize,
    /// Input file; standard input when absent.
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Global {
    pub fn limits(&self) -> Limits {
        Limits {
            terms: self.max_terms,
            types: self.max_types,
            size: self.max_size,
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build a standard family.
    Gen(GenArgs),
    /// Check the typing rules and report annotations.
    Validate,
    /// Expand into a sparse polynomial.
    Expand,
    /// Evaluate at a point.
    Eval(AssignArgs),
    /// Substitute values for some variables.
    Substitute(AssignArgs),
    /// Compare two documents.
    Equal(EqualArgs),
    /// Reduce depth to logarithmic in the degree.
    DepthReduce(DepthReduceArgs),
    /// Unfold a circuit into a formula.
    ToFormula,
    /// Lower a circuit to a branching program.
    ToAbp,
    /// List the truncated proof-tree types.
    TreeTypes,
    /// Check that every monomial has a single truncated type.
    PropertyU,
    /// Split into one component per truncated type.
    Decompose,
    /// Keep the products whose frontier gate has the given index set.
    Slice(SliceArgs),
    /// Rewrite a single-type circuit as a formula.
    UniqueToFormula,
    /// Coefficient-matrix ranks.
    Rank(RankArgs),
    /// Number of index sets on each layer of a program.
    TypeWidth,
    /// Whether the type width at layer d - w is at most a threshold.
    Narrow(NarrowArgs),
    /// Detect a read-once oblivious bucket order.
    RoabpDetect,
    /// Check that every gate's index set is an interval of an order.
    IntervalCheck(OrderArgs),
    /// Monte-Carlo statistics for matched pairs.
    GoodPairs(GoodPairsArgs),
}

impl Command {
    pub fn name(&self) -> String {
        let v = serde_json::to_value(self).expect("serializable");
        let head = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Object(m) => m.keys().next().cloned().unwrap_or_default(),
            _ => String::new(),
        };
        match self {
            Command::Gen(g) => format!("{head} {}", g.kind.to_possible_value().unwrap().get_name()),
            _ => head,
        }
    }

    pub fn params(&self) -> serde_json::Value {
        match serde_json::to_value(self).expect("serializable") {
            serde_json::Value::Object(m) => {
                m.into_iter().next().map(|(_, v)| v).unwrap_or_default()
            }
            _ => serde_json::Value::Object(Default::default()),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Per,
    Det,
    PerRoabp,
    DetRoabp,
    SigmaP,
    SigmaPAbp,
    InterpF,
    Blockdiag,
    Random,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    pub kind: GenKind,
    /// Matrix dimension.
    #[arg(long)]
    pub n: Option<u32>,
    /// Degree parameter.
    #[arg(long)]
    pub d: Option<u32>,
    /// Block size for the block-diagonal restriction.
    #[arg(long)]
    pub nu: Option<u32>,
    /// `identity`, `random`, or a comma-separated permutation.
    #[arg(long, default_value = "identity")]
    pub sigma: String,
    /// Semicolon-separated permutations for the interpolated family.
    #[arg(long)]
    pub sigmas: Option<String>,
    /// Number of permutations drawn for the interpolated family.
    #[arg(long, default_value_t = 2)]
    pub count: usize,
    /// Gate budget for random circuits.
    #[arg(long, default_value_t = 60)]
    pub max_gates: usize,
    /// Largest bucket for random circuits.
    #[arg(long, default_value_t = 3)]
    pub max_bucket: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct AssignArgs {
    /// Assignment file.
    #[arg(long)]
    pub assign: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EqualMode {
    Exact,
    Random,
}

#[derive(Args, Debug, Serialize)]
pub struct EqualArgs {
    /// Document to compare against.
    #[arg(long)]
    pub against: PathBuf,
    #[arg(long, value_enum, default_value_t = EqualMode::Exact)]
    pub mode: EqualMode,
    #[arg(long, default_value_t = 20)]
    pub trials: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct DepthReduceArgs {
    /// Emit the per-stage ledger instead of the circuit.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct SliceArgs {
    /// Comma-separated buckets; without it, check that all slices partition the input.
    #[arg(long)]
    pub index_set: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct RankArgs {
    /// Comma-separated bucket order for the fixed-order matrices.
    #[arg(long, conflicts_with = "abp_witness")]
    pub order: Option<String>,
    /// Ranks of the layer factorization of a program.
    #[arg(long)]
    pub abp_witness: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct NarrowArgs {
    #[arg(long)]
    pub w: usize,
    #[arg(long)]
    pub threshold: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct OrderArgs {
    /// Comma-separated bucket order.
    #[arg(long)]
    pub order: String,
}

#[derive(Args, Debug, Serialize)]
pub struct GoodPairsArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub samples: usize,
}

fn dispatch(cli: &Cli) -> Result<String, Error> {
    match cli.global.prime {
        2_147_483_647 => commands::run::<Fp<2_147_483_647>>(cli),
        1_000_000_007 => commands::run::<Fp<1_000_000_007>>(cli),
        998_244_353 => commands::run::<Fp<998_244_353>>(cli),
        65_537 => commands::run::<Fp<65_537>>(cli),
        p => Err(Error::UnsupportedPrime(p)),
    }
}

fn report_error(e: &Error) -> ExitCode {
    let mut v = serde_json::to_value(e).expect("serializable");
    if let Some(obj) = v.as_object_mut() {
        obj.insert("message".into(), e.to_string().into());
        obj.insert("exit_code".into(), e.exit_code().into());
    }
    eprintln!("{v}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            return report_error(&Error::Schema(first.to_string()));
        }
    };
    match dispatch(&cli).and_then(|text| doc::write_output(cli.global.out.as_ref(), &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(&e),
    }
}
