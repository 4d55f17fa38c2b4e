//! Command-line front end and acceptance suite for the metric dimension tools.

pub mod build;
pub mod commands;
pub mod io;
pub mod report;
pub mod suite;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nagata_core::metric::Norm;
use thiserror::Error;

use crate::report::RunReport;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input files.
    #[error("input error: {0}")]
    Input(String),
    /// Bad flags or flag combinations.
    #[error("usage error: {0}")]
    Usage(String),
    /// An oracle refused or a computation failed on valid input.
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nagata", version, about = "Dimension, extension and hyperbolization tools for finite metric spaces")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "NAGATA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Exact rational arithmetic; numbers are emitted as "p/q" strings.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Also write the JSON report to this file.
    #[arg(long = "json-out", global = true, value_name = "PATH")]
    pub json_out: Option<PathBuf>,
    /// Run oracles outside their guaranteed windows; bounds are then reported, not asserted.
    #[arg(long, global = true)]
    pub force: bool,
    /// Norm for point clouds and simplex targets.
    #[arg(long, global = true, value_enum, default_value_t = NormArg::L1)]
    pub norm: NormArg,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L1,
    L2,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Norm {
        match n {
            NormArg::L1 => Norm::L1,
            NormArg::L2 => Norm::L2,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpaceArg {
    /// Distance table (JSON) or point cloud (CSV).
    #[arg(long)]
    pub space: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    /// `max(d, ε)` off the diagonal.
    Max,
    /// `min(d, ε)`.
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchArg {
    Auto,
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    /// Link points at distance `<= r`.
    AtMost,
    /// Link points at distance `< r`.
    LessThan,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the metric axioms.
    Validate(SpaceArg),
    /// Apply `max(d, ε)` or `min(d, ε)` and report bilipschitz constants.
    Transform {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, value_enum)]
        kind: TransformKind,
        #[arg(long)]
        epsilon: String,
    },
    /// Lebesgue profile of a cover; decompositions are also converted.
    Lebesgue {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        cover: PathBuf,
        /// Neighborhood radius as a fraction of r when converting a decomposition.
        #[arg(long, default_value = "1/4")]
        shrink: String,
    },
    /// Nerve and barycentric map of a cover, with the Lipschitz bound.
    Nerve {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        cover: PathBuf,
    },
    /// McShane (or Whitney) extension of a real-valued map.
    ExtendMcshane {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        map: PathBuf,
        /// Use the smallest extension instead of the largest.
        #[arg(long)]
        whitney: bool,
    },
    /// Extension of a map into a simplex.
    ExtendSimplex {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        map: PathBuf,
    },
    /// Extension of a map into a simplex boundary through a cover refiner.
    ExtendSphere {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        map: PathBuf,
        #[arg(long = "C", default_value = "2")]
        c: String,
    },
    /// Lower the multiplicity of an (m+2)-element cover through a sphere extender.
    Refine {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        cover: PathBuf,
        /// Lebesgue scale of the cover; defaults to its Lebesgue number.
        #[arg(long)]
        r: Option<String>,
        #[arg(long = "C", default_value = "2")]
        c: String,
    },
    /// Refine a cover with one more element than the inner refiner handles.
    Lift {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        cover: PathBuf,
        /// Lebesgue scale of the cover; defaults to its Lebesgue number.
        #[arg(long)]
        s: Option<String>,
        #[arg(long = "C", default_value = "2")]
        c: String,
    },
    /// Nerve surgery on a decomposition with n+2 families.
    Surgery {
        #[command(flatten)]
        space: SpaceArg,
        /// Cover file with `families` and `r`.
        #[arg(long)]
        cover: PathBuf,
        /// Convert the decomposition to neighborhoods of this fraction of r first.
        #[arg(long)]
        shrink: Option<String>,
        #[arg(long = "C", default_value = "2")]
        c: String,
    },
    /// Dimension bounds at each scale.
    Dim {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long = "C")]
        c: String,
        /// Comma-separated scales; defaults to the distinct distances.
        #[arg(long)]
        scales: Option<String>,
        /// Compare with `max(d, M)` at scales above M.
        #[arg(long = "macro", value_name = "M", conflicts_with = "micro")]
        macro_m: Option<String>,
        /// Compare with `min(d, M)` at scales below M.
        #[arg(long = "micro", value_name = "M")]
        micro: Option<String>,
        #[arg(long, value_enum, default_value_t = SearchArg::Auto)]
        search: SearchArg,
    },
    /// Certify dimension zero by bounding chain components.
    Dim0 {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long = "C")]
        c: String,
        /// Comma-separated scales; defaults to distances and the midpoints between them.
        #[arg(long)]
        scales: Option<String>,
        #[arg(long, value_enum, default_value_t = RuleArg::LessThan)]
        rule: RuleArg,
    },
    /// Build a cover tower and certify the hyperbolic metric it induces.
    Hyperbolize {
        #[command(flatten)]
        space: SpaceArg,
        /// Families per level minus one; the smallest of 0..=3 that works by default.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "C", default_value = "2")]
        c: String,
        /// Ratio between consecutive level scales.
        #[arg(long, default_value = "4")]
        growth: String,
        /// Label of the basepoint for Gromov products.
        #[arg(long)]
        basepoint: Option<String>,
        /// Certify every basepoint, not just one.
        #[arg(long)]
        all_basepoints: bool,
    },
    /// Run the seeded acceptance suite.
    Corpus {
        /// Run only these criteria (1-10); all by default.
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Transform { .. } => "transform",
            Command::Lebesgue { .. } => "lebesgue",
            Command::Nerve { .. } => "nerve",
            Command::ExtendMcshane { .. } => "extend-mcshane",
            Command::ExtendSimplex { .. } => "extend-simplex",
            Command::ExtendSphere { .. } => "extend-sphere",
            Command::Refine { .. } => "refine",
            Command::Lift { .. } => "lift",
            Command::Surgery { .. } => "surgery",
            Command::Dim { .. } => "dim",
            Command::Dim0 { .. } => "dim0",
            Command::Hyperbolize { .. } => "hyperbolize",
            Command::Corpus { .. } => "corpus",
        }
    }
}

/// Outcome of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    /// `None` when argument parsing failed before a command was known.
    pub report: Option<RunReport>,
    /// Human-readable summary for stderr.
    pub summary: String,
}

/// Parses `argv` (program name first), runs the command and builds the report.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let start = Instant::now();
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { code, report: None, summary: e.render().to_string() };
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut report = RunReport::new(cli.command.name(), args, cli.exact, cli.seed);
    let code = match commands::dispatch(&cli, &mut report) {
        Ok(()) => i32::from(!report.passed),
        Err(e) => {
            report.fail(&e);
            e.exit_code()
        }
    };
    let mut summary = report.summary();
    summary.push_str(&format!("\nwall time: {:.3}s", start.elapsed().as_secs_f64()));
    Outcome { code, report: Some(report), summary }
}

/// Entry point used by the binary: prints, writes `--json-out` and returns
/// the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let json_out = Cli::try_parse_from(&argv).ok().and_then(|c| c.json_out);
    let outcome = run(&argv);
    let Some(report) = &outcome.report else {
        if outcome.code == 0 {
            print!("{}", outcome.summary);
        } else {
            eprint!("{}", outcome.summary);
        }
        return outcome.code;
    };
    let json = report.to_json();
    println!("{json}");
    eprintln!("{}", outcome.summary);
    if let Some(path) = json_out {
        if let Err(e) = std::fs::write(&path, format!("{json}\n")) {
            eprintln!("cannot write {}: {e}", path.display());
            return 2;
        }
    }
    outcome.code
}
