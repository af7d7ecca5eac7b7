//! Command-line front end: tiling generation, single runs, Monte Carlo
//! experiments, parameter sweeps and structural verification.

pub mod commands;
pub mod error;
pub mod svg;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use quasiperc::dynamics::{BoundaryPolicy, RuleSpec};
use quasiperc::percolation::MeasureSpec;

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "quasiperc", version, about = "Bootstrap percolation on rhombus tilings")]
pub struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "QUASIPERC_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a tiling and write it as a patch file.
    Tile(TileArgs),
    /// Evolve one random configuration on a patch.
    Run(RunArgs),
    /// Monte Carlo invasion estimate for an experiment file.
    Mc(McArgs),
    /// Invasion estimates over a range of measure parameters.
    Sweep(SweepArgs),
    /// Structural checks on a patch.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct TileArgs {
    /// penrose, grid, ngrid:N, band, fortress-grid or grid-hole.
    #[arg(long)]
    pub kind: String,
    /// Window radius of multigrid kinds.
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    /// Half side of the quadrilateral grids.
    #[arg(long, default_value_t = 10)]
    pub half_size: i32,
    /// Comma-separated grid offsets.
    #[arg(long, value_delimiter = ',')]
    pub offsets: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub patch: PathBuf,
    /// m2, m3, directed:SPEC or directed:SPEC/mK.
    #[arg(long, default_value = "m2", value_parser = parse_rule)]
    pub rule: RuleSpec,
    /// bernoulli:P or neighbourhood-max:Q.
    #[arg(long, value_parser = parse_measure)]
    pub measure: MeasureSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub trial: u32,
    #[arg(long, value_enum, default_value = "open")]
    pub boundary: Boundary,
    /// Directory for initial and final SVG frames.
    #[arg(long)]
    pub frames: Option<PathBuf>,
    /// Also write one frame per round.
    #[arg(long, requires = "frames")]
    pub every_round: bool,
    /// Record file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Boundary {
    Open,
    Infected,
}

impl From<Boundary> for BoundaryPolicy {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Open => BoundaryPolicy::Open,
            Boundary::Infected => BoundaryPolicy::Infected,
        }
    }
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub experiment: PathBuf,
    #[arg(long)]
    pub trials: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-trial rows.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary JSON; standard output if absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Add wall-clock time and thread count to the summary.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub mc: McArgs,
    /// Comma-separated ascending parameters.
    #[arg(long, value_delimiter = ',', conflicts_with = "range", required_unless_present = "range")]
    pub params: Option<Vec<f64>>,
    /// START:STOP:STEP, inclusive.
    #[arg(long)]
    pub range: Option<String>,
    /// Independent samples per parameter instead of one shared sample.
    #[arg(long)]
    pub uncoupled: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub patch: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    pub suite: verify::Suite,
    #[arg(long, default_value_t = 6)]
    pub kmax: usize,
    /// Fortress seeds are the tiles within this distance of the central tile.
    #[arg(long, default_value_t = 4)]
    pub seed_radius: u32,
    /// Subcritical runs inspected by the stability suite.
    #[arg(long, default_value_t = 20)]
    pub samples: u32,
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    #[arg(long, default_value_t = 3)]
    pub count_tiles: usize,
    /// JSON list of tile cycles to check as chain polygons.
    #[arg(long)]
    pub cycles: Option<PathBuf>,
    /// Report file; standard output if absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn parse_rule(s: &str) -> Result<RuleSpec, String> {
    s.parse().map_err(|e: quasiperc::Error| e.to_string())
}

fn parse_measure(s: &str) -> Result<MeasureSpec, String> {
    s.parse().map_err(|e: quasiperc::Error| e.to_string())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { error::EXIT_USAGE } else { error::EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => error::EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let pool = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Tile(a) => commands::tile(&a),
        Command::Run(a) => commands::run(&a),
        Command::Mc(a) => commands::mc(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Verify(a) => commands::verify(&a),
    })
}
