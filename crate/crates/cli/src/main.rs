//! `witnesskit`: build Delaunay and witness complexes from point files and
//! check the weak/strong witness equivalence on random instances.

mod commands;
mod config;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "witnesskit", version, about = "Weak, strong and robust witnesses for Delaunay complexes")]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeometryArg {
    Euclidean,
    Weighted,
    #[value(alias = "hyperbolic")]
    HyperbolicBall,
    Hemisphere,
    Sphere,
}

impl From<GeometryArg> for witnesskit::GeometryKind {
    fn from(g: GeometryArg) -> Self {
        use witnesskit::GeometryKind as K;
        match g {
            GeometryArg::Euclidean => K::Euclidean,
            GeometryArg::Weighted => K::Weighted,
            GeometryArg::HyperbolicBall => K::HyperbolicBall,
            GeometryArg::Hemisphere => K::Hemisphere,
            GeometryArg::Sphere => K::Sphere,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Maxmin,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegressionArg {
    PolarCaps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CounterexampleArg {
    PolarCaps,
    TwinSimplex,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Base seed for every random choice.
    #[arg(long, env = "WITNESSKIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Margin tolerance of the geometry (default 1e-10).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Delaunay complex of a point file.
    Delaunay {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "euclidean")]
        geometry: GeometryArg,
        /// Checked against the column count when given.
        #[arg(long)]
        dim: Option<usize>,
        /// Default: n + 1, or n on the sphere.
        #[arg(long)]
        max_dim: Option<usize>,
        /// Build the complex of simplices whose faces all have weak witnesses.
        #[arg(long)]
        weak: bool,
        /// Include a witness certificate per simplex.
        #[arg(long)]
        certificates: bool,
        /// Candidate counts for the sampled geometries.
        #[arg(long, value_delimiter = ',')]
        resolution: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the weak and strong complexes on seeded random instances.
    Verify {
        #[arg(long)]
        trials: Option<usize>,
        /// Site counts, cycled over trials.
        #[arg(long, value_delimiter = ',', default_value = "4,5,6,7,8")]
        sizes: Vec<usize>,
        /// Dimensions, cycled over trials.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        dims: Vec<usize>,
        #[arg(long, value_enum, default_value = "euclidean")]
        geometry: GeometryArg,
        /// Run a built-in instance instead of random trials.
        #[arg(long, value_enum)]
        regression: Option<RegressionArg>,
        #[arg(long, value_delimiter = ',')]
        resolution: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Witness complex on landmarks chosen from the data.
    WitnessComplex {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "euclidean")]
        geometry: GeometryArg,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        landmarks: usize,
        #[arg(long, value_enum, default_value = "maxmin")]
        method: MethodArg,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Genericity of points on the sphere; exits 1 if not generic.
    Genericity {
        input: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample the comparator axioms of a geometry; exits 1 on any failure.
    CheckAxioms {
        #[arg(long, value_enum, default_value = "euclidean")]
        geometry: GeometryArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Number of samples.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Emit a spherical instance where weak witnesses do not give a strong one.
    Counterexample {
        #[arg(value_enum)]
        kind: CounterexampleArg,
        /// Sites on the latitude circle.
        #[arg(long, default_value_t = 3)]
        p: usize,
        /// Latitude of the circle in radians (default pi/3).
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_3)]
        latitude: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.09)]
        epsilon_prime: f64,
        /// Recompute the expectations; exits 1 if any fails.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 20_000)]
        resolution: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: String, source: input::ParseError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] witnesskit::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use witnesskit::Error as E;
        match self {
            CliError::Core(E::ConditionFailed { .. } | E::GenericityViolation { .. } | E::MissingWeakWitness(_)) => 1,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
