use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "magcap",
    version,
    about = "Magnetic geodesic flow on constant-curvature surfaces and its Hofer-Zehnder capacity",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form capacity of the magnetic disc bundle, optionally certified
    Capacity(CapacityArgs),
    /// Integrate one orbit and write it as CSV (or JSON)
    Simulate(SimulateArgs),
    /// Run invariant suites
    Verify(VerifyArgs),
    /// Capacity or period over a parameter range
    Sweep(SweepArgs),
    /// Swept symplectic area of the circle action
    Area(AreaArgs),
    /// Orbits just below and above the critical speed on a hyperbolic surface
    Mane(ManeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Gaussian curvature
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Magnetic strength
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Radius of the disc bundle
    #[arg(long)]
    pub r: Option<f64>,
    /// Integrator tolerance, in [1e-13, 1e-3]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of plain text or CSV
    #[arg(long)]
    pub json: bool,
    /// JSON file with default values for any of the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub const COMMON_KEYS: [&str; 6] = ["kappa", "s", "r", "tol", "out", "json"];

#[derive(Debug, Args)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also build an admissible profile and measure its periods
    #[arg(long)]
    pub certify: bool,
    /// Slope margin: sup f' = 1 - delta
    #[arg(long)]
    pub delta: Option<f64>,
    /// Flat gap at both ends of the profile
    #[arg(long)]
    pub eta: Option<f64>,
    /// Width of the cosine ramps
    #[arg(long)]
    pub ramp_w: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Kinetic,
    Circle,
    Profiled,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub u: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub w: Option<f64>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Integration time; one period of the orbit when omitted
    #[arg(long)]
    pub duration: Option<f64>,
    /// Number of uniform sample intervals
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub ramp_w: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// geometry, dynamics, analysis, capacity or all
    #[arg(default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub json: bool,
    /// Replace the closed-form field by one with a flipped magnetic term
    #[arg(long, hide = true)]
    pub mutate_lorentz_sign: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    R,
    S,
    Kappa,
    Energy,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub param: Option<SweepParam>,
    #[arg(long, allow_negative_numbers = true)]
    pub min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AreaArgs {
    #[command(flatten)]
    pub common: Common,
    /// Target energy; `r^2/2` when omitted
    #[arg(long)]
    pub energy: Option<f64>,
    /// Grid size in both directions
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ManeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Speed of the closed orbit; half the critical speed by default
    #[arg(long)]
    pub below: Option<f64>,
    /// Speed of the escaping orbit; twice the critical speed by default
    #[arg(long)]
    pub above: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub transient: Option<f64>,
}
