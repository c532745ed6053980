use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Solvers for the narrow escape problem.
///
/// Every run writes one JSON document or CSV table that embeds the fully
/// resolved configuration; `nescape replay FILE` re-runs it.
#[derive(Parser, Debug)]
#[command(name = "nescape", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Invocation,
    /// Output file (stdout if absent). Relative paths resolve against
    /// $NESCAPE_OUTPUT_DIR when it is set.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; inferred from the file extension when omitted.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Append rows to an existing CSV file with the same columns.
    #[arg(long, global = true)]
    pub append: bool,
}

#[derive(Subcommand, Debug)]
pub enum Invocation {
    #[command(flatten)]
    Run(Box<Command>),
    /// Re-run the configuration embedded in a previous output file.
    Replay {
        file: PathBuf,
    },
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    /// Closed-form MFPT formulas.
    #[command(allow_negative_numbers = true)]
    Asym(AsymArgs),
    /// Two-term sphere formula over a range of cap radii.
    #[command(allow_negative_numbers = true)]
    Sphere(SphereArgs),
    /// Fredholm solve for b₀ on the ball, with norm and double-integral checks.
    #[command(allow_negative_numbers = true)]
    Collins(CollinsArgs),
    /// Legendre-series collocation solve on the ball.
    #[command(allow_negative_numbers = true)]
    Spectral(SpectralArgs),
    /// Flux integral equation on an elliptic or imported window.
    #[command(allow_negative_numbers = true)]
    Window(WindowArgs),
    /// Brownian dynamics simulation.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Simulation next to every applicable solver for one geometry.
    #[command(allow_negative_numbers = true)]
    Compare(CompareArgs),
    /// Numerical operator norm against the analytic bound over ε.
    #[command(allow_negative_numbers = true)]
    Norms(NormsArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Ellipse,
    Squeezed,
    Channel,
    /// Mean arrival time at a hole from a bath; SI units, concentration in mol/L.
    Arrival,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct AsymArgs {
    #[arg(long, value_enum)]
    pub shape: Shape,
    /// Domain volume.
    #[arg(long = "V")]
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub V: Option<f64>,
    /// Diffusion coefficient.
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub D: f64,
    /// Window (major) semi-axis or hole radius.
    #[arg(long)]
    pub a: f64,
    /// Minor semi-axis; alternative to --e.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Eccentricity; alternative to --b.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
    /// Channel length.
    #[arg(long = "L")]
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub L: Option<f64>,
    /// Bath concentration in mol/L.
    #[arg(long = "conc-molar")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conc_molar: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct SphereArgs {
    #[arg(long = "R", default_value_t = 1.0)]
    #[serde(rename = "R")]
    pub R: f64,
    #[arg(long = "D", default_value_t = 1.0)]
    #[serde(rename = "D")]
    pub D: f64,
    #[arg(long = "a-min", default_value_t = 0.01)]
    pub a_min: f64,
    #[arg(long = "a-max", default_value_t = 0.3)]
    pub a_max: f64,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Full,
    Zero,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct CollinsArgs {
    #[arg(long = "R", default_value_t = 1.0)]
    #[serde(rename = "R")]
    pub R: f64,
    /// Cap half-angle in radians.
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 64)]
    pub nquad: usize,
    #[arg(long, value_enum, default_value_t = Kernel::Full)]
    pub kernel: Kernel,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct SpectralArgs {
    #[arg(long = "R", default_value_t = 1.0)]
    #[serde(rename = "R")]
    pub R: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = narrow_escape::spectral::DEFAULT_TERMS)]
    pub terms: usize,
    /// Collocation points; 4 × terms when omitted.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collocation: Option<usize>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct WindowArgs {
    /// Semi-axis along x (ignored with --mesh-in).
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Semi-axis along y; defaults to a.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Mesh resolution (number of rings).
    #[arg(long, default_value_t = 24)]
    pub n: usize,
    #[arg(long = "V", default_value_t = 1.0)]
    #[serde(rename = "V")]
    pub V: f64,
    #[arg(long = "D", default_value_t = 1.0)]
    #[serde(rename = "D")]
    pub D: f64,
    /// Read the mesh from a text file (`x y area` per line).
    #[arg(long = "mesh-in")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_in: Option<PathBuf>,
    /// Write the mesh used to a text file.
    #[arg(long = "mesh-out")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_out: Option<PathBuf>,
    /// Interior points for the constant-potential check.
    #[arg(long = "check-points", default_value_t = 30)]
    pub check_points: usize,
    #[arg(long = "check-order", default_value_t = 16)]
    pub check_order: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Ball,
    Cylinder,
    Box,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct GeometryArgs {
    #[arg(long, value_enum)]
    #[serde(rename = "kind")]
    pub geometry: GeometryKind,
    /// Ball radius.
    #[arg(long = "R")]
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub R: Option<f64>,
    /// Cap half-angle (ball).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Cylinder length.
    #[arg(long = "L")]
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub L: Option<f64>,
    /// Cylinder radius.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lx: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ly: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lz: Option<f64>,
    /// Window semi-axis along x (box).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Window semi-axis along y (box).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct RunArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[arg(long = "D", default_value_t = 1.0)]
    #[serde(rename = "D")]
    pub D: f64,
    /// Time step; the geometry default when omitted.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-steps", default_value_t = narrow_escape::sim::DEFAULT_MAX_STEPS)]
    pub max_steps: u64,
    /// `uniform` or a point `x,y,z`.
    #[arg(long, default_value = "uniform")]
    pub start: String,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated, geometrically spaced time steps for a convergence sweep.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Window mesh resolution for the integral-equation row (box only).
    #[arg(long = "mesh-n", default_value_t = 24)]
    pub mesh_n: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct NormsArgs {
    #[arg(long = "R", default_value_t = 1.0)]
    #[serde(rename = "R")]
    pub R: f64,
    #[arg(long = "eps-min", default_value_t = 0.005)]
    pub eps_min: f64,
    #[arg(long = "eps-max", default_value_t = 0.5)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long, default_value_t = 64)]
    pub nquad: usize,
}
