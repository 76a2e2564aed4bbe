use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gaborflow", version, about = "Discrete Gabor transforms and left-invariant evolutions")]
pub struct Cli {
    /// Write a JSON run report (parameters, metrics, outputs, wall time).
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sampled Gaussian chirp signal.
    Chirp(ChirpArgs),
    /// Forward or inverse Gabor transform of a signal.
    Gabor(GaborArgs),
    /// Differential reassignment of a phase-space field.
    Reassign(ReassignArgs),
    /// Coherence-enhancing or linear left-invariant diffusion.
    Diffuse(DiffuseArgs),
    /// Exact transform of a Gaussian chirp eroded for time t.
    ChirpOracle(ChirpOracleArgs),
    /// Dominant local frequency of a 2D image.
    Freqfield(FreqfieldArgs),
    /// Deformation net of a tagged image stack.
    Defnet(DefnetArgs),
    /// Synthetic tagged stack with its exact material grid.
    Phantom(PhantomArgs),
    /// Colour image of a phase-space field.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowArg {
    Gaussian,
    Cr,
}

impl From<WindowArg> for gaborflow::WindowKind {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::Gaussian => gaborflow::WindowKind::SampledGaussian,
            WindowArg::Cr => gaborflow::WindowKind::DiscreteCr,
        }
    }
}

/// Grid parameters; `--preset` fills all of them.
#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, value_parser = ["paper128"])]
    pub preset: Option<String>,
    /// Signal length N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Spatial positions K (defaults to N).
    #[arg(long)]
    pub k: Option<usize>,
    /// Frequency bins M (defaults to N).
    #[arg(long)]
    pub m: Option<usize>,
    /// Phase levels Q (defaults to 2M/L).
    #[arg(long)]
    pub q: Option<usize>,
    /// Window scale.
    #[arg(long)]
    pub a: Option<f64>,
}

/// Defaults give the 128-sample test chirp.
#[derive(Debug, Args)]
pub struct ChirpArgs {
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, default_value_t = 0.15)]
    pub b: f64,
    #[arg(long, default_value_t = 50.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.5)]
    pub centre: f64,
    /// Carrier frequency in cycles per signal length.
    #[arg(long, default_value_t = 32.0)]
    pub carrier: f64,
    /// `.csv` for text, anything else for raw c128 with sidecar.
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GaborArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub window: WindowArg,
    /// Synthesise a signal from a field; grid parameters come from the field.
    #[arg(long)]
    pub inverse: bool,
    /// Reference signal for reconstruction errors (inverse only).
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Also write a colour image of the field (forward only).
    #[arg(long)]
    pub render: Option<PathBuf>,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Upwind,
    Erosion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Consistent,
    Published,
}

#[derive(Debug, Args)]
pub struct ReassignArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Window used to synthesise the reference comparison.
    #[arg(long, value_enum, default_value = "gaussian")]
    pub window: WindowArg,
    /// Window scale of the metric (defaults to the field's).
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, value_enum, default_value = "consistent")]
    pub scheme: SchemeArg,
    /// Signal the field came from; enables the eps1/eps2 metrics.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Rescale the reconstruction to the reference energy before comparing.
    #[arg(long)]
    pub rescale: bool,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiffuseMode {
    Ced,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdaptivityArg {
    Hessian,
    StructureTensor,
}

#[derive(Debug, Args)]
pub struct DiffuseArgs {
    #[arg(long, value_enum)]
    pub mode: DiffuseMode,
    /// Metric balance (defaults to the value that squares the grid).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Pre-smoothing scale in grid cells.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "hessian")]
    pub adaptivity: AdaptivityArg,
    /// Rebuild the conductivity every step.
    #[arg(long)]
    pub readapt: bool,
    /// Linear mode: diffusivity along position.
    #[arg(long, default_value_t = 1.0)]
    pub d11: f64,
    /// Linear mode: diffusivity along frequency.
    #[arg(long, default_value_t = 1.0)]
    pub d22: f64,
    /// Linear mode: local-approximation constant.
    #[arg(long, default_value_t = 1.0)]
    pub c_loc: f64,
    /// Linear mode: relative kernel cutoff.
    #[arg(long, default_value_t = 1e-12)]
    pub truncation: f64,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ChirpOracleArgs {
    /// Envelope width.
    #[arg(long)]
    pub b: f64,
    /// Chirp rate.
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Only the flat kernel (eta = 1/2) has a closed form.
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    /// Positions K and frequency bins M; N defaults to M.
    #[arg(long, num_args = 2, value_names = ["K", "M"])]
    pub grid: Vec<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    /// Exponent level whose collapse time is reported.
    #[arg(long, default_value_t = 1.0)]
    pub level: f64,
    /// Where to write the spectral summary (stdout otherwise).
    #[arg(long)]
    pub info: Option<PathBuf>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RefineArg {
    Argmax,
    CentreOfMass,
    LogParabolic,
}

impl From<RefineArg> for gaborflow::deform::Refinement {
    fn from(r: RefineArg) -> Self {
        match r {
            RefineArg::Argmax => Self::Argmax,
            RefineArg::CentreOfMass => Self::CentreOfMass,
            RefineArg::LogParabolic => Self::LogParabolic,
        }
    }
}

/// Per-axis 2D analysis settings shared by `freqfield` and `defnet`.
#[derive(Debug, Clone, Args)]
pub struct AnalysisArgs {
    /// Window standard deviation in pixels.
    #[arg(long, default_value_t = 4.0)]
    pub sigma: f64,
    /// Analysis positions per axis (defaults to half the image size).
    #[arg(long)]
    pub k: Option<usize>,
    /// Frequency bins per axis (defaults to the image size).
    #[arg(long)]
    pub m: Option<usize>,
    /// Phase levels per axis (defaults to the image size).
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub dc_mask: f64,
    #[arg(long, value_enum, default_value = "log-parabolic")]
    pub refine: RefineArg,
    /// Erode the 2D field for this time before the peak search.
    #[arg(long)]
    pub reassign_t: Option<f64>,
    /// Analyse the image as is instead of removing its mean.
    #[arg(long)]
    pub keep_mean: bool,
}

#[derive(Debug, Args)]
pub struct FreqfieldArgs {
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Colour image of the field (hue for direction, value for magnitude).
    #[arg(long)]
    pub render: Option<PathBuf>,
    /// Image as 8/16-bit PGM or raw f64 with JSON sidecar.
    pub input: PathBuf,
    /// Frequency field as raw f64 `[K, K, 2]` with sidecar.
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PolarArgs {
    /// Centre of the polar grid (row, column).
    #[arg(long, num_args = 2, value_names = ["ROW", "COL"])]
    pub centre: Option<Vec<f64>>,
    #[arg(long, default_value_t = 20.0)]
    pub outer: f64,
    #[arg(long, default_value_t = 2.0)]
    pub step: f64,
    #[arg(long, default_value_t = 8)]
    pub rings: usize,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct DefnetArgs {
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[command(flatten)]
    pub polar: PolarArgs,
    /// Seed trajectory, CSV with header `t,x,y`.
    #[arg(long)]
    pub seed: Option<PathBuf>,
    /// Exact net; supplies the seed when `--seed` is absent and enables the error metric.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Directory for one net overlay per frame.
    #[arg(long)]
    pub render_dir: Option<PathBuf>,
    /// Stack manifest written by `phantom` or by hand.
    pub manifest: PathBuf,
    /// Net as CSV with header `t,r,j,x,y`.
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    /// Start from a JSON phantom description instead of the built-in one.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long)]
    pub fading: Option<f64>,
    /// No motion, only fading.
    #[arg(long = "static")]
    pub still: bool,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write 8- or 16-bit PGM instead of raw f64.
    #[arg(long, value_parser = ["8", "16"])]
    pub pgm: Option<String>,
    #[command(flatten)]
    pub polar: PolarArgs,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    PhaseHue,
    ModulusGray,
    Overlay,
}

impl From<StyleArg> for gaborflow::io::RenderStyle {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::PhaseHue => Self::PhaseHue,
            StyleArg::ModulusGray => Self::ModulusGray,
            StyleArg::Overlay => Self::Overlay,
        }
    }
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long, value_enum, default_value = "overlay")]
    pub style: StyleArg,
    pub input: PathBuf,
    pub output: PathBuf,
}
