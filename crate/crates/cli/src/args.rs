use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Fractional-order moments in Radon space: transforms, moments,
/// reconstruction, benchmarks and zero-watermarking.
#[derive(Debug, Parser)]
#[command(name = "fmr", version)]
pub struct Cli {
    /// TOML file of key = value settings; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads (output does not depend on this) [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forward Radon transform of an image.
    Radon(RadonArgs),
    /// Moments of an image or of its sinogram.
    Moments(MomentsArgs),
    /// Rebuild an image from a moment file.
    Reconstruct(ReconstructArgs),
    /// Rotation-invariant magnitude features.
    Features(FeaturesArgs),
    /// Cross-validate quadrature moments against the explicit series.
    XvalExplicit(XvalArgs),
    /// Single-feature stability across noise levels.
    BenchHistogram(HistogramArgs),
    /// Reconstruction quality of FM and FMR against K.
    BenchReconstruct(BenchReconArgs),
    /// Rotation and noise recognition benchmark.
    BenchRecognize(RecognizeArgs),
    /// Zero-watermark registration and verification.
    #[command(subcommand)]
    Zw(ZwCommand),
    /// Radial basis function tables for plotting.
    PlotBasis(PlotBasisArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Harmonic,
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainArg {
    /// Moments of the sinogram
    Fmr,
    /// Moments of the image
    Fm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Quadrature with closed-form basis values
    Direct,
    /// FFT over a warped grid (harmonic only)
    Fft,
    /// Recursive polynomial radial tables (polynomial only)
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingArg {
    None,
    NPlusOne,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BasisArgs {
    /// Radial family [default: harmonic]
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Fractional order α [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Polynomial parameter p [default: 3]
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Polynomial parameter q [default: 2]
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DegradeArgs {
    /// Gaussian noise variance added before processing [default: 0]
    #[arg(long)]
    pub noise_var: Option<f64>,
    /// Rotation in degrees applied before the noise [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub angle: Option<f64>,
    /// Noise seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RadonArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Binary sinogram, or CSV when the name ends in .csv
    #[arg(long, short)]
    pub output: PathBuf,
    /// Grid side M, used for both U and V [default: image side N]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Sample radii on the warped grid of this α instead of uniformly
    #[arg(long, allow_negative_numbers = true)]
    pub warp_alpha: Option<f64>,
    #[command(flatten)]
    pub degrade: DegradeArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Order bound K [default: 10]
    #[arg(long)]
    pub k: Option<usize>,
    /// Grid side M [default: image side N]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Computation path [default: fft for harmonic, poly for polynomial]
    #[arg(long, value_enum, conflicts_with = "fast")]
    pub method: Option<MethodArg>,
    /// Shorthand for --method fft
    #[arg(long)]
    pub fast: bool,
    /// Sinogram (FMR) or image (FM) moments [default: fmr]
    #[arg(long, value_enum)]
    pub domain: Option<DomainArg>,
    #[command(flatten)]
    pub degrade: DegradeArgs,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Moment file written by `moments`
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Output image side [default: 128]
    #[arg(long)]
    pub size: Option<usize>,
    /// Sinogram grid side for FMR input [default: max(size, 4K)]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Also write the reconstructed sinogram (FMR input only)
    #[arg(long)]
    pub sinogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// CSV, or the binary feature blob when the name ends in .bin
    #[arg(long, short)]
    pub output: PathBuf,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Order bound K [default: 10]
    #[arg(long)]
    pub k: Option<usize>,
    /// [default: fmr]
    #[arg(long, value_enum)]
    pub domain: Option<DomainArg>,
    /// [default: n-plus-one for fmr, none for fm]
    #[arg(long, value_enum)]
    pub weighting: Option<WeightingArg>,
    #[command(flatten)]
    pub degrade: DegradeArgs,
}

#[derive(Debug, Args)]
pub struct XvalArgs {
    /// Image to test [default: synthetic portrait]
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Side of the synthetic portrait [default: 128]
    #[arg(long)]
    pub size: Option<usize>,
    /// CSV report [default: stdout]
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Largest |n| and |m| compared [default: 3]
    #[arg(long)]
    pub orders: Option<usize>,
    /// Quadrature grid side [default: 256]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Outer series cutoff [default: 60]
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Inner polynomial series cutoff [default: 20]
    #[arg(long)]
    pub s_max: Option<usize>,
    /// Relative tail tolerance [default: 1e-3]
    #[arg(long)]
    pub tail_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DatasetArgs {
    /// Folder of PNG/PGM images, one class each [default: synthetic dead-leaves suite]
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// Number of synthetic images [default: 10]
    #[arg(long)]
    pub count: Option<usize>,
    /// Side of synthetic images [default: 128]
    #[arg(long)]
    pub size: Option<usize>,
    /// Seed of the synthetic suite [default: 1]
    #[arg(long)]
    pub suite_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Comma-separated noise variances [default: 0,0.05,0.1,0.15,0.2]
    #[arg(long, value_delimiter = ',')]
    pub variances: Option<Vec<f64>>,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Feature order as n,m [default: 2,2]
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub order: Option<Vec<i32>>,
    /// [default: fmr]
    #[arg(long, value_enum)]
    pub domain: Option<DomainArg>,
    /// Noise seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Gnuplot data file: one block per image
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchReconArgs {
    /// Image [default: synthetic portrait]
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Side of the synthetic portrait [default: 128]
    #[arg(long)]
    pub size: Option<usize>,
    /// Noise variance [default: 0.2]
    #[arg(long)]
    pub noise_var: Option<f64>,
    /// Comma-separated K values [default: 5,10,20,30,40,50]
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Noise seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Gnuplot data file: k msre_fm msre_fmr ssim_fm ssim_fmr
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecognizeArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Comma-separated noise variances [default: 0,0.05,...,0.3]
    #[arg(long, value_delimiter = ',')]
    pub variances: Option<Vec<f64>>,
    /// Comma-separated rotation angles in degrees [default: 0,10,...,350]
    #[arg(long, value_delimiter = ',')]
    pub angles: Option<Vec<f64>>,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Order bound K [default: 10]
    #[arg(long)]
    pub k: Option<usize>,
    /// Noise seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Gnuplot data file: variance followed by one column per method
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ZwCommand {
    /// Bind a copyright code to an image.
    Register(ZwRegisterArgs),
    /// Recover the code from a test image and report the bit error ratio.
    Verify(ZwVerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CodeArgs {
    /// Copyright code as a string of 0 and 1
    #[arg(long, conflicts_with = "code_text")]
    pub code: Option<String>,
    /// Copyright text; its SHA-256 digest supplies the code bits
    #[arg(long)]
    pub code_text: Option<String>,
}

#[derive(Debug, Args)]
pub struct ZwRegisterArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub code: CodeArgs,
    /// Key seed of the parameter draw [default: 0]
    #[arg(long)]
    pub key: Option<u64>,
    /// Hash length B [default: 64]
    #[arg(long)]
    pub bits: Option<usize>,
    /// Family of the keyed draws [default: polynomial]
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// [default: fmr]
    #[arg(long, value_enum)]
    pub domain: Option<DomainArg>,
    /// Record file
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ZwVerifyArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Record written by `zw register`
    #[arg(long, short)]
    pub record: PathBuf,
    #[command(flatten)]
    pub code: CodeArgs,
}

#[derive(Debug, Args)]
pub struct PlotBasisArgs {
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Largest radial order [default: 10]
    #[arg(long)]
    pub k: Option<usize>,
    /// Radial samples in (0, 1] [default: 512]
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, short)]
    pub output: PathBuf,
}
