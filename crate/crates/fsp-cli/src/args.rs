//! Command-line surface. Angles cross this boundary in degrees and are
//! converted to radians immediately behind it.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fsp_core::Interpolation;

#[derive(Debug, Parser)]
#[command(
    name = "fsp",
    version,
    about = "Fisheye footage pipeline: virtual views, stereo skeleton reconstruction, limb statistics, synthetic scenes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a rectilinear virtual view from a fisheye frame
    Remap(RemapArgs),
    /// Triangulate 3D skeletons from two cameras' 2D keypoints
    Reconstruct(ReconstructArgs),
    /// Summarize limb-length statistics over reconstructed skeletons
    Stats(StatsArgs),
    /// Generate a synthetic scene: calibration, detections, ground truth
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InterpolationArg {
    Bilinear,
    Nearest,
}

impl From<InterpolationArg> for Interpolation {
    fn from(arg: InterpolationArg) -> Interpolation {
        match arg {
            InterpolationArg::Bilinear => Interpolation::Bilinear,
            InterpolationArg::Nearest => Interpolation::Nearest,
        }
    }
}

#[derive(Debug, Args)]
pub struct RemapArgs {
    /// Calibration JSON describing the source cameras
    #[arg(long)]
    pub calibration: PathBuf,

    /// Id of the source camera within the calibration
    #[arg(long)]
    pub camera: String,

    /// Source image (PNG, PGM or PPM), sized like the camera sensor
    #[arg(long)]
    pub input: PathBuf,

    /// Where to write the rendered view
    #[arg(long)]
    pub output: PathBuf,

    /// View yaw in degrees about the camera y axis
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, conflicts_with_all = ["target_x", "target_y"])]
    pub yaw: f64,

    /// View pitch in degrees about the camera x axis
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, conflicts_with_all = ["target_x", "target_y"])]
    pub pitch: f64,

    /// View roll in degrees about the camera z axis
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, conflicts_with_all = ["target_x", "target_y"])]
    pub roll: f64,

    /// Aim the view at this source pixel column (with --target-y),
    /// leveling the horizon against the calibration's gravity
    #[arg(long, requires = "target_y")]
    pub target_x: Option<f64>,

    /// Aim the view at this source pixel row (with --target-x)
    #[arg(long, requires = "target_x")]
    pub target_y: Option<f64>,

    /// Horizontal field of view of the rendered view, degrees
    #[arg(long, default_value_t = 90.0)]
    pub fov_deg: f64,

    /// View width in pixels
    #[arg(long, default_value_t = 640)]
    pub width: u32,

    /// View height in pixels
    #[arg(long, default_value_t = 640)]
    pub height: u32,

    #[arg(long, value_enum, default_value_t = InterpolationArg::Bilinear)]
    pub interpolation: InterpolationArg,

    /// Gray value for view pixels with no source
    #[arg(long, default_value_t = 0)]
    pub fill: u8,

    /// Lookup-map cache file: read when it exists, written after building
    /// otherwise
    #[arg(long)]
    pub map_cache: Option<PathBuf>,

    /// Print per-stage wall-clock timings to stdout
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Calibration JSON describing both cameras
    #[arg(long)]
    pub calibration: PathBuf,

    /// Keypoint detections from the first camera
    #[arg(long)]
    pub keypoints_a: PathBuf,

    /// Keypoint detections from the second camera
    #[arg(long)]
    pub keypoints_b: PathBuf,

    /// Where to write the reconstructed skeletons
    #[arg(long)]
    pub output: PathBuf,

    /// Joints whose lower detection confidence falls below this are ignored
    #[arg(long, default_value_t = 0.3)]
    pub min_confidence: f64,

    /// Joints with a worse reprojection residual (view pixels) are dropped
    #[arg(long, default_value_t = 5.0)]
    pub max_residual: f64,

    /// Horizontal field of view of the person-tracking views, degrees
    #[arg(long, default_value_t = 90.0)]
    pub fov_deg: f64,

    /// Side length of the square person-tracking views, pixels
    #[arg(long, default_value_t = 640)]
    pub view_size: u32,

    /// Print per-stage wall-clock timings to stdout
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Reconstructed skeleton JSON to summarize
    #[arg(long)]
    pub input: PathBuf,

    /// Where to write the per-person limb statistics
    #[arg(long)]
    pub output: PathBuf,

    /// Also render the statistics as an SVG box plot
    #[arg(long)]
    pub svg: Option<PathBuf>,

    /// Print per-stage wall-clock timings to stdout
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Scene configuration JSON
    #[arg(long)]
    pub config: PathBuf,

    /// Directory for calibration.json, keypoints_<camera>.json and
    /// ground_truth.json (created if missing)
    #[arg(long)]
    pub output_dir: PathBuf,

    /// Noise and occlusion seed; same config and seed give identical files
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Print per-stage wall-clock timings to stdout
    #[arg(long)]
    pub timings: bool,
}
