use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lidomaug", version, about = "Build LiDAR world models and render augmented frames")]
pub struct Cli {
    /// More diagnostics on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate a sequence into cached world models.
    BuildWorld(BuildWorldArgs),
    /// Render a cached world with a fixed sensor and pose.
    Render(RenderArgs),
    /// Render, then apply motion distortion.
    Distort(DistortArgs),
    /// Render several worlds and mix them by azimuth sector.
    Mix(MixArgs),
    /// Run the seeded augmentation pipeline.
    Augment(AugmentArgs),
    /// Time the augmentation pipeline.
    Bench(BenchArgs),
    /// Describe a cache, scan, label, PLY, PNG or spec file.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DynamicArg {
    /// Aggregate moving classes like the static scene.
    AsStatic,
    /// Take moving classes only from temporally close frames.
    Window,
}

#[derive(Debug, Args)]
pub struct BuildWorldArgs {
    /// Sequence directory (poses.txt, velodyne/, labels/).
    #[arg(long)]
    pub sequence: PathBuf,
    /// Output cache file, or directory when --stride is given.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Reference frame.
    #[arg(long, default_value_t = 0)]
    pub frame: usize,
    /// Build one world every STRIDE frames instead of a single one.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Frames aggregated per world.
    #[arg(long, default_value_t = lidomaug::world::DEFAULT_AGGREGATION_COUNT)]
    pub aggregate: usize,
    /// Handling of moving classes when no tracks are given.
    #[arg(long, value_enum, default_value = "as-static")]
    pub dynamic: DynamicArg,
    /// Half-window in frames for `--dynamic window`.
    #[arg(long, default_value_t = lidomaug::world::DEFAULT_DYNAMIC_WINDOW)]
    pub window: usize,
    /// Box tracks of moving objects (overrides --dynamic).
    #[arg(long)]
    pub dynamic_tracks: Option<PathBuf>,
    /// Skip voxel label voting.
    #[arg(long)]
    pub no_vote: bool,
}

#[derive(Debug, Args)]
pub struct SensorArgs {
    /// Sensor preset: V64, V32, V16, O64, O128.
    #[arg(long, default_value = "V64")]
    pub preset: String,
    /// Sensor description file (overrides --preset).
    #[arg(long)]
    pub sensor: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PoseArgs {
    /// Yaw of the augmentation pose, radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub yaw: f64,
    /// Translation of the augmentation pose, `x,y,z` meters.
    #[arg(long, default_value = "0,0,0", allow_hyphen_values = true)]
    pub translate: String,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    pub out_dir: PathBuf,
    /// File name stem of the outputs.
    #[arg(long, default_value = "frame")]
    pub prefix: String,
    /// Also write a PLY point cloud.
    #[arg(long)]
    pub ply: bool,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub world: PathBuf,
    #[command(flatten)]
    pub sensor: SensorArgs,
    #[command(flatten)]
    pub pose: PoseArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OrderArg {
    ResampleFirst,
    TravelFirst,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DepthArg {
    Translate,
    RangeAdd,
}

#[derive(Debug, Args)]
pub struct DistortArgs {
    #[command(flatten)]
    pub render: RenderArgs,
    /// Forward speed, km/h.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub speed_kmh: f64,
    /// Platform yaw rate, rad/s.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub yaw_rate: f64,
    #[arg(long, value_enum)]
    pub distortion_order: Option<OrderArg>,
    #[arg(long, value_enum)]
    pub depth_mode: Option<DepthArg>,
}

#[derive(Debug, Args)]
pub struct MixArgs {
    /// World caches; map i comes from the i-th world.
    #[arg(long = "world", required = true)]
    pub worlds: Vec<PathBuf>,
    #[command(flatten)]
    pub sensor: SensorArgs,
    /// Sector boundaries as comma-separated scan angles in radians
    /// (n−1 values for n worlds); random when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub cuts: Option<String>,
    /// Seed for random cuts.
    #[arg(long)]
    pub seed: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Flags mirroring the augmentation spec; each overrides the config file.
#[derive(Debug, Args, Default)]
pub struct SpecArgs {
    /// Spec file in the key = value grammar.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed (decimal or 0x hex); overrides LIDOMAUG_SEED.
    #[arg(long)]
    pub seed: Option<String>,
    /// Preset whose range and spin rate sampled sensors inherit; with
    /// --no-random-config the preset is used as is.
    #[arg(long)]
    pub preset: Option<String>,
    /// Sensor description file used with --no-random-config.
    #[arg(long)]
    pub sensor: Option<PathBuf>,
    /// Use the preset or sensor file instead of sampling a sensor.
    #[arg(long)]
    pub no_random_config: bool,
    /// Fixed sensor, identity pose, no motion and a single world.
    #[arg(long)]
    pub identity: bool,
    #[arg(long)]
    pub widths: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub channels: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub f_up: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub f_down: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub yaw: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tx: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub ty: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tz: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub speed_kmh: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub yaw_rate: Option<String>,
    #[arg(long)]
    pub n_mix: Option<usize>,
    #[arg(long, value_enum)]
    pub distortion_order: Option<OrderArg>,
    #[arg(long, value_enum)]
    pub depth_mode: Option<DepthArg>,
    /// Render workers per frame.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// World caches; reused in turn when fewer than n_mix are given.
    #[arg(long = "world", required = true)]
    pub worlds: Vec<PathBuf>,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Frames to generate; frame i uses seed + i.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Write the effective spec next to the outputs.
    #[arg(long)]
    pub save_spec: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// World caches; without one a synthetic world is generated.
    #[arg(long = "world")]
    pub worlds: Vec<PathBuf>,
    /// Points of the synthetic world.
    #[arg(long, default_value_t = 1_000_000)]
    pub synthetic_points: usize,
    /// Timed iterations.
    #[arg(long, short = 'k', default_value_t = 50)]
    pub iterations: usize,
    /// Untimed warm-up iterations.
    #[arg(long, default_value_t = 3)]
    pub warmup: usize,
    /// Sample sensors instead of the fixed bench target.
    #[arg(long)]
    pub random_config: bool,
    #[command(flatten)]
    pub spec: SpecArgs,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    pub path: PathBuf,
}
