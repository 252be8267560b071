use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::guides::{GuideSpec, WeightSpec};

#[derive(Debug, Parser)]
#[command(
    name = "chunkstyle",
    version,
    about = "Guided example-based style transfer by chunk copying"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stylize one target.
    Blit(BlitArgs),
    /// Stylize a sequence of target frames.
    Animate(AnimateArgs),
    /// Measure throughput on a fixed scenario.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResolveArg {
    Blit,
    Vote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    /// Table for two weighted guide channels, exact search otherwise.
    Auto,
    Table,
    Exact,
}

/// Guides and synthesis parameters shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Style exemplar PNG.
    #[arg(long, value_name = "PATH")]
    pub style: Option<PathBuf>,
    /// Source guide aligned with the style, as KIND=PATH with KIND one of
    /// normal, uv, displacement, segmentation, appearance. Repeatable.
    #[arg(long = "source-guide", value_name = "KIND=PATH")]
    pub source_guides: Vec<GuideSpec>,
    /// Target guide, same kinds in the same order as the source guides.
    #[arg(long = "target-guide", value_name = "KIND=PATH")]
    pub target_guides: Vec<GuideSpec>,
    /// Channel weight for a guide kind, as KIND=WEIGHT. Defaults to 1.
    #[arg(long = "weight", value_name = "KIND=WEIGHT")]
    pub weights: Vec<WeightSpec>,
    /// Guidance error bound in normalized guide units, in [0, 4].
    #[arg(long, default_value_t = chunkstyle::DEFAULT_THRESHOLD as f32)]
    pub threshold: f32,
    /// Number of seed levels [default: derived from the exemplar size].
    #[arg(long)]
    pub levels: Option<u32>,
    /// Seed spacing of the finest level in pixels; doubles per level.
    #[arg(long, default_value_t = 4)]
    pub spacing: u32,
    /// Jitter seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Color resolution [default: vote; blit for bench].
    #[arg(long, value_enum)]
    pub resolve: Option<ResolveArg>,
    /// Patch radius for voting.
    #[arg(long = "patch-radius", default_value_t = chunkstyle::DEFAULT_PATCH_RADIUS)]
    pub patch_radius: u32,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
    /// Bins per axis of the lookup table.
    #[arg(long = "table-resolution", default_value_t = chunkstyle::DEFAULT_TABLE_RESOLUTION)]
    pub table_resolution: usize,
}

#[derive(Debug, Args)]
pub struct BlitArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output PNG.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Write a JSON statistics report.
    #[arg(long = "stats-json", value_name = "PATH")]
    pub stats_json: Option<PathBuf>,
    /// Write the coordinate field as a 16-bit PNG.
    #[arg(long = "coords-out", value_name = "PATH")]
    pub coords_out: Option<PathBuf>,
    /// Write a chunk visualization, one flat color per chunk.
    #[arg(long = "chunks-out", value_name = "PATH")]
    pub chunks_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnimateArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Number of frames. Target guide paths containing a run of '#' are
    /// expanded with the zero-padded frame index; other paths are static.
    #[arg(long)]
    pub frames: usize,
    /// Index of the first frame.
    #[arg(long = "first-frame", default_value_t = 0)]
    pub first_frame: usize,
    /// Output pattern; must contain a run of '#'.
    #[arg(long, value_name = "PATTERN")]
    pub out: PathBuf,
    /// Use the same jitter for every frame (no flicker).
    #[arg(long = "no-reseed")]
    pub no_reseed: bool,
    /// Coordinate-field output pattern; must contain a run of '#'.
    #[arg(long = "coords-out", value_name = "PATTERN")]
    pub coords_out: Option<PathBuf>,
    #[arg(long = "stats-json", value_name = "PATH")]
    pub stats_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Guides and style; when no style is given the built-in normal-guided
    /// scenario is used.
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Target size of the built-in scenario.
    #[arg(long, default_value_t = 1024)]
    pub size: usize,
    #[arg(long, default_value_t = 2)]
    pub warmup: usize,
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    /// Comma-separated worker counts to measure.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 8])]
    pub threads: Vec<usize>,
    /// Also write the JSON report to a file.
    #[arg(long = "stats-json", value_name = "PATH")]
    pub stats_json: Option<PathBuf>,
}
