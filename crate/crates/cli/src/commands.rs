use std::path::{Path, PathBuf};
use std::time::Instant;

use chunkstyle::assets;
use chunkstyle::bench::{run_bench, BenchConfig, BenchReport, REFERENCE_MP_PER_S};
use chunkstyle::{
    animate, label_chunks, synthesize, Backend, ChunkStats, Exemplar, GuideField, HierarchyParams,
    Raster, Resolve, Synthesis, SynthesisParams,
};
use serde::Serialize;

use crate::args::{AnimateArgs, BackendArg, BenchArgs, BlitArgs, ResolveArg, SynthArgs};
use crate::error::{CliError, CliResult};
use crate::guides::{check_kinds, compose, load_part, load_stack};
use crate::png_io::{read_u8, write_coords, write_u8};

const MAX_THRESHOLD: f32 = 4.0;

/// Statistics report of one synthesized frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub chunk_count: usize,
    pub mean_chunk_area_px: f64,
    pub miss_rate: f64,
    pub level_histogram: Vec<usize>,
    pub wall_ms: f64,
    pub mp_per_s: f64,
}

impl Stats {
    fn new(
        out: &Synthesis,
        target: &GuideField<f32>,
        levels: u32,
        seconds: f64,
    ) -> CliResult<Self> {
        let s = ChunkStats::compute(&out.coords, levels, target.mask())?;
        Ok(Self {
            chunk_count: s.chunk_count,
            mean_chunk_area_px: s.mean_chunk_area_px,
            miss_rate: s.miss_rate,
            level_histogram: s.level_histogram,
            wall_ms: seconds * 1e3,
            mp_per_s: out.coords.len() as f64 / 1e6 / seconds.max(1e-9),
        })
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::config("--threads must be positive"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::runtime(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn params(
    args: &SynthArgs,
    exemplar: &GuideField<f32>,
    default_resolve: Resolve,
) -> CliResult<SynthesisParams<f32>> {
    if !(0.0..=MAX_THRESHOLD).contains(&args.threshold) {
        return Err(CliError::config(format!(
            "--threshold must be in [0, {MAX_THRESHOLD}], got {}",
            args.threshold
        )));
    }
    let (w, h) = exemplar.dimensions();
    let levels = args
        .levels
        .unwrap_or_else(|| HierarchyParams::for_exemplar(w, h).levels);
    let backend = match args.backend {
        BackendArg::Auto => match Backend::for_guide(exemplar) {
            Backend::Table { .. } => Backend::Table {
                resolution: args.table_resolution,
            },
            exact => exact,
        },
        BackendArg::Table => Backend::Table {
            resolution: args.table_resolution,
        },
        BackendArg::Exact => Backend::Exact,
    };
    let resolve = match args.resolve {
        Some(ResolveArg::Blit) => Resolve::Blit,
        Some(ResolveArg::Vote) => Resolve::Vote,
        None => default_resolve,
    };
    Ok(SynthesisParams::default()
        .with_threshold(args.threshold)
        .with_hierarchy(HierarchyParams::new(levels, args.spacing))
        .with_seed(args.seed)
        .with_resolve(resolve)
        .with_patch_radius(args.patch_radius)
        .with_backend(backend))
}

fn require_style(args: &SynthArgs) -> CliResult<&Path> {
    args.style
        .as_deref()
        .ok_or_else(|| CliError::config("--style is required"))
}

fn load_exemplar(args: &SynthArgs) -> CliResult<(Raster<u8>, GuideField<f32>)> {
    let style = read_u8(require_style(args)?)?;
    let source = load_stack(&args.source_guides, &args.weights, "source")?;
    if style.dimensions() != source.dimensions() {
        return Err(CliError::config(format!(
            "style is {:?} but source guides are {:?}",
            style.dimensions(),
            source.dimensions()
        )));
    }
    Ok((style, source))
}

fn write_json(value: &impl Serialize, path: &Path) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::runtime(e.to_string()))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

pub fn blit(args: &BlitArgs) -> CliResult<()> {
    check_kinds(&args.synth.source_guides, &args.synth.target_guides)?;
    let (style, source) = load_exemplar(&args.synth)?;
    let target = load_stack(&args.synth.target_guides, &args.synth.weights, "target")?;
    let params = params(&args.synth, &source, Resolve::Vote)?;
    let (out, seconds) = with_pool(args.threads, || -> CliResult<_> {
        let exemplar = Exemplar::new(style, source, params.backend)?;
        let start = Instant::now();
        let out = synthesize(&exemplar, &target, &params)?;
        Ok((out, start.elapsed().as_secs_f64()))
    })??;
    write_u8(&out.image, &args.out)?;
    if let Some(path) = &args.coords_out {
        write_coords(&out.coords, path)?;
    }
    if let Some(path) = &args.chunks_out {
        write_u8(&label_chunks(&out.coords, target.mask())?.to_rgb(), path)?;
    }
    let stats = Stats::new(&out, &target, params.hierarchy.levels, seconds)?;
    if let Some(path) = &args.stats_json {
        write_json(&stats, path)?;
    }
    eprintln!(
        "{}: {} chunks, mean area {:.1} px, miss rate {:.4}, {:.1} ms",
        args.out.display(),
        stats.chunk_count,
        stats.mean_chunk_area_px,
        stats.miss_rate,
        stats.wall_ms
    );
    Ok(())
}

/// Replaces the last run of `#` in `pattern` with `index`, zero-padded to
/// the run length. `None` when the pattern has no `#`.
pub fn frame_path(pattern: &Path, index: usize) -> Option<PathBuf> {
    let s = pattern.to_str()?;
    let end = s.rfind('#')? + 1;
    let start = s[..end].trim_end_matches('#').len();
    let width = end - start;
    Some(PathBuf::from(format!(
        "{}{:0width$}{}",
        &s[..start],
        index,
        &s[end..]
    )))
}

#[derive(Debug, Serialize)]
struct AnimateStats {
    frames: Vec<Stats>,
    /// Mean absolute difference per channel value between consecutive frames.
    flicker: f64,
    wall_ms: f64,
    mp_per_s: f64,
}

fn flicker(frames: &[Synthesis]) -> f64 {
    if frames.len() < 2 {
        return 0.0;
    }
    let total: u64 = frames
        .windows(2)
        .map(|w| {
            w[0].image
                .data()
                .iter()
                .zip(w[1].image.data())
                .map(|(&a, &b)| a.abs_diff(b) as u64)
                .sum::<u64>()
        })
        .sum();
    total as f64 / ((frames.len() - 1) * frames[0].image.data().len()) as f64
}

pub fn animate_cmd(args: &AnimateArgs) -> CliResult<()> {
    if args.frames == 0 {
        return Err(CliError::config("--frames must be positive"));
    }
    for (flag, pattern) in [
        ("--out", Some(&args.out)),
        ("--coords-out", args.coords_out.as_ref()),
    ] {
        if let Some(p) = pattern.filter(|p| frame_path(p, 0).is_none()) {
            return Err(CliError::config(format!(
                "{flag} {} must contain a run of '#' for the frame index",
                p.display()
            )));
        }
    }
    check_kinds(&args.synth.source_guides, &args.synth.target_guides)?;
    let (style, source) = load_exemplar(&args.synth)?;
    let params = params(&args.synth, &source, Resolve::Vote)?;
    let indices: Vec<usize> = (args.first_frame..args.first_frame + args.frames).collect();
    let targets = indices
        .iter()
        .map(|&i| {
            let parts = args
                .synth
                .target_guides
                .iter()
                .map(|g| {
                    load_part(
                        g.kind,
                        &frame_path(&g.path, i).unwrap_or_else(|| g.path.clone()),
                        &args.synth.weights,
                    )
                })
                .collect::<CliResult<Vec<_>>>()?;
            compose(parts, "target")
        })
        .collect::<CliResult<Vec<_>>>()?;
    let (outs, seconds) = with_pool(args.threads, || -> CliResult<_> {
        let exemplar = Exemplar::new(style, source, params.backend)?;
        let start = Instant::now();
        let outs = animate(&exemplar, &targets, &params, !args.no_reseed)?;
        Ok((outs, start.elapsed().as_secs_f64()))
    })??;
    let mut frames = Vec::with_capacity(outs.len());
    for ((out, target), &i) in outs.iter().zip(&targets).zip(&indices) {
        write_u8(
            &out.image,
            &frame_path(&args.out, i).expect("checked above"),
        )?;
        if let Some(pattern) = &args.coords_out {
            write_coords(&out.coords, &frame_path(pattern, i).expect("checked above"))?;
        }
        frames.push(Stats::new(
            out,
            target,
            params.hierarchy.levels,
            seconds / outs.len() as f64,
        )?);
    }
    let pixels: usize = outs.iter().map(|o| o.coords.len()).sum();
    let stats = AnimateStats {
        frames,
        flicker: flicker(&outs),
        wall_ms: seconds * 1e3,
        mp_per_s: pixels as f64 / 1e6 / seconds.max(1e-9),
    };
    if let Some(path) = &args.stats_json {
        write_json(&stats, path)?;
    }
    eprintln!(
        "{} frames, flicker {:.3}, {:.1} ms",
        outs.len(),
        stats.flicker,
        stats.wall_ms
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct BenchRunJson {
    threads: usize,
    iterations: usize,
    kernel_ms: f64,
    resolve_ms: f64,
    frame_ms: f64,
    mp_per_s: f64,
    checksum: String,
}

#[derive(Debug, Serialize)]
struct BenchJson {
    scenario: String,
    width: usize,
    height: usize,
    resolve: &'static str,
    backend: String,
    lookup_build_ms: f64,
    /// Aspirational single-core figure: a one-megapixel frame at 10 fps.
    reference_mp_per_s: f64,
    available_cores: usize,
    runs: Vec<BenchRunJson>,
    checksums_agree: bool,
}

impl BenchJson {
    fn new(scenario: String, params: &SynthesisParams<f32>, report: BenchReport) -> Self {
        Self {
            scenario,
            width: report.width,
            height: report.height,
            resolve: match params.resolve {
                Resolve::Blit => "blit",
                Resolve::Vote => "vote",
            },
            backend: format!("{:?}", params.backend),
            lookup_build_ms: report.lookup_build_ms,
            reference_mp_per_s: REFERENCE_MP_PER_S,
            available_cores: std::thread::available_parallelism().map_or(1, |n| n.get()),
            checksums_agree: report.checksums_agree(),
            runs: report
                .runs
                .into_iter()
                .map(|r| BenchRunJson {
                    threads: r.threads,
                    iterations: r.iterations,
                    kernel_ms: r.kernel_ms,
                    resolve_ms: r.resolve_ms,
                    frame_ms: r.frame_ms,
                    mp_per_s: r.mp_per_s,
                    checksum: format!("{:016x}", r.checksum),
                })
                .collect(),
        }
    }
}

pub fn bench(args: &BenchArgs) -> CliResult<()> {
    if args.iterations == 0 {
        return Err(CliError::config("--iterations must be at least 1"));
    }
    if args.threads.is_empty() || args.threads.contains(&0) {
        return Err(CliError::config(
            "--threads must list positive worker counts",
        ));
    }
    let (scenario, style, source, target) = if args.synth.style.is_some() {
        check_kinds(&args.synth.source_guides, &args.synth.target_guides)?;
        let (style, source) = load_exemplar(&args.synth)?;
        let target = load_stack(&args.synth.target_guides, &args.synth.weights, "target")?;
        ("files".to_string(), style, source, target)
    } else {
        if !args.synth.source_guides.is_empty() || !args.synth.target_guides.is_empty() {
            return Err(CliError::config("guides given without --style"));
        }
        if args.size < 16 {
            return Err(CliError::config("--size must be at least 16"));
        }
        let ex = assets::lit_sphere::<f32>(256);
        let scenario = format!("lit sphere 256x256 -> torus normals {0}x{0}", args.size);
        (
            scenario,
            ex.style,
            ex.guide,
            assets::torus_target(args.size),
        )
    };
    let params = params(&args.synth, &source, Resolve::Blit)?;
    let config = BenchConfig {
        warmup: args.warmup,
        iterations: args.iterations,
        threads: args.threads.clone(),
    };
    let report = run_bench(&style, &source, &target, &params, &config)?;
    let json = BenchJson::new(scenario, &params, report);
    let text = serde_json::to_string_pretty(&json).map_err(|e| CliError::runtime(e.to_string()))?;
    println!("{text}");
    if let Some(path) = &args.stats_json {
        write_json(&json, path)?;
    }
    if !json.checksums_agree {
        return Err(CliError::runtime("outputs differ between worker counts"));
    }
    Ok(())
}
