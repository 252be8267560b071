//! Throughput measurement for the parallel synthesizer.
//!
//! The exemplar lookup is built once and timed separately: it is fixed
//! across frames, so it is not part of the per-frame cost.

use std::time::Instant;

use crate::guidance::GuideField;
use crate::raster::Raster;
use crate::synth::{resolve_colors, synthesize_coords, CoordField, Exemplar, SynthesisParams};
use crate::{Error, Result, Scalar};

/// Reference throughput for one-megapixel frames at 10 frames per second on
/// a single CPU core.
pub const REFERENCE_MP_PER_S: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub warmup: usize,
    pub iterations: usize,
    /// Worker counts to measure, each in its own thread pool.
    pub threads: Vec<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            warmup: 2,
            iterations: 10,
            threads: vec![1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub threads: usize,
    pub iterations: usize,
    /// Mean milliseconds per frame spent computing the coordinate field.
    pub kernel_ms: f64,
    /// Mean milliseconds per frame spent resolving colors.
    pub resolve_ms: f64,
    pub frame_ms: f64,
    pub mp_per_s: f64,
    /// FNV-1a hash of the last output image and coordinate field.
    pub checksum: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub width: usize,
    pub height: usize,
    pub lookup_build_ms: f64,
    pub runs: Vec<BenchRun>,
}

impl BenchReport {
    pub fn checksums_agree(&self) -> bool {
        self.runs.windows(2).all(|w| w[0].checksum == w[1].checksum)
    }
}

pub fn run_bench<S: Scalar>(
    style: &Raster<u8>,
    source: &GuideField<S>,
    target: &GuideField<S>,
    params: &SynthesisParams<S>,
    config: &BenchConfig,
) -> Result<BenchReport> {
    if config.iterations == 0 {
        return Err(Error::InvalidParams(
            "bench needs at least one measured iteration".into(),
        ));
    }
    if config.threads.is_empty() || config.threads.contains(&0) {
        return Err(Error::InvalidParams(
            "bench thread counts must be positive".into(),
        ));
    }
    let start = Instant::now();
    let exemplar = Exemplar::new(style.clone(), source.clone(), params.backend)?;
    let lookup_build_ms = start.elapsed().as_secs_f64() * 1e3;

    let (w, h) = target.dimensions();
    let mut runs = Vec::new();
    for &threads in &config.threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidParams(format!("cannot build thread pool: {e}")))?;
        let run = pool.install(|| -> Result<BenchRun> {
            for _ in 0..config.warmup {
                let cf = synthesize_coords(&exemplar, target, params)?;
                resolve_colors(&cf, exemplar.style(), params.resolve, params.patch_radius)?;
            }
            let (mut kernel, mut resolve) = (0.0, 0.0);
            let mut last = None;
            for _ in 0..config.iterations {
                let t0 = Instant::now();
                let cf = synthesize_coords(&exemplar, target, params)?;
                let t1 = Instant::now();
                let img =
                    resolve_colors(&cf, exemplar.style(), params.resolve, params.patch_radius)?;
                let t2 = Instant::now();
                kernel += (t1 - t0).as_secs_f64();
                resolve += (t2 - t1).as_secs_f64();
                last = Some((img, cf));
            }
            let n = config.iterations as f64;
            let frame_s = (kernel + resolve) / n;
            let (img, cf) = last.expect("at least one iteration");
            Ok(BenchRun {
                threads,
                iterations: config.iterations,
                kernel_ms: kernel / n * 1e3,
                resolve_ms: resolve / n * 1e3,
                frame_ms: frame_s * 1e3,
                mp_per_s: (w * h) as f64 / 1e6 / frame_s,
                checksum: checksum(&img, &cf),
            })
        })?;
        runs.push(run);
    }
    Ok(BenchReport {
        width: w,
        height: h,
        lookup_build_ms,
        runs,
    })
}

/// FNV-1a over the image bytes and the coordinate field.
pub fn checksum(image: &Raster<u8>, coords: &CoordField) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    image.data().iter().for_each(|&b| feed(b));
    for e in coords.entries() {
        e.src.x.to_le_bytes().into_iter().for_each(&mut feed);
        e.src.y.to_le_bytes().into_iter().for_each(&mut feed);
        feed(e.level);
        feed(e.miss as u8);
    }
    h
}
