//! Chunk diagnostics over a coordinate field.
//!
//! A chunk is a maximal 4-connected region of target pixels sharing one
//! offset `src - p`, i.e. a translated copy of an exemplar region.

use petgraph::unionfind::UnionFind;

use crate::guidance::GuideField;
use crate::raster::{guide_distance, PixelCoord, Raster};
use crate::seeds::mix64;
use crate::synth::CoordField;
use crate::{Error, Result, Scalar};

/// Label value for pixels excluded from labeling.
pub const NO_CHUNK: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkLabels {
    pub width: usize,
    pub height: usize,
    /// Row-major chunk id per pixel, numbered in order of first appearance;
    /// [`NO_CHUNK`] for excluded pixels.
    pub labels: Vec<u32>,
    pub areas: Vec<usize>,
}

impl ChunkLabels {
    pub fn count(&self) -> usize {
        self.areas.len()
    }

    pub fn mean_area(&self) -> f64 {
        if self.areas.is_empty() {
            0.0
        } else {
            self.areas.iter().sum::<usize>() as f64 / self.areas.len() as f64
        }
    }

    /// One pseudo-random color per chunk; excluded pixels are black.
    pub fn to_rgb(&self) -> Raster<u8> {
        let data = self
            .labels
            .iter()
            .flat_map(|&l| {
                if l == NO_CHUNK {
                    [0, 0, 0]
                } else {
                    let h = mix64(l as u64 ^ 0x243F_6A88_85A3_08D3).to_le_bytes();
                    // keep colors away from black
                    [h[0] | 0x20, h[1] | 0x20, h[2] | 0x20]
                }
            })
            .collect();
        Raster::new(self.width, self.height, 3, data).expect("label shape")
    }
}

/// Labels chunks of `cf`. Pixels outside `mask` (when given) belong to no
/// chunk.
pub fn label_chunks(cf: &CoordField, mask: Option<&Raster<bool>>) -> Result<ChunkLabels> {
    let (w, h) = cf.dimensions();
    if let Some(m) = mask {
        if m.dimensions() != (w, h) {
            return Err(Error::DimensionMismatch {
                expected: (w, h),
                actual: m.dimensions(),
            });
        }
    }
    let included = |i: usize| mask.is_none_or(|m| m.data()[i]);
    let mut uf = UnionFind::<usize>::new(w * h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !included(i) {
                continue;
            }
            let off = cf.offset(i);
            if x + 1 < w && included(i + 1) && cf.offset(i + 1) == off {
                uf.union(i, i + 1);
            }
            if y + 1 < h && included(i + w) && cf.offset(i + w) == off {
                uf.union(i, i + w);
            }
        }
    }
    let mut root_label = vec![NO_CHUNK; w * h];
    let mut labels = vec![NO_CHUNK; w * h];
    let mut areas = Vec::new();
    for i in 0..w * h {
        if !included(i) {
            continue;
        }
        let root = uf.find(i);
        if root_label[root] == NO_CHUNK {
            root_label[root] = areas.len() as u32;
            areas.push(0);
        }
        labels[i] = root_label[root];
        areas[labels[i] as usize] += 1;
    }
    Ok(ChunkLabels {
        width: w,
        height: h,
        labels,
        areas,
    })
}

/// Aggregate statistics of one synthesis result.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkStats {
    pub chunk_count: usize,
    pub mean_chunk_area_px: f64,
    pub miss_rate: f64,
    /// Pixel count per level, index 0 being the fallback.
    pub level_histogram: Vec<usize>,
    /// Largest number of distinct chunks that copy the same source pixel.
    /// High values indicate visible repetition.
    pub max_chunks_per_source_pixel: usize,
}

impl ChunkStats {
    pub fn compute(cf: &CoordField, levels: u32, mask: Option<&Raster<bool>>) -> Result<Self> {
        let chunks = label_chunks(cf, mask)?;
        let mut level_histogram = vec![0usize; levels as usize + 1];
        let mut counted = 0usize;
        let mut misses = 0usize;
        let mut uses: Vec<(PixelCoord, u32)> = Vec::new();
        for (i, e) in cf.entries().iter().enumerate() {
            if chunks.labels[i] == NO_CHUNK {
                continue;
            }
            counted += 1;
            misses += e.miss as usize;
            let lvl = (e.level as usize).min(levels as usize);
            level_histogram[lvl] += 1;
            uses.push((e.src, chunks.labels[i]));
        }
        uses.sort_unstable();
        uses.dedup();
        let mut max_reuse = 0;
        let mut run = 0;
        for (k, u) in uses.iter().enumerate() {
            run = if k > 0 && uses[k - 1].0 == u.0 {
                run + 1
            } else {
                1
            };
            max_reuse = max_reuse.max(run);
        }
        Ok(Self {
            chunk_count: chunks.count(),
            mean_chunk_area_px: chunks.mean_area(),
            miss_rate: if counted == 0 {
                0.0
            } else {
                misses as f64 / counted as f64
            },
            level_histogram,
            max_chunks_per_source_pixel: max_reuse,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorBoundReport {
    /// Non-miss pixels checked.
    pub checked: usize,
    pub violations: Vec<PixelCoord>,
    /// Largest guidance error among checked pixels.
    pub max_error: f64,
}

impl ErrorBoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recomputes the guidance error of every non-miss pixel from the guides
/// alone and reports pixels whose error is not strictly below `threshold`.
/// Out-of-bounds or masked-out sources count as violations.
pub fn verify_error_bound<S: Scalar>(
    cf: &CoordField,
    source: &GuideField<S>,
    target: &GuideField<S>,
    threshold: S,
) -> Result<ErrorBoundReport> {
    if cf.dimensions() != target.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: target.dimensions(),
            actual: cf.dimensions(),
        });
    }
    let mut report = ErrorBoundReport {
        checked: 0,
        violations: Vec::new(),
        max_error: 0.0,
    };
    for (i, e) in cf.entries().iter().enumerate() {
        if e.miss {
            continue;
        }
        report.checked += 1;
        let p = cf.coord(i);
        let ok_src =
            source.raster().contains(e.src) && source.is_masked_in(source.raster().index(e.src));
        if !ok_src {
            report.violations.push(p);
            continue;
        }
        let err = guide_distance(&target.sample(p), &source.sample(e.src), source.weights())?;
        report.max_error = report.max_error.max(err.to_f64().unwrap_or(f64::INFINITY));
        if !(err < threshold) {
            report.violations.push(p);
        }
    }
    Ok(report)
}
