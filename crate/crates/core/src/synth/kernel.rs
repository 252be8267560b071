//! Per-pixel parallel synthesis over the seed hierarchy.

use rayon::prelude::*;

use super::{resolve_colors, CoordEntry, CoordField, Exemplar, Synthesis, SynthesisParams};
use crate::guidance::GuideField;
use crate::raster::{labels_conflict, weighted_l2, PixelCoord};
use crate::seeds::{nearest_seed, seed_of_cell, Jitter, JitterTable};
use crate::{Result, Scalar};

/// Assigns a source coordinate to target pixel `p`.
///
/// Levels are tried from the top down. At each level the nearest seed `q` is
/// matched to the exemplar through its own guide value, and `p` takes the
/// source pixel at the same offset from that match; the first level whose
/// guidance error at `p` is below the threshold wins. Seeds that fall
/// outside the target are clamped to its edge. If no level succeeds the
/// pixel falls back to a direct lookup of its own guide value.
#[inline]
pub fn blit_pixel<S: Scalar, J: Jitter + ?Sized>(
    p: PixelCoord,
    target: &GuideField<S>,
    exemplar: &Exemplar<S>,
    params: &SynthesisParams<S>,
    jitter: &J,
) -> CoordEntry {
    let source = exemplar.guide();
    let lookup = exemplar.lookup();
    let weights = source.weights();
    let traster = target.raster();
    let pi = traster.index(p);
    let gp = target.values_at(pi);
    let lp = target.label_at(pi);

    for level in (1..=params.hierarchy.levels).rev() {
        let q = traster.clamp(nearest_seed(
            p,
            params.hierarchy.spacing(level),
            level,
            jitter,
        ));
        let qi = traster.index(q);
        let Some(u) = lookup.nearest(target.values_at(qi), target.label_at(qi)) else {
            continue;
        };
        let c = u + (p - q);
        if !source.raster().contains(c) {
            continue;
        }
        let ci = source.raster().index(c);
        if !source.is_masked_in(ci) || labels_conflict(lp, source.label_at(ci)) {
            continue;
        }
        if weighted_l2(gp, source.values_at(ci), weights) < params.threshold {
            return CoordEntry {
                src: c,
                level: level as u8,
                miss: false,
            };
        }
    }
    CoordEntry {
        src: lookup
            .nearest(gp, lp)
            .unwrap_or_else(|| lookup.nearest_any(gp)),
        level: 0,
        miss: true,
    }
}

/// Coordinate field for a target guide. Runs on the current rayon pool; the
/// result does not depend on the number of workers.
pub fn synthesize_coords<S: Scalar>(
    exemplar: &Exemplar<S>,
    target: &GuideField<S>,
    params: &SynthesisParams<S>,
) -> Result<CoordField> {
    synthesize_coords_observed(exemplar, target, params, &|_| {})
}

/// As [`synthesize_coords`], calling `visit` once for every pixel processed.
pub fn synthesize_coords_observed<S: Scalar>(
    exemplar: &Exemplar<S>,
    target: &GuideField<S>,
    params: &SynthesisParams<S>,
    visit: &(dyn Fn(PixelCoord) + Sync),
) -> Result<CoordField> {
    exemplar.check_target(target)?;
    let (w, h) = target.dimensions();
    params.validate(w, h)?;
    let jitter = JitterTable::new(params.rng_seed);
    let plans: Vec<LevelPlan> = (1..=params.hierarchy.levels)
        .rev()
        .map(|level| {
            LevelPlan::new(
                level,
                params.hierarchy.spacing(level),
                target,
                exemplar,
                &jitter,
            )
        })
        .collect();
    let mut entries = vec![CoordEntry::default(); w * h];
    entries.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, slot) in row.iter_mut().enumerate() {
            let p = PixelCoord::new(x as i32, y as i32);
            visit(p);
            *slot = planned_pixel(p, target, exemplar, params, &plans);
        }
    });
    CoordField::new(w, h, entries)
}

/// Seeds of one level, precomputed for a whole frame: every cell that can
/// be a neighbour of a target pixel, with its seed position and the offset
/// `u - q` from the clamped seed to its exemplar match. Only the cell
/// indexing differs from [`blit_pixel`]; results are identical.
struct LevelPlan {
    level: u32,
    h: i32,
    /// Cells span `-1..=cols-2` horizontally and `-1..=rows-2` vertically.
    cols: usize,
    seeds: Vec<PixelCoord>,
    /// `None` when the seed's label has no match in the exemplar.
    shifts: Vec<Option<PixelCoord>>,
}

impl LevelPlan {
    fn new<S: Scalar>(
        level: u32,
        h: u32,
        target: &GuideField<S>,
        exemplar: &Exemplar<S>,
        jitter: &JitterTable,
    ) -> Self {
        let (w, ht) = target.dimensions();
        let hi = h as i32;
        let cols = (w - 1) / h as usize + 3;
        let rows = (ht - 1) / h as usize + 3;
        let traster = target.raster();
        let lookup = exemplar.lookup();
        let cells: Vec<(PixelCoord, Option<PixelCoord>)> = (0..cols * rows)
            .into_par_iter()
            .map(|i| {
                let cell = PixelCoord::new((i % cols) as i32 - 1, (i / cols) as i32 - 1);
                let s = seed_of_cell(cell, hi, level, jitter);
                let q = traster.clamp(s);
                let qi = traster.index(q);
                let shift = lookup
                    .nearest(target.values_at(qi), target.label_at(qi))
                    .map(|u| u - q);
                (s, shift)
            })
            .collect();
        let (seeds, shifts) = cells.into_iter().unzip();
        Self {
            level,
            h: hi,
            cols,
            seeds,
            shifts,
        }
    }

    /// Index of the seed nearest to `p`, scanning cells in the same order
    /// as [`nearest_seed`].
    #[inline]
    fn nearest(&self, p: PixelCoord) -> usize {
        // p is inside the target, so its cell is non-negative
        let bx = (p.x / self.h) as usize;
        let by = (p.y / self.h) as usize;
        let mut best = 0;
        let mut best_d = i64::MAX;
        for cx in bx..bx + 3 {
            for cy in by..by + 3 {
                let i = cy * self.cols + cx;
                let d = (self.seeds[i] - p).norm_sq();
                if d < best_d {
                    best = i;
                    best_d = d;
                }
            }
        }
        best
    }
}

#[inline]
fn planned_pixel<S: Scalar>(
    p: PixelCoord,
    target: &GuideField<S>,
    exemplar: &Exemplar<S>,
    params: &SynthesisParams<S>,
    plans: &[LevelPlan],
) -> CoordEntry {
    let source = exemplar.guide();
    let sraster = source.raster();
    let weights = source.weights();
    let pi = target.raster().index(p);
    let gp = target.values_at(pi);
    let lp = target.label_at(pi);
    for plan in plans {
        let Some(shift) = plan.shifts[plan.nearest(p)] else {
            continue;
        };
        let c = p + shift;
        if !sraster.contains(c) {
            continue;
        }
        let ci = sraster.index(c);
        if !source.is_masked_in(ci) || labels_conflict(lp, source.label_at(ci)) {
            continue;
        }
        if weighted_l2(gp, source.values_at(ci), weights) < params.threshold {
            return CoordEntry {
                src: c,
                level: plan.level as u8,
                miss: false,
            };
        }
    }
    let lookup = exemplar.lookup();
    CoordEntry {
        src: lookup
            .nearest(gp, lp)
            .unwrap_or_else(|| lookup.nearest_any(gp)),
        level: 0,
        miss: true,
    }
}

/// Stylizes a target guide: coordinate field followed by color resolution.
pub fn synthesize<S: Scalar>(
    exemplar: &Exemplar<S>,
    target: &GuideField<S>,
    params: &SynthesisParams<S>,
) -> Result<Synthesis> {
    let coords = synthesize_coords(exemplar, target, params)?;
    let image = resolve_colors(
        &coords,
        exemplar.style(),
        params.resolve,
        params.patch_radius,
    )?;
    Ok(Synthesis { image, coords })
}
