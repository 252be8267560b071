//! Sequential brute-force synthesizer.
//!
//! Scans target pixels in row-major order. Every still-empty pixel becomes a
//! chunk seed: its guide is matched into the exemplar and the whole exemplar
//! is swept, pasting each source pixel at the same relative offset wherever
//! the target is empty and the guidance error is below the threshold. The
//! cost is O(seeds x exemplar size), so this is meant as a reference for
//! small inputs, not for production use.

use super::{resolve_colors, CoordEntry, CoordField, Resolve, Synthesis};
use crate::guidance::{build_lookup, Backend, GuideField};
use crate::raster::{labels_conflict, weighted_l2, PixelCoord, Raster};
use crate::{Error, Result, Scalar};

/// Brute-force synthesis with exact guide retrieval. Pasted pixels are
/// recorded at level 1; pixels no seed could fill fall back to a direct
/// lookup at level 0 and are flagged as misses.
pub fn blit_bruteforce<S: Scalar>(
    style: &Raster<u8>,
    source: &GuideField<S>,
    target: &GuideField<S>,
    threshold: S,
) -> Result<Synthesis> {
    if style.dimensions() != source.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: source.dimensions(),
            actual: style.dimensions(),
        });
    }
    if target.channels() != source.channels() {
        return Err(Error::ChannelMismatch {
            expected: source.channels(),
            actual: target.channels(),
        });
    }
    if !(threshold >= S::zero()) {
        return Err(Error::InvalidParams(
            "threshold must be non-negative".into(),
        ));
    }
    let lookup = build_lookup(source, Backend::Exact)?;
    let weights = source.weights();
    let traster = target.raster();
    let sraster = source.raster();
    let mut filled: Vec<Option<PixelCoord>> = vec![None; traster.len()];

    for pi in 0..traster.len() {
        if filled[pi].is_some() {
            continue;
        }
        let p = traster.coord(pi);
        let Some(u) = lookup.nearest(target.values_at(pi), target.label_at(pi)) else {
            continue;
        };
        for qi in 0..sraster.len() {
            if !source.is_masked_in(qi) {
                continue;
            }
            let q = sraster.coord(qi);
            let dst = p + (q - u);
            if !traster.contains(dst) {
                continue;
            }
            let di = traster.index(dst);
            if filled[di].is_some() || labels_conflict(target.label_at(di), source.label_at(qi)) {
                continue;
            }
            if weighted_l2(target.values_at(di), source.values_at(qi), weights) < threshold {
                filled[di] = Some(q);
            }
        }
    }

    let entries = filled
        .iter()
        .enumerate()
        .map(|(i, f)| match *f {
            Some(src) => CoordEntry {
                src,
                level: 1,
                miss: false,
            },
            None => {
                let g = target.values_at(i);
                CoordEntry {
                    src: lookup
                        .nearest(g, target.label_at(i))
                        .unwrap_or_else(|| lookup.nearest_any(g)),
                    level: 0,
                    miss: true,
                }
            }
        })
        .collect();
    let coords = CoordField::new(traster.width(), traster.height(), entries)?;
    let image = resolve_colors(&coords, style, Resolve::Blit, 1)?;
    Ok(Synthesis { image, coords })
}
