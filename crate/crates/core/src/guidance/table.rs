//! Quantized 2D lookup table over two guide channels.

use crate::raster::weighted_l2;
use crate::Scalar;

const EMPTY: u32 = u32::MAX;

/// Maps a quantized pair of guide values to the source pixel whose guide is
/// nearest the bin center.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct QuantTable {
    resolution: usize,
    cells: Vec<u32>,
}

impl QuantTable {
    /// `values(i)` yields the two weighted channels of source pixel `i`;
    /// `weights` are the weights of those channels. `candidates` must be in
    /// row-major order and non-empty.
    pub(crate) fn build<S, F>(
        resolution: usize,
        candidates: &[u32],
        weights: [S; 2],
        values: F,
    ) -> Self
    where
        S: Scalar,
        F: Fn(u32) -> [S; 2],
    {
        debug_assert!(!candidates.is_empty());
        let r = resolution;
        let center =
            |bin: usize| [bin % r, bin / r].map(|c| S::from_f64(bin_center(c, r)).unwrap());
        let dist = |bin: usize, idx: u32| weighted_l2(&center(bin), &values(idx), &weights);

        let mut cells = vec![EMPTY; r * r];
        for &idx in candidates {
            let [a, b] = values(idx);
            let bin = bin_of(b, r) * r + bin_of(a, r);
            if better(dist(bin, idx), idx, cells[bin], || dist(bin, cells[bin])) {
                cells[bin] = idx;
            }
        }

        // Jump flooding, followed by two unit-step passes to repair the
        // occasional miss of plain JFA.
        let mut steps = Vec::new();
        let mut k = r.next_power_of_two() / 2;
        while k >= 1 {
            steps.push(k);
            k /= 2;
        }
        steps.extend([1, 1]);
        let mut next = cells.clone();
        for step in steps {
            for bin in 0..r * r {
                let (bx, by) = ((bin % r) as isize, (bin / r) as isize);
                let mut best = cells[bin];
                let mut best_d = (best != EMPTY).then(|| dist(bin, best));
                for dy in [-1isize, 0, 1] {
                    for dx in [-1isize, 0, 1] {
                        let (nx, ny) = (bx + dx * step as isize, by + dy * step as isize);
                        if nx < 0 || ny < 0 || nx >= r as isize || ny >= r as isize {
                            continue;
                        }
                        let cand = cells[ny as usize * r + nx as usize];
                        if cand == EMPTY || cand == best {
                            continue;
                        }
                        let d = dist(bin, cand);
                        let wins = match best_d {
                            None => true,
                            Some(bd) => d < bd || (d == bd && cand < best),
                        };
                        if wins {
                            best = cand;
                            best_d = Some(d);
                        }
                    }
                }
                next[bin] = best;
            }
            std::mem::swap(&mut cells, &mut next);
        }
        debug_assert!(cells.iter().all(|&c| c != EMPTY));
        Self { resolution, cells }
    }

    #[inline]
    pub(crate) fn get<S: Scalar>(&self, a: S, b: S) -> u32 {
        let r = self.resolution;
        self.cells[bin_of(b, r) * r + bin_of(a, r)]
    }
}

fn better<S: Scalar>(d: S, idx: u32, current: u32, current_d: impl FnOnce() -> S) -> bool {
    if current == EMPTY {
        return true;
    }
    let cd = current_d();
    d < cd || (d == cd && idx < current)
}

/// Bin centers sit at `k / (resolution - 1)`, so with 256 bins every 8-bit
/// guide value is exactly a bin center.
pub(crate) fn bin_center(bin: usize, resolution: usize) -> f64 {
    if resolution == 1 {
        0.5
    } else {
        bin as f64 / (resolution - 1) as f64
    }
}

/// Bin whose center is nearest to `v`; out-of-range values clamp to the edge
/// bins and NaN maps to bin 0.
#[inline]
pub(crate) fn bin_of<S: Scalar>(v: S, resolution: usize) -> usize {
    let scaled = v.to_f64().unwrap_or(0.0) * (resolution - 1) as f64 + 0.5;
    if scaled >= 0.0 {
        (scaled as usize).min(resolution - 1)
    } else {
        0
    }
}
