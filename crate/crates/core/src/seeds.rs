//! Implicit multi-level jittered seed hierarchy.
//!
//! Level `l` places one seed per `h x h` cell at a jittered position inside
//! the cell, with `h` doubling from level to level. Nothing is stored: a seed
//! is a pure function of its cell, level and the RNG seed, so any pixel can
//! find its nearest seed independently.

use crate::raster::PixelCoord;
use crate::{Error, Result};

/// Per-cell jitter in `[0, 1)^2`.
pub trait Jitter: Sync {
    fn jitter(&self, cell: PixelCoord, level: u32) -> [f64; 2];
}

/// Stateless jitter source: a 64-bit avalanche hash of `(cell, level, seed)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct JitterTable {
    pub rng_seed: u64,
}

impl JitterTable {
    pub const fn new(rng_seed: u64) -> Self {
        Self { rng_seed }
    }

    /// Table for animation frame `frame`: only the seed changes.
    pub fn for_frame(self, frame: u64) -> Self {
        Self::new(mix64(
            self.rng_seed ^ mix64(frame.wrapping_add(0x632B_E59B_D9B4_E019)),
        ))
    }
}

impl Jitter for JitterTable {
    #[inline]
    fn jitter(&self, cell: PixelCoord, level: u32) -> [f64; 2] {
        let xy = (cell.x as u32 as u64) | ((cell.y as u32 as u64) << 32);
        let h =
            mix64(self.rng_seed ^ mix64(xy ^ (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        [unit(mix64(h)), unit(mix64(h ^ 0xD1B5_4A32_D192_ED03))]
    }
}

impl<F: Fn(PixelCoord, u32) -> [f64; 2] + Sync> Jitter for F {
    fn jitter(&self, cell: PixelCoord, level: u32) -> [f64; 2] {
        self(cell, level)
    }
}

/// splitmix64 finalizer.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Level count and spacing of the seed hierarchy. Level `l` (1-based) uses
/// spacing `spacing_base * 2^(l-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HierarchyParams {
    pub levels: u32,
    pub spacing_base: u32,
}

impl Default for HierarchyParams {
    fn default() -> Self {
        Self {
            levels: 5,
            spacing_base: 4,
        }
    }
}

impl HierarchyParams {
    pub fn new(levels: u32, spacing_base: u32) -> Self {
        Self {
            levels,
            spacing_base,
        }
    }

    /// Default hierarchy for an exemplar: base spacing 4 and enough levels
    /// that the top spacing is about a quarter of the exemplar's shorter side.
    pub fn for_exemplar(width: usize, height: usize) -> Self {
        let base = 4u32;
        let target = (width.min(height) as f64 / 4.0) / base as f64;
        let levels = if target <= 1.0 {
            1
        } else {
            1 + target.log2().round() as u32
        };
        Self::new(levels, base)
    }

    #[inline]
    pub fn spacing(&self, level: u32) -> u32 {
        self.spacing_base << (level - 1)
    }

    pub fn top_spacing(&self) -> u32 {
        self.spacing(self.levels)
    }

    pub fn validate(&self, target_width: usize, target_height: usize) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::InvalidParams(
                "hierarchy needs at least one level".into(),
            ));
        }
        if self.spacing_base < 2 {
            return Err(Error::InvalidParams(
                "seed spacing base must be at least 2".into(),
            ));
        }
        if self.levels > 24 || (self.top_spacing() as usize) > target_width.max(target_height) {
            return Err(Error::InvalidParams(format!(
                "top-level seed spacing exceeds target size {}x{}",
                target_width, target_height
            )));
        }
        Ok(())
    }
}

#[inline]
fn floor_div(a: i32, b: i32) -> i32 {
    a.div_euclid(b)
}

/// Jittered seed of the level-`level` cell containing `p`.
#[inline]
pub fn seed_point<J: Jitter + ?Sized>(p: PixelCoord, h: u32, level: u32, jitter: &J) -> PixelCoord {
    let h = h as i32;
    let cell = PixelCoord::new(floor_div(p.x, h), floor_div(p.y, h));
    seed_of_cell(cell, h, level, jitter)
}

#[inline]
pub(crate) fn seed_of_cell<J: Jitter + ?Sized>(
    cell: PixelCoord,
    h: i32,
    level: u32,
    jitter: &J,
) -> PixelCoord {
    let [jx, jy] = jitter.jitter(cell, level);
    // floor(h * (b + j)) = h * b + floor(h * j), with h * j kept inside the cell
    let off = |j: f64| ((h as f64 * j).floor() as i32).clamp(0, h - 1);
    PixelCoord::new(h * cell.x + off(jx), h * cell.y + off(jy))
}

/// Nearest seed to `p` among the 3x3 neighbouring cells. The scan visits
/// `x` in the outer loop and `y` in the inner loop; only a strictly smaller
/// distance replaces the current best.
#[inline]
pub fn nearest_seed<J: Jitter + ?Sized>(
    p: PixelCoord,
    h: u32,
    level: u32,
    jitter: &J,
) -> PixelCoord {
    let hi = h as i32;
    let base = PixelCoord::new(floor_div(p.x, hi), floor_div(p.y, hi));
    let mut best = p;
    let mut best_d = i64::MAX;
    for x in -1..=1 {
        for y in -1..=1 {
            // floor((p + h * (x, y)) / h) = floor(p / h) + (x, y)
            let s = seed_of_cell(base + PixelCoord::new(x, y), hi, level, jitter);
            let d = (s - p).norm_sq();
            if d < best_d {
                best = s;
                best_d = d;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(j: [f64; 2]) -> impl Fn(PixelCoord, u32) -> [f64; 2] + Sync {
        move |_, _| j
    }

    #[test]
    fn seed_point_examples() {
        assert_eq!(
            seed_point(PixelCoord::new(0, 0), 4, 1, &fixed([0.0, 0.0])),
            PixelCoord::new(0, 0)
        );
        assert_eq!(
            seed_point(PixelCoord::new(5, 3), 4, 1, &fixed([0.5, 0.25])),
            PixelCoord::new(6, 1)
        );
        assert_eq!(
            seed_point(PixelCoord::new(-1, -1), 4, 1, &fixed([0.0, 0.0])),
            PixelCoord::new(-4, -4)
        );
    }

    #[test]
    fn seed_point_stays_in_cell_for_extreme_jitter() {
        let j = fixed([1.0 - f64::EPSILON / 2.0, 0.999_999_999_999]);
        let s = seed_point(PixelCoord::new(7, 7), 12, 1, &j);
        assert_eq!(s, PixelCoord::new(11, 11));
    }

    #[test]
    fn nearest_seed_zero_jitter() {
        let z = fixed([0.0, 0.0]);
        assert_eq!(
            nearest_seed(PixelCoord::new(5, 5), 4, 1, &z),
            PixelCoord::new(4, 4)
        );
        assert_eq!(
            nearest_seed(PixelCoord::new(8, 4), 4, 1, &z),
            PixelCoord::new(8, 4)
        );
    }

    /// Transcription of the nine-candidate loop with explicit bookkeeping,
    /// used to freeze the tie-break outcome.
    fn enumerate_candidates(p: PixelCoord, h: i32) -> Vec<(PixelCoord, i64)> {
        let mut out = Vec::new();
        for x in [-1, 0, 1] {
            for y in [-1, 0, 1] {
                let q = PixelCoord::new(p.x + h * x, p.y + h * y);
                let b = PixelCoord::new(q.x.div_euclid(h), q.y.div_euclid(h));
                let s = PixelCoord::new(h * b.x, h * b.y);
                out.push((s, (s - p).norm_sq()));
            }
        }
        out
    }

    #[test]
    fn nearest_seed_tie_break_follows_scan_order() {
        let p = PixelCoord::new(6, 6);
        let cands = enumerate_candidates(p, 4);
        let min = cands.iter().map(|c| c.1).min().unwrap();
        let first = cands.iter().find(|c| c.1 == min).unwrap().0;
        assert_eq!(min, 8);
        assert_eq!(first, PixelCoord::new(4, 4));
        assert_eq!(cands.iter().filter(|c| c.1 == min).count(), 4);
        assert_eq!(nearest_seed(p, 4, 1, &fixed([0.0, 0.0])), first);
    }

    #[test]
    fn seed_is_its_own_nearest() {
        let jt = JitterTable::new(99);
        for l in 1..=4 {
            let h = 4 << (l - 1);
            for cy in -3..3 {
                for cx in -3..3 {
                    let s = seed_point(PixelCoord::new(cx * h as i32, cy * h as i32), h, l, &jt);
                    assert_eq!(nearest_seed(s, h, l, &jt), s);
                }
            }
        }
    }

    #[test]
    fn jitter_is_pure_and_level_dependent() {
        let jt = JitterTable::new(7);
        let c = PixelCoord::new(-3, 12);
        assert_eq!(jt.jitter(c, 2), jt.jitter(c, 2));
        assert_ne!(jt.jitter(c, 2), jt.jitter(c, 3));
        assert_ne!(jt.jitter(c, 2), JitterTable::new(8).jitter(c, 2));
        assert_ne!(jt.for_frame(0), jt.for_frame(1));
        for v in jt.jitter(c, 1) {
            assert!((0.0..1.0).contains(&v));
        }
    }

    #[test]
    fn hierarchy_defaults() {
        let h = HierarchyParams::for_exemplar(256, 256);
        assert_eq!(h, HierarchyParams::new(5, 4));
        assert_eq!(h.top_spacing(), 64);
        assert_eq!(HierarchyParams::for_exemplar(8, 8).levels, 1);
        assert!(HierarchyParams::new(0, 4).validate(64, 64).is_err());
        assert!(HierarchyParams::new(3, 1).validate(64, 64).is_err());
        assert!(HierarchyParams::new(5, 4).validate(32, 32).is_err());
        assert!(HierarchyParams::new(5, 4).validate(64, 16).is_ok());
    }
}
