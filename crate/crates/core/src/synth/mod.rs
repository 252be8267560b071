//! Chunk-copying synthesizers and color resolution.

mod animate;
mod kernel;
mod oracle;
mod resolve;

pub use animate::animate;
pub use kernel::{blit_pixel, synthesize, synthesize_coords, synthesize_coords_observed};
pub use oracle::blit_bruteforce;
pub use resolve::{resolve_colors, vote};

use crate::guidance::{build_lookup, Backend, GuideField, GuideLookup};
use crate::raster::{PixelCoord, Raster};
use crate::seeds::HierarchyParams;
use crate::{Error, Result, Scalar};

/// How the coordinate field is turned into colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resolve {
    /// Copy the assigned source pixel.
    Blit,
    /// Average co-located pixels of all source patches covering the pixel.
    #[default]
    Vote,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisParams<S> {
    /// Guidance error bound; a transfer is accepted only if its error is
    /// strictly below it.
    pub threshold: S,
    pub hierarchy: HierarchyParams,
    pub rng_seed: u64,
    pub resolve: Resolve,
    /// Patch radius for [`Resolve::Vote`]; patches are `(2r+1)^2`.
    pub patch_radius: u32,
    pub backend: Backend,
}

pub const DEFAULT_THRESHOLD: f64 = 0.1;
pub const DEFAULT_PATCH_RADIUS: u32 = 2;

impl<S: Scalar> Default for SynthesisParams<S> {
    fn default() -> Self {
        Self {
            threshold: S::from_f64(DEFAULT_THRESHOLD).unwrap(),
            hierarchy: HierarchyParams::default(),
            rng_seed: 0,
            resolve: Resolve::default(),
            patch_radius: DEFAULT_PATCH_RADIUS,
            backend: Backend::default(),
        }
    }
}

impl<S: Scalar> SynthesisParams<S> {
    pub fn with_threshold(mut self, threshold: S) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_hierarchy(mut self, hierarchy: HierarchyParams) -> Self {
        self.hierarchy = hierarchy;
        self
    }

    pub fn with_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    pub fn with_resolve(mut self, resolve: Resolve) -> Self {
        self.resolve = resolve;
        self
    }

    pub fn with_patch_radius(mut self, patch_radius: u32) -> Self {
        self.patch_radius = patch_radius;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn validate(&self, target_width: usize, target_height: usize) -> Result<()> {
        if !(self.threshold >= S::zero()) {
            return Err(Error::InvalidParams(
                "threshold must be non-negative".into(),
            ));
        }
        if self.resolve == Resolve::Vote && self.patch_radius < 1 {
            return Err(Error::InvalidParams(
                "vote needs a patch radius of at least 1".into(),
            ));
        }
        self.hierarchy.validate(target_width, target_height)
    }
}

/// Assignment of one target pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CoordEntry {
    /// Source pixel whose color (or patch) is transferred.
    pub src: PixelCoord,
    /// Hierarchy level that accepted the transfer; 0 means fallback.
    pub level: u8,
    /// No level met the threshold; `src` is the per-pixel lookup result.
    pub miss: bool,
}

/// Per-target-pixel source coordinates (a nearest-neighbour field).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordField {
    width: usize,
    height: usize,
    entries: Vec<CoordEntry>,
}

impl CoordField {
    pub fn new(width: usize, height: usize, entries: Vec<CoordEntry>) -> Result<Self> {
        if width == 0 || height == 0 || entries.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "coordinate field of {} entries cannot be {width}x{height}",
                entries.len()
            )));
        }
        Ok(Self {
            width,
            height,
            entries,
        })
    }

    /// Field assigning every target pixel the same source coordinate offset.
    pub fn from_fn(
        width: usize,
        height: usize,
        f: impl Fn(PixelCoord) -> CoordEntry,
    ) -> Result<Self> {
        let entries = (0..width * height)
            .map(|i| f(PixelCoord::new((i % width) as i32, (i / width) as i32)))
            .collect();
        Self::new(width, height, entries)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn entries(&self) -> &[CoordEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    #[inline]
    pub fn get(&self, p: PixelCoord) -> &CoordEntry {
        &self.entries[p.y as usize * self.width + p.x as usize]
    }

    pub fn coord(&self, index: usize) -> PixelCoord {
        PixelCoord::new((index % self.width) as i32, (index / self.width) as i32)
    }

    /// `src - p` at a pixel.
    pub fn offset(&self, index: usize) -> PixelCoord {
        self.entries[index].src - self.coord(index)
    }

    pub fn miss_count(&self) -> usize {
        self.entries.iter().filter(|e| e.miss).count()
    }
}

/// Style exemplar with its guide and a prebuilt retrieval structure. Build it
/// once and reuse it across frames.
#[derive(Debug, Clone)]
pub struct Exemplar<S> {
    style: Raster<u8>,
    guide: GuideField<S>,
    lookup: GuideLookup<S>,
}

impl<S: Scalar> Exemplar<S> {
    pub fn new(style: Raster<u8>, guide: GuideField<S>, backend: Backend) -> Result<Self> {
        if style.dimensions() != guide.dimensions() {
            return Err(Error::DimensionMismatch {
                expected: guide.dimensions(),
                actual: style.dimensions(),
            });
        }
        let lookup = build_lookup(&guide, backend)?;
        Ok(Self {
            style,
            guide,
            lookup,
        })
    }

    pub fn style(&self) -> &Raster<u8> {
        &self.style
    }

    pub fn guide(&self) -> &GuideField<S> {
        &self.guide
    }

    pub fn lookup(&self) -> &GuideLookup<S> {
        &self.lookup
    }

    pub(crate) fn check_target(&self, target: &GuideField<S>) -> Result<()> {
        if target.channels() != self.guide.channels() {
            return Err(Error::ChannelMismatch {
                expected: self.guide.channels(),
                actual: target.channels(),
            });
        }
        if target.labels().is_some() != self.guide.labels().is_some() {
            return Err(Error::InvalidParams(
                "source and target guides must both carry labels or neither".into(),
            ));
        }
        Ok(())
    }
}

/// Stylized image together with the coordinate field that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub image: Raster<u8>,
    pub coords: CoordField,
}
