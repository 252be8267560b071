//! Guidance channels: decoding, composition, and nearest-guide retrieval.

mod kdtree;
mod lookup;
mod table;

pub use lookup::{build_lookup, lookup_nearest, Backend, GuideLookup, DEFAULT_TABLE_RESOLUTION};

use crate::raster::{GuideVector, PixelCoord, Raster};
use crate::{Error, Result, Scalar};

/// Multi-channel guidance raster with per-channel weights, optional hard
/// labels and an optional validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct GuideField<S> {
    raster: Raster<S>,
    weights: Vec<S>,
    labels: Option<Raster<u32>>,
    mask: Option<Raster<bool>>,
}

impl<S: Scalar> GuideField<S> {
    pub fn new(raster: Raster<S>, weights: Vec<S>) -> Result<Self> {
        if weights.len() != raster.channels() {
            return Err(Error::ChannelMismatch {
                expected: raster.channels(),
                actual: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < S::zero()) {
            return Err(Error::InvalidParams(
                "guide weights must be finite and non-negative".into(),
            ));
        }
        let field = Self {
            raster,
            weights,
            labels: None,
            mask: None,
        };
        field.check_finite()?;
        Ok(field)
    }

    /// Field with every channel weighted 1.
    pub fn uniform(raster: Raster<S>) -> Result<Self> {
        let weights = vec![S::one(); raster.channels()];
        Self::new(raster, weights)
    }

    /// Two-channel texture-coordinate guide where pixel (x, y) maps to
    /// (x / (w - 1), y / (h - 1)). Injective, so every value pins one pixel.
    pub fn uv_identity(width: usize, height: usize) -> Result<Self> {
        let norm = |v: usize, n: usize| {
            if n > 1 {
                S::from_usize(v).unwrap() / S::from_usize(n - 1).unwrap()
            } else {
                S::zero()
            }
        };
        Self::uniform(Raster::from_fn(width, height, 2, |x, y| {
            [norm(x, width), norm(y, height)]
        })?)
    }

    /// Guide from 8-bit samples, each divided by 255.
    pub fn from_unorm8(width: usize, height: usize, channels: usize, bytes: &[u8]) -> Result<Self> {
        let scale = S::from_u8(255).unwrap();
        let data = bytes
            .iter()
            .map(|&b| S::from_u8(b).unwrap() / scale)
            .collect();
        Self::uniform(Raster::new(width, height, channels, data)?)
    }

    /// Two-channel guide from an RGB normal pass (see [`decode_normal`]).
    /// Back-facing and degenerate pixels are masked out.
    pub fn from_normals_rgb8(width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != width * height * 3 {
            return Err(Error::InvalidRaster(format!(
                "normal pass has {} bytes, expected {}",
                rgb.len(),
                width * height * 3
            )));
        }
        let scale = S::from_u8(255).unwrap();
        let mut values = Vec::with_capacity(width * height * 2);
        let mut mask = Vec::with_capacity(width * height);
        for px in rgb.chunks_exact(3) {
            let c = [0, 1, 2].map(|i| S::from_u8(px[i]).unwrap() / scale);
            match decode_normal(c) {
                Some(v) => {
                    values.extend(v);
                    mask.push(true);
                }
                None => {
                    let half = S::from_f64(0.5).unwrap();
                    values.extend([half, half]);
                    mask.push(false);
                }
            }
        }
        Self::uniform(Raster::new(width, height, 2, values)?)?
            .with_mask(Raster::new(width, height, 1, mask)?)
    }

    /// Label-only guide: one zero-weight channel carrying the labels. Used for
    /// segmentation maps, which constrain matches without contributing error.
    pub fn from_labels(labels: Raster<u32>) -> Result<Self> {
        let (w, h) = labels.dimensions();
        let mut field = Self::new(Raster::filled(w, h, 1, S::zero())?, vec![S::zero()])?;
        field = field.with_labels(labels)?;
        Ok(field)
    }

    pub fn with_weights(mut self, weights: Vec<S>) -> Result<Self> {
        let mask = self.mask.take();
        let labels = self.labels.take();
        let mut field = Self::new(self.raster, weights)?;
        field.labels = labels;
        field.mask = mask;
        Ok(field)
    }

    /// Scales every channel weight by `factor`.
    pub fn scaled(self, factor: S) -> Result<Self> {
        let weights = self.weights.iter().map(|&w| w * factor).collect();
        self.with_weights(weights)
    }

    pub fn with_labels(mut self, labels: Raster<u32>) -> Result<Self> {
        if labels.dimensions() != self.raster.dimensions() || labels.channels() != 1 {
            return Err(Error::DimensionMismatch {
                expected: self.raster.dimensions(),
                actual: labels.dimensions(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_mask(mut self, mask: Raster<bool>) -> Result<Self> {
        if mask.dimensions() != self.raster.dimensions() || mask.channels() != 1 {
            return Err(Error::DimensionMismatch {
                expected: self.raster.dimensions(),
                actual: mask.dimensions(),
            });
        }
        self.mask = Some(mask);
        self.check_finite()?;
        Ok(self)
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.raster.len() {
            if self.is_masked_in(i) && self.values_at(i).iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidRaster(format!(
                    "non-finite guide value at masked-in pixel {:?}",
                    self.raster.coord(i)
                )));
            }
        }
        Ok(())
    }

    pub fn raster(&self) -> &Raster<S> {
        &self.raster
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&Raster<u32>> {
        self.labels.as_ref()
    }

    pub fn mask(&self) -> Option<&Raster<bool>> {
        self.mask.as_ref()
    }

    pub fn width(&self) -> usize {
        self.raster.width()
    }

    pub fn height(&self) -> usize {
        self.raster.height()
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.raster.dimensions()
    }

    pub fn channels(&self) -> usize {
        self.raster.channels()
    }

    #[inline]
    pub fn values_at(&self, index: usize) -> &[S] {
        self.raster.pixel_at(index)
    }

    #[inline]
    pub fn label_at(&self, index: usize) -> Option<u32> {
        self.labels.as_ref().map(|l| l.data()[index])
    }

    #[inline]
    pub fn is_masked_in(&self, index: usize) -> bool {
        self.mask.as_ref().is_none_or(|m| m.data()[index])
    }

    /// Guide vector at an in-bounds pixel.
    pub fn sample(&self, p: PixelCoord) -> GuideVector<S> {
        let i = self.raster.index(p);
        GuideVector::new(self.values_at(i), self.label_at(i))
    }

    pub fn masked_in_count(&self) -> usize {
        (0..self.raster.len())
            .filter(|&i| self.is_masked_in(i))
            .count()
    }

    /// Vertically mirrored copy; guide values are carried unchanged.
    pub fn flip_vertical(&self) -> Self {
        Self {
            raster: self.raster.flip_vertical(),
            weights: self.weights.clone(),
            labels: self.labels.as_ref().map(Raster::flip_vertical),
            mask: self.mask.as_ref().map(Raster::flip_vertical),
        }
    }
}

/// Decodes an RGB-encoded camera-space normal into a two-channel guide.
///
/// `n = 2 * rgb - 1` is renormalized and `(n_x, n_y)` is remapped to
/// `[0, 1]`; `n_z` is dropped. Returns `None` (masked out) for back-facing
/// normals (`n_z < 0`) and for the zero vector.
pub fn decode_normal<S: Scalar>(rgb: [S; 3]) -> Option<[S; 2]> {
    let one = S::one();
    let two = one + one;
    let [nx, ny, nz] = rgb.map(|c| two * c - one);
    if nz < S::zero() {
        return None;
    }
    let len = (nx * nx + ny * ny + nz * nz).sqrt();
    if !(len > S::zero()) {
        return None;
    }
    Some([(nx / len + one) / two, (ny / len + one) / two])
}

/// Concatenates guide parts channel-wise. Weights travel with their part,
/// masks are intersected, and labels come from the (single) labeled part.
pub fn compose_guides<S: Scalar>(parts: &[GuideField<S>]) -> Result<GuideField<S>> {
    let first = parts
        .first()
        .ok_or_else(|| Error::InvalidParams("no guide parts to compose".into()))?;
    let dims = first.dimensions();
    if let Some(bad) = parts.iter().find(|p| p.dimensions() != dims) {
        return Err(Error::DimensionMismatch {
            expected: dims,
            actual: bad.dimensions(),
        });
    }
    let labeled: Vec<_> = parts.iter().filter_map(|p| p.labels.as_ref()).collect();
    if labeled.len() > 1 {
        return Err(Error::InvalidParams(
            "at most one guide part may carry hard labels".into(),
        ));
    }
    let channels: usize = parts.iter().map(GuideField::channels).sum();
    if channels > crate::MAX_CHANNELS {
        return Err(Error::InvalidRaster(format!(
            "composed guide has {channels} channels, limit is {}",
            crate::MAX_CHANNELS
        )));
    }
    let (w, h) = dims;
    let mut data = Vec::with_capacity(w * h * channels);
    for i in 0..w * h {
        for part in parts {
            data.extend_from_slice(part.values_at(i));
        }
    }
    let weights = parts
        .iter()
        .flat_map(|p| p.weights.iter().copied())
        .collect();
    let mut field = GuideField::new(Raster::new(w, h, channels, data)?, weights)?;
    field.labels = labeled.first().map(|l| (*l).clone());
    let masks: Vec<_> = parts.iter().filter_map(|p| p.mask.as_ref()).collect();
    if !masks.is_empty() {
        let mask = (0..w * h)
            .map(|i| masks.iter().all(|m| m.data()[i]))
            .collect();
        field.mask = Some(Raster::new(w, h, 1, mask)?);
    }
    Ok(field)
}
