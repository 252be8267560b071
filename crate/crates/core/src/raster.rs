//! Raster data model, pixel coordinates and the guidance metric.

use std::ops::{Add, Sub};

use arrayvec::ArrayVec;

use crate::{Error, Result, Scalar};

/// Maximum number of channels a raster or guide vector may carry.
pub const MAX_CHANNELS: usize = 8;

/// Integer pixel coordinate. May lie outside any raster during arithmetic;
/// check with [`in_bounds`] before dereferencing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct PixelCoord {
    pub x: i32,
    pub y: i32,
}

impl PixelCoord {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// Squared Euclidean length.
    pub fn norm_sq(self) -> i64 {
        let (x, y) = (self.x as i64, self.y as i64);
        x * x + y * y
    }
}

impl Add for PixelCoord {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for PixelCoord {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Row-major 2D grid with interleaved channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<T> {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Copy> Raster<T> {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "empty raster {width}x{height}"
            )));
        }
        if channels == 0 || channels > MAX_CHANNELS {
            return Err(Error::InvalidRaster(format!(
                "channel count {channels} outside 1..={MAX_CHANNELS}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidRaster(format!(
                "data length {} != {width}*{height}*{channels}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: T) -> Result<Self> {
        Self::new(
            width,
            height,
            channels,
            vec![value; width * height * channels],
        )
    }

    /// Builds a raster by evaluating `f(x, y)` for every pixel; `f` returns
    /// exactly `channels` values.
    pub fn from_fn<F, I>(width: usize, height: usize, channels: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> I,
        I: IntoIterator<Item = T>,
    {
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                let before = data.len();
                data.extend(f(x, y));
                if data.len() - before != channels {
                    return Err(Error::ChannelMismatch {
                        expected: channels,
                        actual: data.len() - before,
                    });
                }
            }
        }
        Self::new(width, height, channels, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    /// Linear pixel index of an in-bounds coordinate.
    #[inline]
    pub fn index(&self, p: PixelCoord) -> usize {
        debug_assert!(self.contains(p));
        p.y as usize * self.width + p.x as usize
    }

    #[inline]
    pub fn coord(&self, index: usize) -> PixelCoord {
        PixelCoord::new((index % self.width) as i32, (index / self.width) as i32)
    }

    /// Nearest in-bounds coordinate (clamp-to-edge).
    #[inline]
    pub fn clamp(&self, p: PixelCoord) -> PixelCoord {
        PixelCoord::new(
            p.x.clamp(0, self.width as i32 - 1),
            p.y.clamp(0, self.height as i32 - 1),
        )
    }

    #[inline]
    pub fn pixel(&self, p: PixelCoord) -> &[T] {
        self.pixel_at(self.index(p))
    }

    #[inline]
    pub fn pixel_at(&self, index: usize) -> &[T] {
        &self.data[index * self.channels..(index + 1) * self.channels]
    }

    pub fn pixel_mut(&mut self, p: PixelCoord) -> &mut [T] {
        let i = self.index(p);
        &mut self.data[i * self.channels..(i + 1) * self.channels]
    }

    pub fn get(&self, p: PixelCoord) -> Option<&[T]> {
        self.contains(p).then(|| self.pixel(p))
    }

    pub fn rows(&self) -> impl DoubleEndedIterator<Item = &[T]> {
        self.data.chunks_exact(self.width * self.channels)
    }

    pub fn map<U: Copy>(
        &self,
        channels: usize,
        mut f: impl FnMut(&[T]) -> Vec<U>,
    ) -> Result<Raster<U>> {
        let mut data = Vec::with_capacity(self.len() * channels);
        for px in self.data.chunks_exact(self.channels) {
            let out = f(px);
            if out.len() != channels {
                return Err(Error::ChannelMismatch {
                    expected: channels,
                    actual: out.len(),
                });
            }
            data.extend(out);
        }
        Raster::new(self.width, self.height, channels, data)
    }

    /// Vertically mirrored copy.
    pub fn flip_vertical(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for row in self.rows().rev() {
            data.extend_from_slice(row);
        }
        Self { data, ..*self }
    }
}

/// True iff `p` addresses a pixel of `img`.
pub fn in_bounds<T: Copy>(p: PixelCoord, img: &Raster<T>) -> bool {
    img.contains(p)
}

/// Guide sample of one pixel: channel values plus an optional hard label.
#[derive(Debug, Clone, PartialEq)]
pub struct GuideVector<S> {
    pub values: ArrayVec<S, MAX_CHANNELS>,
    pub label: Option<u32>,
}

impl<S: Scalar> GuideVector<S> {
    pub fn new(values: &[S], label: Option<u32>) -> Self {
        Self {
            values: values.iter().copied().take(MAX_CHANNELS).collect(),
            label,
        }
    }

    pub fn unlabeled(values: &[S]) -> Self {
        Self::new(values, None)
    }

    pub fn channels(&self) -> usize {
        self.values.len()
    }
}

/// Weighted Euclidean distance between two guide vectors.
///
/// Vectors that both carry a hard label and disagree on it are infinitely far
/// apart.
pub fn guide_distance<S: Scalar>(
    a: &GuideVector<S>,
    b: &GuideVector<S>,
    weights: &[S],
) -> Result<S> {
    if a.channels() != b.channels() {
        return Err(Error::ChannelMismatch {
            expected: a.channels(),
            actual: b.channels(),
        });
    }
    if weights.len() != a.channels() {
        return Err(Error::ChannelMismatch {
            expected: a.channels(),
            actual: weights.len(),
        });
    }
    if labels_conflict(a.label, b.label) {
        return Ok(S::infinity());
    }
    Ok(weighted_l2(&a.values, &b.values, weights))
}

#[inline]
pub(crate) fn labels_conflict(a: Option<u32>, b: Option<u32>) -> bool {
    matches!((a, b), (Some(x), Some(y)) if x != y)
}

/// Unchecked weighted L2 over equal-length slices. Every distance in the
/// crate goes through this function so that the kernel and the verifiers
/// round identically.
#[inline]
pub(crate) fn weighted_l2<S: Scalar>(a: &[S], b: &[S], weights: &[S]) -> S {
    let mut acc = S::zero();
    for ((&x, &y), &w) in a.iter().zip(b).zip(weights) {
        let d = x - y;
        acc = acc + w * d * d;
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gv(values: &[f64]) -> GuideVector<f64> {
        GuideVector::unlabeled(values)
    }

    #[test]
    fn distance_identity_is_zero() {
        let a = gv(&[0.3, 0.7, 0.1]);
        assert_eq!(guide_distance(&a, &a, &[1.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn distance_three_four_five() {
        let d = guide_distance(&gv(&[0.0, 0.0]), &gv(&[0.6, 0.8]), &[1.0, 1.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distance_label_mismatch_is_infinite() {
        let a = GuideVector::new(&[0.5f64, 0.5], Some(1));
        let b = GuideVector::new(&[0.5, 0.5], Some(2));
        assert!(guide_distance(&a, &b, &[1.0, 1.0]).unwrap().is_infinite());
        // one-sided labels do not constrain
        let c = GuideVector::new(&[0.5, 0.5], None);
        assert_eq!(guide_distance(&a, &c, &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn distance_channel_mismatch_errors() {
        let err = guide_distance(&gv(&[0.0]), &gv(&[0.0, 1.0]), &[1.0]).unwrap_err();
        assert_eq!(
            err,
            Error::ChannelMismatch {
                expected: 1,
                actual: 2
            }
        );
        assert!(guide_distance(&gv(&[0.0]), &gv(&[1.0]), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn bounds() {
        let one = Raster::filled(1, 1, 1, 0u8).unwrap();
        assert!(in_bounds(PixelCoord::new(0, 0), &one));
        let img = Raster::filled(5, 3, 1, 0u8).unwrap();
        assert!(!in_bounds(PixelCoord::new(-1, 0), &img));
        assert!(!in_bounds(PixelCoord::new(5, 0), &img));
        assert!(!in_bounds(PixelCoord::new(0, 3), &img));
        assert!(in_bounds(PixelCoord::new(4, 2), &img));
    }

    #[test]
    fn raster_rejects_bad_shapes() {
        assert!(Raster::new(2, 2, 1, vec![0u8; 3]).is_err());
        assert!(Raster::new(0, 2, 1, Vec::<u8>::new()).is_err());
        assert!(Raster::new(1, 1, 9, vec![0u8; 9]).is_err());
        assert!(Raster::new(1, 1, 0, Vec::<u8>::new()).is_err());
    }

    #[test]
    fn flip_vertical_reverses_rows() {
        let r = Raster::new(2, 3, 1, vec![1u8, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(r.flip_vertical().data(), &[5, 6, 3, 4, 1, 2]);
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 3)
    }

    proptest! {
        #[test]
        fn metric_axioms(a in vec3(), b in vec3(), c in vec3(), w in prop::collection::vec(0.0f64..2.0, 3)) {
            let (a, b, c) = (gv(&a), gv(&b), gv(&c));
            let ab = guide_distance(&a, &b, &w).unwrap();
            let ba = guide_distance(&b, &a, &w).unwrap();
            let bc = guide_distance(&b, &c, &w).unwrap();
            let ac = guide_distance(&a, &c, &w).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, ba);
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert_eq!(guide_distance(&a, &a, &w).unwrap(), 0.0);
        }

        #[test]
        fn zero_distance_implies_equal(a in vec3(), b in vec3()) {
            let d = guide_distance(&gv(&a), &gv(&b), &[1.0; 3]).unwrap();
            prop_assert_eq!(d == 0.0, a == b);
        }

        #[test]
        fn monotone_in_weights(a in vec3(), b in vec3(), w in prop::collection::vec(0.0f64..2.0, 3),
                               ch in 0usize..3, extra in 0.0f64..2.0) {
            let (a, b) = (gv(&a), gv(&b));
            let mut heavier = w.clone();
            heavier[ch] += extra;
            prop_assert!(guide_distance(&a, &b, &heavier).unwrap() >= guide_distance(&a, &b, &w).unwrap());
        }
    }
}
