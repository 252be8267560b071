use rayon::prelude::*;

use super::{CoordField, Resolve};
use crate::raster::{PixelCoord, Raster};
use crate::{Error, Result, MAX_CHANNELS};

/// Turns a coordinate field into colors from the style exemplar.
pub fn resolve_colors(
    cf: &CoordField,
    style: &Raster<u8>,
    mode: Resolve,
    patch_radius: u32,
) -> Result<Raster<u8>> {
    match mode {
        Resolve::Blit => blit(cf, style),
        Resolve::Vote => vote(cf, style, patch_radius),
    }
}

fn blit(cf: &CoordField, style: &Raster<u8>) -> Result<Raster<u8>> {
    let ch = style.channels();
    let mut data = vec![0u8; cf.len() * ch];
    data.par_chunks_mut(cf.width() * ch)
        .enumerate()
        .for_each(|(y, row)| {
            for (x, px) in row.chunks_exact_mut(ch).enumerate() {
                let src = style.clamp(cf.get(PixelCoord::new(x as i32, y as i32)).src);
                px.copy_from_slice(style.pixel(src));
            }
        });
    Raster::new(cf.width(), cf.height(), ch, data)
}

/// Patch voting: each output pixel is the rounded mean of the colors that
/// every `(2r+1)^2` source patch centred on a neighbouring pixel `q` places
/// at it, i.e. `style[src(q) + (p - q)]`. Contributions falling outside the
/// exemplar are skipped.
///
/// Where the whole neighbourhood shares one offset every vote is the same
/// color, so the mean is the blitted color and the patch is not visited.
pub fn vote(cf: &CoordField, style: &Raster<u8>, patch_radius: u32) -> Result<Raster<u8>> {
    if patch_radius < 1 {
        return Err(Error::InvalidParams(
            "vote needs a patch radius of at least 1".into(),
        ));
    }
    let r = patch_radius as i32;
    let ch = style.channels();
    let (w, h) = (cf.width() as i32, cf.height() as i32);
    let seams = SeamCounts::new(cf);
    let mut data = vec![0u8; cf.len() * ch];
    data.par_chunks_mut(cf.width() * ch)
        .enumerate()
        .for_each(|(y, row)| {
            let y = y as i32;
            let (y0, y1) = ((y - r).max(0), (y + r).min(h - 1));
            for (x, px) in row.chunks_exact_mut(ch).enumerate() {
                let x = x as i32;
                let p = PixelCoord::new(x, y);
                let (x0, x1) = ((x - r).max(0), (x + r).min(w - 1));
                if !seams.any(x0, y0, x1, y1) {
                    px.copy_from_slice(style.pixel(style.clamp(cf.get(p).src)));
                    continue;
                }
                let mut sum = [0u32; MAX_CHANNELS];
                let mut n = 0u32;
                for qy in y0..=y1 {
                    for qx in x0..=x1 {
                        let q = PixelCoord::new(qx, qy);
                        let s = cf.get(q).src + (p - q);
                        if let Some(color) = style.get(s) {
                            for (acc, &c) in sum.iter_mut().zip(color) {
                                *acc += c as u32;
                            }
                            n += 1;
                        }
                    }
                }
                if n == 0 {
                    px.copy_from_slice(style.pixel(style.clamp(cf.get(p).src)));
                    continue;
                }
                for (out, &acc) in px.iter_mut().zip(&sum) {
                    *out = ((acc + n / 2) / n) as u8;
                }
            }
        });
    Raster::new(cf.width(), cf.height(), ch, data)
}

/// Integral images counting offset changes between horizontal and vertical
/// neighbour pairs.
struct SeamCounts {
    stride: usize,
    horizontal: Vec<u32>,
    vertical: Vec<u32>,
}

impl SeamCounts {
    fn new(cf: &CoordField) -> Self {
        let (w, h) = cf.dimensions();
        let stride = w + 1;
        let mut horizontal = vec![0u32; stride * (h + 1)];
        let mut vertical = vec![0u32; stride * (h + 1)];
        for y in 0..h {
            let mut run_h = 0;
            let mut run_v = 0;
            for x in 0..w {
                let i = y * w + x;
                run_h += (x + 1 < w && cf.offset(i) != cf.offset(i + 1)) as u32;
                run_v += (y + 1 < h && cf.offset(i) != cf.offset(i + w)) as u32;
                let o = (y + 1) * stride + x + 1;
                horizontal[o] = horizontal[o - stride] + run_h;
                vertical[o] = vertical[o - stride] + run_v;
            }
        }
        Self {
            stride,
            horizontal,
            vertical,
        }
    }

    fn sum(table: &[u32], stride: usize, x0: i32, y0: i32, x1: i32, y1: i32) -> u32 {
        if x1 < x0 || y1 < y0 {
            return 0;
        }
        let at = |x: i32, y: i32| table[y as usize * stride + x as usize];
        at(x1 + 1, y1 + 1) + at(x0, y0) - at(x0, y1 + 1) - at(x1 + 1, y0)
    }

    /// Whether any neighbouring pair inside the inclusive box differs.
    fn any(&self, x0: i32, y0: i32, x1: i32, y1: i32) -> bool {
        // pair (x, x+1) is stored at x, pair (y, y+1) at y
        Self::sum(&self.horizontal, self.stride, x0, y0, x1 - 1, y1) > 0
            || Self::sum(&self.vertical, self.stride, x0, y0, x1, y1 - 1) > 0
    }
}
