//! PNG reading and writing, including the 16-bit coordinate-field format.

use std::path::Path;

use chunkstyle::{CoordEntry, CoordField, PixelCoord, Raster};
use image::{DynamicImage, ImageBuffer, Luma, Rgb, Rgba};

use crate::error::{CliError, CliResult};

const MISS_BIT: u16 = 1 << 15;

fn read(path: &Path) -> CliResult<DynamicImage> {
    if !path.exists() {
        return Err(CliError::config(format!(
            "{}: no such file",
            path.display()
        )));
    }
    image::open(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Loads an 8-bit image, keeping gray, RGB or RGBA layout. Other formats are
/// converted to RGB (or RGBA when they carry alpha).
pub fn read_u8(path: &Path) -> CliResult<Raster<u8>> {
    let img = read(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (channels, data) = match img {
        DynamicImage::ImageLuma8(b) => (1, b.into_raw()),
        DynamicImage::ImageRgb8(b) => (3, b.into_raw()),
        DynamicImage::ImageRgba8(b) => (4, b.into_raw()),
        other if other.color().has_alpha() => (4, other.to_rgba8().into_raw()),
        other => (3, other.to_rgb8().into_raw()),
    };
    Raster::new(w, h, channels, data)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn write_image(img: DynamicImage, path: &Path) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("{}: {e}", dir.display())))?;
    }
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

pub fn write_u8(raster: &Raster<u8>, path: &Path) -> CliResult<()> {
    let (w, h) = (raster.width() as u32, raster.height() as u32);
    let data = raster.data().to_vec();
    let img = match raster.channels() {
        1 => ImageBuffer::<Luma<u8>, _>::from_raw(w, h, data).map(DynamicImage::ImageLuma8),
        3 => ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, data).map(DynamicImage::ImageRgb8),
        4 => ImageBuffer::<Rgba<u8>, _>::from_raw(w, h, data).map(DynamicImage::ImageRgba8),
        n => return Err(CliError::runtime(format!("cannot write a {n}-channel PNG"))),
    };
    write_image(img.expect("buffer size matches raster"), path)
}

/// Writes a coordinate field as 16-bit RGB: R = source x, G = source y,
/// B = level, with bit 15 of B set for fallback pixels.
pub fn write_coords(cf: &CoordField, path: &Path) -> CliResult<()> {
    let mut data = Vec::with_capacity(cf.len() * 3);
    for e in cf.entries() {
        let coord = |v: i32| {
            u16::try_from(v).map_err(|_| {
                CliError::runtime(format!("source coordinate {v} does not fit 16 bits"))
            })
        };
        data.extend([
            coord(e.src.x)?,
            coord(e.src.y)?,
            e.level as u16 | if e.miss { MISS_BIT } else { 0 },
        ]);
    }
    let img = ImageBuffer::<Rgb<u16>, _>::from_raw(cf.width() as u32, cf.height() as u32, data)
        .expect("buffer size matches field");
    write_image(DynamicImage::ImageRgb16(img), path)
}

pub fn read_coords(path: &Path) -> CliResult<CoordField> {
    let img = match read(path)? {
        DynamicImage::ImageRgb16(b) => b,
        _ => {
            return Err(CliError::config(format!(
                "{}: not a 16-bit RGB coordinate map",
                path.display()
            )))
        }
    };
    let (w, h) = (img.width() as usize, img.height() as usize);
    let entries = img
        .into_raw()
        .chunks_exact(3)
        .map(|px| CoordEntry {
            src: PixelCoord::new(px[0] as i32, px[1] as i32),
            level: (px[2] & !MISS_BIT) as u8,
            miss: px[2] & MISS_BIT != 0,
        })
        .collect();
    CoordField::new(w, h, entries).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}
