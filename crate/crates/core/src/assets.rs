//! Procedural test assets.
//!
//! Everything is generated from integer hashes and `sqrt`, so the same bytes
//! come out on every platform. Guides are produced in their 8-bit on-disk
//! encodings (RGB normal passes, RG coordinate maps, grayscale labels) and
//! decoded through the same path as loaded files.

use crate::guidance::{compose_guides, GuideField};
use crate::raster::Raster;
use crate::seeds::mix64;
use crate::{Result, Scalar};

/// Style exemplar with its source guide.
#[derive(Debug, Clone)]
pub struct StyleAsset<S> {
    pub style: Raster<u8>,
    pub guide: GuideField<S>,
}

/// A named 8-bit raster in its file encoding.
#[derive(Debug, Clone)]
pub struct EncodedAsset {
    pub name: String,
    pub raster: Raster<u8>,
}

const LIGHT: [f64; 3] = [-0.45, -0.55, 0.70];

fn to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Encodes a unit normal (or `None` for background) as RGB.
fn encode_normal(n: Option<[f64; 3]>) -> [u8; 3] {
    match n {
        Some([x, y, z]) => [
            to_u8((x + 1.0) / 2.0),
            to_u8((y + 1.0) / 2.0),
            to_u8((z + 1.0) / 2.0),
        ],
        // decodes to a back-facing vector, i.e. masked out
        None => [128, 128, 0],
    }
}

fn normalize([x, y, z]: [f64; 3]) -> [f64; 3] {
    let len = (x * x + y * y + z * z).sqrt();
    [x / len, y / len, z / len]
}

fn normal_map(size: usize, f: impl Fn(f64, f64) -> Option<[f64; 3]>) -> Raster<u8> {
    let s = size as f64;
    Raster::from_fn(size, size, 3, |x, y| {
        // pixel centre in [-1, 1], y pointing down the image
        let u = (x as f64 + 0.5) / s * 2.0 - 1.0;
        let v = (y as f64 + 0.5) / s * 2.0 - 1.0;
        encode_normal(f(u, v))
    })
    .expect("normal map shape")
}

fn sphere_at(u: f64, v: f64, cx: f64, cy: f64, r: f64) -> Option<[f64; 3]> {
    let (dx, dy) = ((u - cx) / r, (v - cy) / r);
    let rr = dx * dx + dy * dy;
    (rr <= 1.0).then(|| [dx, dy, (1.0 - rr).sqrt()])
}

/// Sphere filling most of the frame, viewed head-on.
pub fn sphere_normals(size: usize) -> Raster<u8> {
    placed_sphere_normals(size, (0.0, 0.0), 0.92)
}

/// Sphere centred at `center` with radius `radius`, both in the `[-1, 1]`
/// frame coordinates.
pub fn placed_sphere_normals(size: usize, center: (f64, f64), radius: f64) -> Raster<u8> {
    normal_map(size, move |u, v| {
        sphere_at(u, v, center.0, center.1, radius)
    })
}

/// Torus seen from above its axis.
pub fn torus_normals(size: usize) -> Raster<u8> {
    let (major, minor) = (0.58, 0.34);
    normal_map(size, |u, v| {
        let rho = (u * u + v * v).sqrt();
        let d = rho - major;
        if d.abs() > minor || rho == 0.0 {
            return None;
        }
        let z = (minor * minor - d * d).sqrt();
        Some(normalize([
            d / minor * u / rho,
            d / minor * v / rho,
            z / minor,
        ]))
    })
}

/// Smaller off-centre sphere: same orientation as the exemplar sphere but a
/// different placement and scale.
pub fn pebble_normals(size: usize) -> Raster<u8> {
    placed_sphere_normals(size, (0.2, 0.1), 0.6)
}

/// Height field of three smooth bumps, rotated in the image plane by the
/// rotation `(cos, sin)`.
pub fn blob_normals(size: usize, rotation: (f64, f64)) -> Raster<u8> {
    let (c, s) = rotation;
    let bumps = [
        (-0.35, -0.2, 0.45, 0.9),
        (0.3, 0.25, 0.5, 1.0),
        (0.1, -0.45, 0.3, 0.6),
    ];
    normal_map(size, move |u, v| {
        let (x, y) = (c * u + s * v, -s * u + c * v);
        // h = sum a * (1 - r^2/R^2)^2 inside each bump; gradient analytic
        let (mut gx, mut gy, mut covered) = (0.0, 0.0, false);
        for (bx, by, br, a) in bumps {
            let (dx, dy) = (x - bx, y - by);
            let q = 1.0 - (dx * dx + dy * dy) / (br * br);
            if q > 0.0 {
                covered = true;
                let k = a * 2.0 * q * (-2.0 / (br * br));
                gx += k * dx;
                gy += k * dy;
            }
        }
        if !covered {
            return None;
        }
        // rotate the gradient back into image axes
        let (ix, iy) = (c * gx - s * gy, s * gx + c * gy);
        Some(normalize([-ix, -iy, 1.0]))
    })
}

/// Target with a large constant-normal plate (left half) next to a small
/// sphere.
pub fn flat_normals(size: usize) -> Raster<u8> {
    let plate = normalize([0.25, -0.2, 1.0]);
    normal_map(size, move |u, v| {
        if u < 0.0 && v.abs() < 0.9 {
            Some(plate)
        } else {
            sphere_at(u, v, 0.5, 0.0, 0.45)
        }
    })
}

fn hash2(x: i64, y: i64, seed: u64) -> f64 {
    let h = mix64(seed ^ mix64((x as u64) ^ (y as u64).rotate_left(32)));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Smooth value noise in [0, 1].
fn value_noise(x: f64, y: f64, seed: u64) -> f64 {
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let s = |t: f64| t * t * (3.0 - 2.0 * t);
    let (sx, sy) = (s(fx), s(fy));
    let (ix, iy) = (x0 as i64, y0 as i64);
    let a = hash2(ix, iy, seed);
    let b = hash2(ix + 1, iy, seed);
    let c = hash2(ix, iy + 1, seed);
    let d = hash2(ix + 1, iy + 1, seed);
    let top = a + (b - a) * sx;
    let bottom = c + (d - c) * sx;
    top + (bottom - top) * sy
}

/// Anisotropic "brush stroke" noise along a fixed diagonal.
fn strokes(x: f64, y: f64, seed: u64) -> f64 {
    let (along, across) = (0.8 * x + 0.6 * y, -0.6 * x + 0.8 * y);
    let coarse = value_noise(along / 22.0, across / 2.5, seed);
    let fine = value_noise(along / 9.0, across / 1.3, seed ^ 0x55);
    0.65 * coarse + 0.35 * fine
}

fn lerp3(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [0, 1, 2].map(|i| a[i] + (b[i] - a[i]) * t)
}

fn paint(shade: f64, x: f64, y: f64, seed: u64) -> [u8; 3] {
    const DARK: [f64; 3] = [0.16, 0.14, 0.36];
    const MID: [f64; 3] = [0.78, 0.36, 0.22];
    const LIGHT_C: [f64; 3] = [0.98, 0.90, 0.62];
    let t = (shade + 0.35 * (strokes(x, y, seed) - 0.5)).clamp(0.0, 1.0);
    let c = if t < 0.5 {
        lerp3(DARK, MID, t * 2.0)
    } else {
        lerp3(MID, LIGHT_C, t * 2.0 - 1.0)
    };
    let grain = 0.06 * (hash2(x as i64, y as i64, seed ^ 0xA5) - 0.5);
    c.map(|v| to_u8(v + grain))
}

fn canvas(x: f64, y: f64, seed: u64) -> [u8; 3] {
    let g = 0.9 + 0.05 * value_noise(x / 6.0, y / 6.0, seed ^ 0x77);
    [to_u8(g), to_u8(g * 0.98), to_u8(g * 0.93)]
}

/// Hand-painted-looking lit sphere (a "matcap") for the given normal pass.
pub fn painted_sphere(normals: &Raster<u8>) -> Raster<u8> {
    let l = normalize(LIGHT);
    Raster::from_fn(normals.width(), normals.height(), 3, |x, y| {
        let px = normals.pixel_at(y * normals.width() + x);
        let n = [px[0], px[1], px[2]].map(|c| c as f64 / 255.0 * 2.0 - 1.0);
        let (fx, fy) = (x as f64, y as f64);
        if n[2] < 0.0 {
            return canvas(fx, fy, 3);
        }
        let n = normalize(n);
        let shade = (n[0] * l[0] + n[1] * l[1] + n[2] * l[2]).max(0.0);
        paint(shade, fx, fy, 3)
    })
    .expect("style shape")
}

/// RG texture-coordinate map: `f(x, y)` returns (u, v) in [0, 1].
fn coord_map(width: usize, height: usize, f: impl Fn(f64, f64) -> (f64, f64)) -> Raster<u8> {
    Raster::from_fn(width, height, 3, |x, y| {
        let s = x as f64 / (width - 1).max(1) as f64;
        let t = y as f64 / (height - 1).max(1) as f64;
        let (u, v) = f(s, t);
        [to_u8(u), to_u8(v), 0]
    })
    .expect("coordinate map shape")
}

/// Identity texture coordinates encoded as RG.
pub fn uv_identity_map(width: usize, height: usize) -> Raster<u8> {
    coord_map(width, height, |s, t| (s, t))
}

/// Smoothly warped unwrap of the identity parametrization, covering the
/// middle of the texture at a slightly larger scale.
pub fn uv_warped_map(width: usize, height: usize) -> Raster<u8> {
    coord_map(width, height, |s, t| {
        let u = 0.12 + 0.76 * s + 0.08 * s * (1.0 - s) * (2.0 * t - 1.0);
        let v = 0.1 + 0.8 * t + 0.1 * t * (1.0 - t) * (1.0 - 2.0 * s);
        (u, v)
    })
}

/// Painted texture for the UV scenario.
pub fn uv_painting(width: usize, height: usize) -> Raster<u8> {
    Raster::from_fn(width, height, 3, |x, y| {
        let (fx, fy) = (x as f64, y as f64);
        let shade = value_noise(fx / 40.0, fy / 40.0, 11);
        paint(shade, fx, fy, 17)
    })
    .expect("style shape")
}

fn displacement(s: f64, t: f64) -> (f64, f64) {
    // smooth, small, non-rigid warp (a cheek-puff/jaw-shift style field)
    let dx = 0.06 * (t - 0.5) * (1.0 - (2.0 * s - 1.0) * (2.0 * s - 1.0));
    let dy = 0.05 * s * (1.0 - s) * (2.0 * t - 1.0) * (2.0 * t - 1.0) * 4.0 - 0.02;
    (s + dx, t + dy)
}

fn face_label(s: f64, t: f64) -> u8 {
    let (ex, ey) = ((s - 0.5) / 0.3, (t - 0.55) / 0.38);
    if ex * ex + ey * ey <= 1.0 {
        2 // face
    } else if t < 0.35 {
        1 // hair
    } else {
        0 // background
    }
}

fn face_shade(s: f64, t: f64) -> f64 {
    let (ex, ey) = ((s - 0.5) / 0.3, (t - 0.55) / 0.38);
    (1.0 - (ex * ex + ey * ey)).clamp(0.0, 1.0).sqrt() * 0.8 + 0.1
}

/// Portrait-style scenario: identity source coordinates, a displaced
/// target, matching segmentation labels and a grayscale appearance guide.
pub fn face_assets(size: usize) -> Vec<EncodedAsset> {
    let n = (size - 1).max(1) as f64;
    let style = Raster::from_fn(size, size, 3, |x, y| {
        let (s, t) = (x as f64 / n, y as f64 / n);
        let (fx, fy) = (x as f64, y as f64);
        match face_label(s, t) {
            2 => paint(face_shade(s, t), fx, fy, 23),
            1 => paint(0.15 + 0.2 * value_noise(fx / 9.0, fy / 30.0, 5), fx, fy, 29),
            _ => canvas(fx, fy, 31),
        }
    })
    .expect("style shape");
    let seg = |f: &dyn Fn(f64, f64) -> (f64, f64)| {
        Raster::from_fn(size, size, 1, |x, y| {
            let (s, t) = f(x as f64 / n, y as f64 / n);
            [face_label(s, t) * 100]
        })
        .expect("label shape")
    };
    let app = |f: &dyn Fn(f64, f64) -> (f64, f64)| {
        Raster::from_fn(size, size, 1, |x, y| {
            let (s, t) = f(x as f64 / n, y as f64 / n);
            [to_u8(face_shade(s, t))]
        })
        .expect("appearance shape")
    };
    let id = |s: f64, t: f64| (s, t);
    vec![
        EncodedAsset {
            name: "face_style".into(),
            raster: style,
        },
        EncodedAsset {
            name: "face_source_disp".into(),
            raster: coord_map(size, size, id),
        },
        EncodedAsset {
            name: "face_target_disp".into(),
            raster: coord_map(size, size, displacement),
        },
        EncodedAsset {
            name: "face_source_seg".into(),
            raster: seg(&id),
        },
        EncodedAsset {
            name: "face_target_seg".into(),
            raster: seg(&displacement),
        },
        EncodedAsset {
            name: "face_source_app".into(),
            raster: app(&id),
        },
        EncodedAsset {
            name: "face_target_app".into(),
            raster: app(&displacement),
        },
    ]
}

/// Rotation (cos, sin) for frame `i` of `n`. The half-angle tangent grows
/// linearly to `max_half_tan`, so no trigonometry is needed.
pub fn frame_rotation(i: usize, n: usize, max_half_tan: f64) -> (f64, f64) {
    let t = max_half_tan * i as f64 / n.max(1) as f64;
    ((1.0 - t * t) / (1.0 + t * t), 2.0 * t / (1.0 + t * t))
}

/// Every bundled asset at its default size, in file encoding.
pub fn bundled(size: usize, frames: usize) -> Vec<EncodedAsset> {
    let sphere = sphere_normals(size);
    let mut out = vec![
        EncodedAsset {
            name: "sphere_style".into(),
            raster: painted_sphere(&sphere),
        },
        EncodedAsset {
            name: "sphere_normals".into(),
            raster: sphere,
        },
        EncodedAsset {
            name: "torus_normals".into(),
            raster: torus_normals(size),
        },
        EncodedAsset {
            name: "pebble_normals".into(),
            raster: pebble_normals(size),
        },
        EncodedAsset {
            name: "blob_normals".into(),
            raster: blob_normals(size, (1.0, 0.0)),
        },
        EncodedAsset {
            name: "flat_normals".into(),
            raster: flat_normals(size),
        },
        EncodedAsset {
            name: "uv_style".into(),
            raster: uv_painting(size, size),
        },
        EncodedAsset {
            name: "uv_source".into(),
            raster: uv_identity_map(size, size),
        },
        EncodedAsset {
            name: "uv_target".into(),
            raster: uv_warped_map(size, size),
        },
    ];
    out.extend(face_assets(size));
    for i in 0..frames {
        out.push(EncodedAsset {
            name: format!("blob_frame_{i:02}"),
            raster: blob_normals(size, frame_rotation(i, frames, 0.2)),
        });
    }
    out
}

/// Decodes an RGB normal pass.
pub fn normal_guide<S: Scalar>(rgb: &Raster<u8>) -> Result<GuideField<S>> {
    GuideField::from_normals_rgb8(rgb.width(), rgb.height(), rgb.data())
}

/// Decodes the first two channels of an encoded coordinate map.
pub fn coord_guide<S: Scalar>(map: &Raster<u8>) -> Result<GuideField<S>> {
    let rg: Vec<u8> = map
        .data()
        .chunks_exact(map.channels())
        .flat_map(|p| [p[0], p[1]])
        .collect();
    GuideField::from_unorm8(map.width(), map.height(), 2, &rg)
}

/// Label guide from an 8-bit map; each pixel's channel bytes packed
/// big-endian form its label.
pub fn label_guide<S: Scalar>(map: &Raster<u8>) -> Result<GuideField<S>> {
    let labels = map.map(1, |px| {
        vec![px.iter().fold(0u32, |acc, &b| (acc << 8) | b as u32)]
    })?;
    GuideField::from_labels(labels)
}

/// Single-channel guide from the first channel of an 8-bit map.
pub fn gray_guide<S: Scalar>(map: &Raster<u8>) -> Result<GuideField<S>> {
    let gray: Vec<u8> = map
        .data()
        .chunks_exact(map.channels())
        .map(|p| p[0])
        .collect();
    GuideField::from_unorm8(map.width(), map.height(), 1, &gray)
}

/// Portrait scenario as guides: displacement, segmentation and appearance
/// (weighted by `appearance_weight`) composed per side.
pub fn face_scenario<S: Scalar>(
    size: usize,
    appearance_weight: S,
) -> (StyleAsset<S>, GuideField<S>) {
    let assets = face_assets(size);
    let get = |name: &str| {
        &assets
            .iter()
            .find(|a| a.name == name)
            .expect("face asset")
            .raster
    };
    let side = |which: &str| {
        let app = gray_guide(get(&format!("face_{which}_app")))
            .and_then(|g| g.scaled(appearance_weight))
            .expect("appearance guide");
        compose_guides(&[
            coord_guide(get(&format!("face_{which}_disp"))).expect("displacement guide"),
            label_guide(get(&format!("face_{which}_seg"))).expect("label guide"),
            app,
        ])
        .expect("composable guides")
    };
    (
        StyleAsset {
            style: get("face_style").clone(),
            guide: side("source"),
        },
        side("target"),
    )
}

/// Lit-sphere exemplar at `size` x `size`.
pub fn lit_sphere<S: Scalar>(size: usize) -> StyleAsset<S> {
    let normals = sphere_normals(size);
    StyleAsset {
        style: painted_sphere(&normals),
        guide: normal_guide(&normals).expect("valid normal pass"),
    }
}

/// Torus normal target.
pub fn torus_target<S: Scalar>(size: usize) -> GuideField<S> {
    normal_guide(&torus_normals(size)).expect("valid normal pass")
}

/// Off-centre sphere target.
pub fn pebble_target<S: Scalar>(size: usize) -> GuideField<S> {
    normal_guide(&pebble_normals(size)).expect("valid normal pass")
}

/// Blob normal target, unrotated.
pub fn blob_target<S: Scalar>(size: usize) -> GuideField<S> {
    normal_guide(&blob_normals(size, (1.0, 0.0))).expect("valid normal pass")
}

/// Target with a constant-normal plate over a quarter or more of the image.
pub fn flat_target<S: Scalar>(size: usize) -> GuideField<S> {
    normal_guide(&flat_normals(size)).expect("valid normal pass")
}

/// Texture-coordinate scenario: painting, identity source, warped target.
pub fn uv_pair<S: Scalar>(size: usize) -> (StyleAsset<S>, GuideField<S>) {
    let source = coord_guide(&uv_identity_map(size, size)).expect("valid map");
    let target = coord_guide(&uv_warped_map(size, size)).expect("valid map");
    (
        StyleAsset {
            style: uv_painting(size, size),
            guide: source,
        },
        target,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_center_faces_viewer() {
        let n = sphere_normals(65);
        assert_eq!(n.pixel_at(32 * 65 + 32), &[128, 128, 255]);
        assert_eq!(n.pixel_at(0), &[128, 128, 0]);
        let g = normal_guide::<f64>(&n).unwrap();
        assert!(g.is_masked_in(32 * 65 + 32));
        assert!(!g.is_masked_in(0));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = bundled(32, 2);
        let b = bundled(32, 2);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.raster, y.raster);
        }
    }

    #[test]
    fn flat_target_has_large_constant_region() {
        let g = flat_target::<f32>(64);
        let v = g.values_at(32 * 64 + 5).to_vec();
        let same = (0..g.raster().len())
            .filter(|&i| g.values_at(i) == v.as_slice())
            .count();
        assert!(same * 4 >= 64 * 64, "constant region covers {same} px");
    }

    #[test]
    fn torus_and_blob_have_background() {
        for g in [torus_target::<f32>(64), blob_target::<f32>(64)] {
            let m = g.masked_in_count();
            assert!(m > 500 && m < 64 * 64);
        }
    }

    #[test]
    fn face_scenario_composes_three_guides() {
        let (ex, target) = face_scenario::<f32>(32, 0.5);
        assert_eq!(ex.guide.channels(), 4);
        assert_eq!(ex.guide.weights(), &[1.0, 1.0, 0.0, 0.5]);
        assert!(ex.guide.labels().is_some() && target.labels().is_some());
        let labels: std::collections::BTreeSet<u32> =
            ex.guide.labels().unwrap().data().iter().copied().collect();
        assert_eq!(labels.into_iter().collect::<Vec<_>>(), vec![0, 100, 200]);
    }
}
