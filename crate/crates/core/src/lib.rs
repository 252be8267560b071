//! Guided example-based style transfer.
//!
//! A target image is stylized by copying chunks of a style exemplar. Each
//! chunk is a translated copy of an exemplar region whose guidance (normals,
//! texture coordinates, displacement, ...) agrees with the target guidance
//! within a threshold. Two synthesizers are provided: a sequential
//! brute-force reference ([`blit_bruteforce`]) and a per-pixel parallel
//! kernel driven by an implicit jittered seed hierarchy ([`synthesize`]).
//!
//! All guidance math is generic over the scalar type ([`Scalar`], implemented
//! for `f32` and `f64`); the aliases at the bottom of this module name the
//! common instantiations.

#![forbid(unsafe_code)]
// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assets;
pub mod bench;
pub mod chunks;
pub mod error;
pub mod guidance;
pub mod raster;
pub mod seeds;
pub mod synth;

use std::fmt::Debug;

pub use chunks::{label_chunks, verify_error_bound, ChunkLabels, ChunkStats, ErrorBoundReport};
pub use error::{Error, Result};
pub use guidance::{
    build_lookup, compose_guides, decode_normal, lookup_nearest, Backend, GuideField, GuideLookup,
    DEFAULT_TABLE_RESOLUTION,
};
pub use raster::{guide_distance, in_bounds, GuideVector, PixelCoord, Raster, MAX_CHANNELS};
pub use seeds::{nearest_seed, seed_point, HierarchyParams, Jitter, JitterTable};
pub use synth::{
    animate, blit_bruteforce, blit_pixel, resolve_colors, synthesize, synthesize_coords,
    synthesize_coords_observed, vote, CoordEntry, CoordField, Exemplar, Resolve, Synthesis,
    SynthesisParams, DEFAULT_PATCH_RADIUS, DEFAULT_THRESHOLD,
};

/// Scalar type used for guidance channels, weights and thresholds.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + Default + Debug + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub type GuideField32 = GuideField<f32>;
pub type GuideField64 = GuideField<f64>;
pub type GuideLookup32 = GuideLookup<f32>;
pub type GuideLookup64 = GuideLookup<f64>;
pub type Exemplar32 = Exemplar<f32>;
pub type Exemplar64 = Exemplar<f64>;
pub type SynthesisParams32 = SynthesisParams<f32>;
pub type SynthesisParams64 = SynthesisParams<f64>;
