use rayon::prelude::*;

use super::{synthesize, Exemplar, Synthesis, SynthesisParams};
use crate::guidance::GuideField;
use crate::seeds::JitterTable;
use crate::{Error, Result, Scalar};

/// Stylizes a sequence of target guides. With `reseed`, frame `i` uses a
/// jitter seed derived from `(params.rng_seed, i)`, which perturbs the chunk
/// mosaic from frame to frame; without it every frame uses the same seed.
/// Frames are independent and run in parallel.
pub fn animate<S: Scalar>(
    exemplar: &Exemplar<S>,
    frames: &[GuideField<S>],
    params: &SynthesisParams<S>,
    reseed: bool,
) -> Result<Vec<Synthesis>> {
    if let Some(first) = frames.first() {
        if let Some(bad) = frames.iter().find(|f| f.dimensions() != first.dimensions()) {
            return Err(Error::DimensionMismatch {
                expected: first.dimensions(),
                actual: bad.dimensions(),
            });
        }
    }
    frames
        .par_iter()
        .enumerate()
        .map(|(i, frame)| {
            let mut p = params.clone();
            if reseed {
                p.rng_seed = JitterTable::new(params.rng_seed)
                    .for_frame(i as u64)
                    .rng_seed;
            }
            synthesize(exemplar, frame, &p)
        })
        .collect()
}
