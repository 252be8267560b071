use std::collections::BTreeMap;

use super::kdtree::KdTree;
use super::table::QuantTable;
use super::GuideField;
use crate::raster::{GuideVector, PixelCoord};
use crate::{Error, Result, Scalar};

/// Default quantized-table resolution: one bin per 8-bit guide value.
pub const DEFAULT_TABLE_RESOLUTION: usize = 256;

/// Retrieval strategy for nearest-guide queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Quantized 2D table over exactly two weighted channels. Constant-time
    /// queries, approximate to the bin size.
    Table { resolution: usize },
    /// Exact argmin over any number of channels (k-d tree).
    Exact,
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Table {
            resolution: DEFAULT_TABLE_RESOLUTION,
        }
    }
}

impl Backend {
    /// The default table when the guide has exactly two weighted channels,
    /// exact search otherwise.
    pub fn for_guide<S: Scalar>(guide: &GuideField<S>) -> Self {
        let weighted = guide.weights().iter().filter(|&&w| w > S::zero()).count();
        if weighted == 2 {
            Backend::default()
        } else {
            Backend::Exact
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Index<S> {
    Table {
        channels: [usize; 2],
        table: QuantTable,
    },
    Exact(KdTree<S>),
}

impl<S: Scalar> Index<S> {
    #[inline]
    fn nearest(&self, values: &[S]) -> u32 {
        match self {
            Index::Table { channels, table } => table.get(values[channels[0]], values[channels[1]]),
            Index::Exact(tree) => tree.nearest(values),
        }
    }
}

/// Answers "which source pixel has the guide nearest to `g`" for a fixed
/// source guide. Labeled sources get one index per label plus an
/// unrestricted index.
#[derive(Debug, Clone, PartialEq)]
pub struct GuideLookup<S> {
    backend: Backend,
    channels: usize,
    source_width: usize,
    any: Index<S>,
    by_label: Option<BTreeMap<u32, Index<S>>>,
}

/// Builds the retrieval structure for a source guide.
pub fn build_lookup<S: Scalar>(source: &GuideField<S>, backend: Backend) -> Result<GuideLookup<S>> {
    let candidates: Vec<u32> = (0..source.raster().len() as u32)
        .filter(|&i| source.is_masked_in(i as usize))
        .collect();
    if candidates.is_empty() {
        return Err(Error::EmptyExemplar);
    }
    type MakeIndex<'a, T> = Box<dyn Fn(&[u32]) -> Index<T> + 'a>;
    let make: MakeIndex<'_, S> = match backend {
        Backend::Table { resolution } => {
            if resolution == 0 {
                return Err(Error::InvalidParams(
                    "table resolution must be positive".into(),
                ));
            }
            let weighted: Vec<usize> = (0..source.channels())
                .filter(|&c| source.weights()[c] > S::zero())
                .collect();
            let &[c0, c1] = weighted.as_slice() else {
                return Err(Error::InvalidParams(format!(
                    "table backend needs exactly 2 weighted channels, guide has {}",
                    weighted.len()
                )));
            };
            let weights = [source.weights()[c0], source.weights()[c1]];
            Box::new(move |ids| {
                let table = QuantTable::build(resolution, ids, weights, |i| {
                    let v = source.values_at(i as usize);
                    [v[c0], v[c1]]
                });
                Index::Table {
                    channels: [c0, c1],
                    table,
                }
            })
        }
        Backend::Exact => Box::new(|ids| {
            Index::Exact(KdTree::build(
                source.channels(),
                source.weights(),
                ids,
                |i| source.values_at(i as usize),
            ))
        }),
    };

    let by_label = source.labels().map(|labels| {
        let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &i in &candidates {
            groups.entry(labels.data()[i as usize]).or_default().push(i);
        }
        groups
            .into_iter()
            .map(|(label, ids)| (label, make(&ids)))
            .collect()
    });
    Ok(GuideLookup {
        backend,
        channels: source.channels(),
        source_width: source.width(),
        any: make(&candidates),
        by_label,
    })
}

impl<S: Scalar> GuideLookup<S> {
    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    fn coord(&self, index: u32) -> PixelCoord {
        let i = index as usize;
        PixelCoord::new(
            (i % self.source_width) as i32,
            (i / self.source_width) as i32,
        )
    }

    /// Nearest source pixel among those compatible with `label`. Returns
    /// `None` when the source is labeled and no pixel carries `label`.
    /// `values` must have [`Self::channels`] entries.
    #[inline]
    pub fn nearest(&self, values: &[S], label: Option<u32>) -> Option<PixelCoord> {
        match (&self.by_label, label) {
            (Some(map), Some(l)) => map.get(&l).map(|idx| self.coord(idx.nearest(values))),
            _ => Some(self.coord(self.any.nearest(values))),
        }
    }

    /// Nearest source pixel ignoring hard labels.
    #[inline]
    pub fn nearest_any(&self, values: &[S]) -> PixelCoord {
        self.coord(self.any.nearest(values))
    }
}

/// Checked query: `Ok(None)` is the no-match sentinel for a label absent
/// from the source.
pub fn lookup_nearest<S: Scalar>(
    lut: &GuideLookup<S>,
    g: &GuideVector<S>,
) -> Result<Option<PixelCoord>> {
    if g.channels() != lut.channels {
        return Err(Error::ChannelMismatch {
            expected: lut.channels,
            actual: g.channels(),
        });
    }
    Ok(lut.nearest(&g.values, g.label))
}
