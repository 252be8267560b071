//! Exact nearest-guide search over weighted channels.

use crate::raster::weighted_l2;
use crate::Scalar;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq)]
enum Node<S> {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: S,
        left: usize,
        right: usize,
    },
}

/// k-d tree returning the argmin of the weighted guide distance, ties broken
/// by the smaller source index (row-major scan order).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct KdTree<S> {
    channels: usize,
    weights: Vec<S>,
    ids: Vec<u32>,
    // point values in `ids` order, `channels` per point
    values: Vec<S>,
    nodes: Vec<Node<S>>,
}

impl<S: Scalar> KdTree<S> {
    pub(crate) fn build<'a, F>(
        channels: usize,
        weights: &[S],
        candidates: &[u32],
        values: F,
    ) -> Self
    where
        F: Fn(u32) -> &'a [S],
    {
        let mut ids = candidates.to_vec();
        let mut nodes = Vec::new();
        build_node(&mut ids, 0, channels, weights, &values, &mut nodes);
        let values = ids
            .iter()
            .flat_map(|&i| values(i).iter().copied())
            .collect();
        Self {
            channels,
            weights: weights.to_vec(),
            ids,
            values,
            nodes,
        }
    }

    pub(crate) fn nearest(&self, query: &[S]) -> u32 {
        let mut best = (S::infinity(), u32::MAX);
        self.search(0, query, &mut best);
        best.1
    }

    fn search(&self, node: usize, query: &[S], best: &mut (S, u32)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for k in start..end {
                    let v = &self.values[k * self.channels..(k + 1) * self.channels];
                    let d = weighted_l2(query, v, &self.weights);
                    let id = self.ids[k];
                    if d < best.0 || (d == best.0 && id < best.1) {
                        *best = (d, id);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < S::zero() {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, query, best);
                let bound = (self.weights[axis] * diff * diff).sqrt();
                // Slack absorbs rounding between the one-axis bound and the
                // full distance so equal-distance ties are never pruned.
                let slack = best.0 * S::epsilon() * S::from_u8(16).unwrap();
                if bound <= best.0 + slack {
                    self.search(far, query, best);
                }
            }
        }
    }
}

fn build_node<'a, S: Scalar, F: Fn(u32) -> &'a [S]>(
    ids: &mut [u32],
    offset: usize,
    channels: usize,
    weights: &[S],
    values: &F,
    nodes: &mut Vec<Node<S>>,
) -> usize {
    let me = nodes.len();
    nodes.push(Node::Leaf {
        start: offset,
        end: offset + ids.len(),
    });
    if ids.len() <= LEAF_SIZE {
        return me;
    }
    // split the weighted axis with the widest spread
    let mut axis = None;
    let mut widest = S::zero();
    for (c, &w) in weights.iter().enumerate().take(channels) {
        if w <= S::zero() {
            continue;
        }
        let (lo, hi) = ids
            .iter()
            .fold((S::infinity(), S::neg_infinity()), |(lo, hi), &i| {
                let v = values(i)[c];
                (lo.min(v), hi.max(v))
            });
        let spread = (hi - lo) * w.sqrt();
        if spread > widest {
            widest = spread;
            axis = Some(c);
        }
    }
    let Some(axis) = axis else {
        return me;
    };
    ids.sort_unstable_by(|&a, &b| {
        values(a)[axis]
            .partial_cmp(&values(b)[axis])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mid = ids.len() / 2;
    let value = values(ids[mid])[axis];
    let (lo, hi) = ids.split_at_mut(mid);
    let left = build_node(lo, offset, channels, weights, values, nodes);
    let right = build_node(hi, offset + mid, channels, weights, values, nodes);
    nodes[me] = Node::Split {
        axis,
        value,
        left,
        right,
    };
    me
}
