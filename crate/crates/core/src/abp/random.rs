//! Seeded random branching programs for testing.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Abp, Edge, Node};
use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::VariablePartition;
use crate::error::Result;

/// A random program over `support` with at most `max_width` nodes per
/// inner layer. With `single_order` every layer reads the same bucket
/// order, which gives a read-once oblivious program.
///
/// Fails only if every source-to-sink path cancels.
pub fn random_abp<F: Scalar, R: Rng>(
    rng: &mut R,
    partition: &VariablePartition,
    support: IndexSet,
    max_width: usize,
    single_order: bool,
) -> Result<Abp<F>> {
    let d = support.len();
    let buckets = support.to_vec();
    let mut order = buckets.clone();
    order.shuffle(rng);
    let mut nodes = vec![Node {
        layer: 0,
        index_set: IndexSet::EMPTY,
    }];
    let mut layers = vec![vec![0usize]];
    let mut edges = Vec::new();
    for k in 1..=d {
        let width = if k == d {
            1
        } else {
            rng.gen_range(1..=max_width)
        };
        let mut layer = Vec::with_capacity(width);
        for _ in 0..width {
            let set = if k == d {
                support
            } else if single_order {
                order[..k].iter().copied().collect()
            } else {
                let parent = nodes[*layers[k - 1].choose(rng).unwrap()].index_set;
                let free: Vec<u32> = buckets
                    .iter()
                    .copied()
                    .filter(|&b| !parent.contains(b))
                    .collect();
                parent.union(IndexSet::singleton(*free.choose(rng).unwrap()))
            };
            let id = nodes.len();
            nodes.push(Node {
                layer: k,
                index_set: set,
            });
            layer.push(id);
            let tails: Vec<usize> = layers[k - 1]
                .iter()
                .copied()
                .filter(|&t| {
                    let s = nodes[t].index_set;
                    s.is_subset(set) && set.difference(s).len() == 1
                })
                .collect();
            let forced = *tails.choose(rng).expect("some tail precedes every node");
            for t in tails {
                if t == forced || rng.gen_bool(0.5) {
                    let bucket = set.difference(nodes[t].index_set).min().unwrap();
                    edges.push(Edge::new(
                        t,
                        id,
                        bucket,
                        random_form(rng, partition, bucket),
                    ));
                }
            }
        }
        layers.push(layer);
    }
    let sink = nodes.len() - 1;
    Abp::normalized(partition.clone(), nodes, edges, 0, sink)
}

fn random_form<F: Scalar, R: Rng>(
    rng: &mut R,
    partition: &VariablePartition,
    bucket: u32,
) -> BTreeMap<u32, F> {
    let n = partition.bucket_size(bucket).unwrap();
    let choices = [-2i64, -1, 1, 1, 2, 3];
    let mut form = BTreeMap::new();
    while form.is_empty() {
        for j in 1..=n {
            if rng.gen_bool(0.6) {
                form.insert(j, F::from_int(*choices.choose(rng).unwrap()));
            }
        }
    }
    form
}
