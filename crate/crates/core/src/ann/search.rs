//! Exact segment search and lossless per-level aggregation.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::topology::AnnTopology;
use crate::corpus::{Corpus, GroupId, Item, ItemId};
use crate::error::{config_err, Error, Result};
use crate::math::cosine;

/// Cosine distance `1 − cos(query, embedding)`.
pub fn cosine_distance(query: &[f64], embedding: &[f64]) -> f64 {
    1.0 - cosine(query, embedding)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub id: ItemId,
    pub distance: f64,
    pub group: Option<GroupId>,
}

impl Neighbor {
    /// Ascending distance, ties by ascending id.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then_with(|| self.id.cmp(&other.id))
    }
}

/// Global top-`K` plus per-group top-`K_d` buckets.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BucketedCandidates {
    pub main: Vec<Neighbor>,
    /// One list per group, indexed by [`GroupId`].
    pub buckets: Vec<Vec<Neighbor>>,
}

impl BucketedCandidates {
    pub fn empty(num_groups: usize) -> Self {
        Self {
            main: Vec::new(),
            buckets: alloc::vec![Vec::new(); num_groups],
        }
    }

    /// Ids of `main` followed by bucket ids not yet seen, nearest first
    /// within each bucket.
    pub fn pool(&self) -> Vec<ItemId> {
        let mut seen = alloc::collections::BTreeSet::new();
        self.main
            .iter()
            .chain(self.buckets.iter().flatten())
            .filter(|n| seen.insert(n.id))
            .map(|n| n.id)
            .collect()
    }
}

/// Fills `main` (first `k`) and buckets (first `k_d` per group) from a list
/// sorted by [`Neighbor::rank_cmp`] with no duplicate ids.
fn take_top(
    sorted: impl IntoIterator<Item = Neighbor>,
    k: usize,
    k_d: usize,
    num_groups: usize,
) -> BucketedCandidates {
    let mut out = BucketedCandidates::empty(num_groups);
    let mut full_buckets = if k_d == 0 { num_groups } else { 0 };
    for n in sorted {
        if out.main.len() >= k && full_buckets == num_groups {
            break;
        }
        if out.main.len() < k {
            out.main.push(n);
        }
        if let Some(bucket) = n.group.and_then(|g| out.buckets.get_mut(g.index())) {
            if bucket.len() < k_d {
                bucket.push(n);
                if bucket.len() == k_d {
                    full_buckets += 1;
                }
            }
        }
    }
    out
}

/// Exact scan of one segment.
pub fn segment_search<'a>(
    items: impl IntoIterator<Item = &'a Item>,
    query: &[f64],
    k: usize,
    k_d: usize,
    num_groups: usize,
) -> BucketedCandidates {
    let mut out = BucketedCandidates::empty(num_groups);
    let mut all: Vec<Neighbor> = Vec::new();
    for item in items {
        let n = Neighbor {
            id: item.id,
            distance: cosine_distance(query, &item.embedding),
            group: item.group,
        };
        all.push(n);
        if k_d > 0 {
            if let Some(bucket) = n.group.and_then(|g| out.buckets.get_mut(g.index())) {
                bucket.push(n);
            }
        }
    }
    out.main = smallest(all, k);
    for bucket in &mut out.buckets {
        *bucket = smallest(core::mem::take(bucket), k_d);
    }
    out
}

/// The `k` smallest entries by [`Neighbor::rank_cmp`], sorted.
fn smallest(mut v: Vec<Neighbor>, k: usize) -> Vec<Neighbor> {
    if k == 0 {
        return Vec::new();
    }
    if v.len() > k {
        v.select_nth_unstable_by(k - 1, Neighbor::rank_cmp);
        v.truncate(k);
    }
    v.sort_unstable_by(Neighbor::rank_cmp);
    v
}

/// Merges child results into one level's top-`K` and per-group top-`K_d`.
///
/// Main draws on every child entry (main and buckets); each group bucket
/// draws on the children's buckets for that group plus group members found
/// in their mains. Output is independent of child order.
pub fn aggregate(
    children: &[BucketedCandidates],
    k: usize,
    k_d: usize,
    num_groups: usize,
) -> BucketedCandidates {
    let mut all: Vec<Neighbor> = children
        .iter()
        .flat_map(|c| c.main.iter().chain(c.buckets.iter().flatten()))
        .copied()
        .collect();
    all.sort_unstable_by(Neighbor::rank_cmp);
    all.dedup_by_key(|n| n.id);
    take_top(all, k, k_d, num_groups)
}

/// Scatter-gather search: segments → leaves → root, keeping per-group
/// buckets at every level.
pub fn bucketized_knn(
    corpus: &Corpus,
    topology: &AnnTopology,
    query: &[f64],
    k: usize,
    k_d: usize,
) -> Result<BucketedCandidates> {
    if query.len() != corpus.embedding_dim() {
        return Err(Error::Dimension {
            expected: corpus.embedding_dim(),
            got: query.len(),
        });
    }
    if topology.num_items() != corpus.len() {
        return Err(config_err("topology was built for a different corpus"));
    }
    let num_groups = corpus.spec().len();
    let items = corpus.items();
    let leaves: Vec<BucketedCandidates> = topology
        .leaves()
        .iter()
        .map(|segments| {
            let results: Vec<BucketedCandidates> = segments
                .iter()
                .map(|segment| {
                    segment_search(
                        segment.iter().map(|&i| &items[i]),
                        query,
                        k,
                        k_d,
                        num_groups,
                    )
                })
                .collect();
            aggregate(&results, k, k_d, num_groups)
        })
        .collect();
    Ok(aggregate(&leaves, k, k_d, num_groups))
}
