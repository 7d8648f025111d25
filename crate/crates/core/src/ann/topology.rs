use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{Corpus, ItemId};
use crate::error::{config_err, Result};

/// Root → `leaves` leaf nodes → `segments_per_leaf` segments each.
///
/// Items are sharded by a hash of their id, so placement ignores embedding
/// geometry and depends only on `(id, salt)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnTopology {
    leaves: usize,
    segments_per_leaf: usize,
    salt: u64,
    /// `[leaf][segment]` → corpus positions, ascending.
    shards: Vec<Vec<Vec<usize>>>,
    num_items: usize,
}

/// SplitMix64 finalizer.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl AnnTopology {
    pub fn new(corpus: &Corpus, leaves: usize, segments_per_leaf: usize) -> Result<Self> {
        Self::with_salt(corpus, leaves, segments_per_leaf, 0)
    }

    /// Like [`AnnTopology::new`] with a different id-to-segment assignment.
    pub fn with_salt(
        corpus: &Corpus,
        leaves: usize,
        segments_per_leaf: usize,
        salt: u64,
    ) -> Result<Self> {
        if leaves == 0 || segments_per_leaf == 0 {
            return Err(config_err(
                "topology needs at least one leaf and one segment per leaf",
            ));
        }
        let mut topology = Self {
            leaves,
            segments_per_leaf,
            salt,
            shards: vec![vec![Vec::new(); segments_per_leaf]; leaves],
            num_items: corpus.len(),
        };
        for (pos, item) in corpus.iter().enumerate() {
            let (leaf, segment) = topology.assignment(item.id);
            topology.shards[leaf][segment].push(pos);
        }
        Ok(topology)
    }

    /// `(leaf, segment)` holding `id`.
    pub fn assignment(&self, id: ItemId) -> (usize, usize) {
        let slot = (mix(id.0 ^ self.salt) % (self.leaves * self.segments_per_leaf) as u64) as usize;
        (slot / self.segments_per_leaf, slot % self.segments_per_leaf)
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves
    }

    pub fn segments_per_leaf(&self) -> usize {
        self.segments_per_leaf
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn leaves(&self) -> &[Vec<Vec<usize>>] {
        &self.shards
    }

    pub fn segment_sizes(&self) -> Vec<usize> {
        self.shards.iter().flatten().map(Vec::len).collect()
    }
}
