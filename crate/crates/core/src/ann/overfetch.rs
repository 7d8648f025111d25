//! Overfetch-and-Rerank: widen the neighbourhood until every group has a
//! minimum number of candidates, then round-robin back down to `K`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::search::{bucketized_knn, Neighbor};
use super::topology::AnnTopology;
use crate::corpus::{Corpus, ItemId};
use crate::error::{config_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverfetchConfig {
    /// Requested result size `K`.
    pub k: usize,
    /// Minimum candidates per group before expansion stops.
    pub k_min: usize,
    /// Expansion cap; `K' ≤ K_max`.
    pub k_max: usize,
    /// Geometric growth factor of `K'` per round.
    pub growth: f64,
}

impl OverfetchConfig {
    /// `K_max = 2K`, doubling schedule.
    pub fn new(k: usize, k_min: usize) -> Self {
        Self {
            k,
            k_min,
            k_max: 2 * k,
            growth: 2.0,
        }
    }

    pub fn validate(&self, num_groups: usize) -> Result<()> {
        if self.k == 0 {
            return Err(config_err("overfetch k must be positive"));
        }
        if self.k > self.k_max {
            return Err(config_err("overfetch requires k <= k_max"));
        }
        if self.k_min * num_groups > self.k_max {
            return Err(config_err("overfetch requires k_min * |groups| <= k_max"));
        }
        if !(self.growth > 1.0 && self.growth.is_finite()) {
            return Err(config_err("overfetch growth must be a finite factor > 1"));
        }
        Ok(())
    }

    /// Next `K'` after `current` in the expansion schedule.
    pub fn next_size(&self, current: usize) -> usize {
        let grown = libm::ceil(self.growth * current as f64) as usize;
        grown.max(current + 1).min(self.k_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverfetchOutcome {
    /// Selected ids in round-robin order, at most `K`.
    pub ids: Vec<ItemId>,
    /// Every `K'` that was fetched, in order.
    pub schedule: Vec<usize>,
    /// The final over-fetched candidate set, nearest first.
    pub fetched: Vec<Neighbor>,
}

impl OverfetchOutcome {
    pub fn final_size(&self) -> usize {
        self.schedule.last().copied().unwrap_or(0)
    }
}

fn group_counts(fetched: &[Neighbor], num_groups: usize) -> Vec<usize> {
    let mut counts = vec![0; num_groups];
    for n in fetched {
        if let Some(c) = n.group.and_then(|g| counts.get_mut(g.index())) {
            *c += 1;
        }
    }
    counts
}

pub fn overfetch_and_rerank(
    corpus: &Corpus,
    topology: &AnnTopology,
    query: &[f64],
    cfg: &OverfetchConfig,
) -> Result<OverfetchOutcome> {
    let num_groups = corpus.spec().len();
    cfg.validate(num_groups)?;
    let mut size = cfg.k;
    let mut schedule = Vec::new();
    let fetched = loop {
        schedule.push(size);
        let fetched = bucketized_knn(corpus, topology, query, size, 0)?.main;
        let satisfied = group_counts(&fetched, num_groups)
            .iter()
            .all(|&c| c >= cfg.k_min);
        if satisfied || size >= cfg.k_max {
            break fetched;
        }
        size = cfg.next_size(size);
    };
    Ok(OverfetchOutcome {
        ids: round_robin_select(&fetched, num_groups, cfg.k),
        schedule,
        fetched,
    })
}

/// Round-robin over groups in ascending ordinal order, starting at the
/// nearest candidate's group; group-less candidates form a final
/// pseudo-group. Nearest first within each group.
pub fn round_robin_select(fetched: &[Neighbor], num_groups: usize, k: usize) -> Vec<ItemId> {
    let slot = |n: &Neighbor| n.group.map_or(num_groups, |g| g.index().min(num_groups));
    let mut queues: Vec<VecDeque<ItemId>> = vec![VecDeque::new(); num_groups + 1];
    for n in fetched {
        queues[slot(n)].push_back(n.id);
    }
    let Some(first) = fetched.first() else {
        return Vec::new();
    };
    let start = slot(first);
    let mut cycle: Vec<usize> = (start..=num_groups).chain(0..start).collect();
    let mut out = Vec::with_capacity(k.min(fetched.len()));
    let mut pos = 0;
    while out.len() < k && !cycle.is_empty() {
        if let Some(id) = queues[cycle[pos]].pop_front() {
            out.push(id);
            pos += 1;
        } else {
            cycle.remove(pos);
        }
        if pos >= cycle.len() {
            pos = 0;
        }
    }
    out
}
