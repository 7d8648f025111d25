//! Round-Robin re-ranking over per-group sub-lists.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{DiversitySpec, GroupId};
use crate::error::{config_err, Result};
use crate::ranking::RankedList;

/// What to do once a group's sub-list runs out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExhaustionPolicy {
    /// Drop the exhausted group from the cycle.
    #[default]
    Skip,
    /// Merge the remaining sub-lists pairwise by ordinal adjacency
    /// (d1∪d2, d3∪d4, ...) and alternate between the merged lists.
    MergeAdjacent,
}

/// How entries without a group take part in Round-Robin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrouplessPolicy {
    /// Keep them at their original position.
    #[default]
    KeepPosition,
    /// Assign each one a uniformly random group for sub-list construction.
    RandomAssign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoundRobinConfig {
    /// Entries with utility below this keep their original position.
    pub score_threshold: f64,
    /// Shuffle the picks within consecutive windows of |𝒟| positions.
    pub randomize_window: bool,
    pub exhaustion_policy: ExhaustionPolicy,
    pub groupless_policy: GrouplessPolicy,
    pub rng_seed: u64,
}

impl Default for RoundRobinConfig {
    fn default() -> Self {
        Self {
            score_threshold: 0.0,
            randomize_window: false,
            exhaustion_policy: ExhaustionPolicy::Skip,
            groupless_policy: GrouplessPolicy::KeepPosition,
            rng_seed: 0,
        }
    }
}

impl RoundRobinConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.score_threshold) {
            return Err(config_err("round-robin score_threshold must be in [0, 1]"));
        }
        Ok(())
    }
}

/// Re-ranks a utility-sorted list by cycling through per-group sub-lists.
///
/// Sub-lists hold the group-bearing entries at or above the score threshold,
/// in rank order. The cycle visits groups in the order their first eligible
/// entry appears, so the top entry keeps position 1. Entries left out of the
/// sub-lists stay at their absolute positions; the cycle's picks fill the
/// remaining positions in order.
pub fn round_robin(
    ranking: &RankedList,
    spec: &DiversitySpec,
    cfg: &RoundRobinConfig,
) -> RankedList {
    let num_groups = spec.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let groups: Vec<Option<GroupId>> = ranking
        .entries
        .iter()
        .map(|e| match (e.group, cfg.groupless_policy) {
            (Some(g), _) => Some(g),
            (None, GrouplessPolicy::RandomAssign) if num_groups > 0 => {
                Some(GroupId::from(rng.random_range(0..num_groups)))
            }
            (None, _) => None,
        })
        .collect();

    let mut sublists: Vec<VecDeque<usize>> = vec![VecDeque::new(); num_groups];
    let mut cycle: Vec<usize> = Vec::new();
    let mut slots: Vec<usize> = Vec::new();
    for (i, (entry, group)) in ranking.entries.iter().zip(&groups).enumerate() {
        let Some(g) = group.map(GroupId::index).filter(|&g| g < num_groups) else {
            continue;
        };
        if entry.utility < cfg.score_threshold {
            continue;
        }
        if sublists[g].is_empty() && !cycle.contains(&g) {
            cycle.push(g);
        }
        sublists[g].push_back(i);
        slots.push(i);
    }

    let mut picks = cycle_picks(sublists, cycle, cfg.exhaustion_policy);
    debug_assert_eq!(picks.len(), slots.len());

    if cfg.randomize_window && num_groups > 1 {
        for (w, window) in picks.chunks_mut(num_groups).enumerate() {
            // The first pick stays put so position 1 is unchanged.
            let window = if w == 0 { &mut window[1..] } else { window };
            window.shuffle(&mut rng);
        }
    }

    let mut entries = ranking.entries.clone();
    for (&slot, &pick) in slots.iter().zip(&picks) {
        entries[slot] = ranking.entries[pick];
    }
    RankedList::new(ranking.query_id.clone(), entries)
}

/// Runs the cycle and returns the picked entry indices in output order.
fn cycle_picks(
    mut sublists: Vec<VecDeque<usize>>,
    mut cycle: Vec<usize>,
    policy: ExhaustionPolicy,
) -> Vec<usize> {
    let total: usize = sublists.iter().map(VecDeque::len).sum();
    let mut picks = Vec::with_capacity(total);
    let mut pos = 0;
    while !cycle.is_empty() {
        let g = cycle[pos];
        if let Some(i) = sublists[g].pop_front() {
            picks.push(i);
            pos += 1;
        } else if policy == ExhaustionPolicy::MergeAdjacent && picks.len() < total {
            let (merged, start) = merge_adjacent(&mut sublists, g);
            picks.extend(alternate(merged, start));
            break;
        } else {
            cycle.remove(pos);
        }
        if pos >= cycle.len() {
            pos = 0;
        }
    }
    picks
}

/// Merges the remaining sub-lists into pairs (2p, 2p+1) and returns them
/// with the index of the pair holding `exhausted`, where alternation resumes.
fn merge_adjacent(
    sublists: &mut [VecDeque<usize>],
    exhausted: usize,
) -> (Vec<VecDeque<usize>>, usize) {
    let pairs = sublists.len().div_ceil(2);
    let mut merged = Vec::with_capacity(pairs);
    for p in 0..pairs {
        let mut both: Vec<usize> = sublists[2 * p].drain(..).collect();
        if let Some(second) = sublists.get_mut(2 * p + 1) {
            both.extend(second.drain(..));
        }
        both.sort_unstable();
        merged.push(both.into_iter().collect());
    }
    (merged, exhausted / 2)
}

fn alternate(mut lists: Vec<VecDeque<usize>>, start: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (start..lists.len()).chain(0..start).collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while !order.is_empty() {
        if let Some(i) = lists[order[pos]].pop_front() {
            out.push(i);
            pos += 1;
        } else {
            order.remove(pos);
        }
        if pos >= order.len() {
            pos = 0;
        }
    }
    out
}
