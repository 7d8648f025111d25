//! Diversity and utility metrics over ranked lists.
//!
//! Div@k is the fraction of queries whose first `k` group-bearing results
//! cover every group of the diversity dimension. Entries without a group are
//! skipped, so they neither help nor hurt coverage. A query with fewer than
//! `k` group-bearing entries is scored on the prefix it has; [`evaluate`]
//! reports how many queries were in that situation.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{DiversitySpec, GroupId};
use crate::error::{config_err, Error, Result};
use crate::ranking::RankedList;

/// Aggregate metrics for one pipeline configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub div_at_k: f64,
    pub k: usize,
    /// Queries with at least `k` group-bearing entries.
    pub queries_counted: usize,
    /// Queries evaluated on a shorter group-bearing prefix.
    pub queries_skipped: usize,
    pub equitability: f64,
    pub mean_utility_at_k: f64,
    /// Group occurrences across every query's group-bearing top-k.
    pub per_group_counts: Vec<usize>,
}

/// The first `k` group-bearing entries of a ranking.
pub fn group_prefix(ranking: &RankedList, k: usize) -> impl Iterator<Item = GroupId> + '_ {
    ranking.entries.iter().filter_map(|e| e.group).take(k)
}

fn covers_all_groups(ranking: &RankedList, num_groups: usize, k: usize) -> bool {
    let mut seen = vec![false; num_groups];
    let mut distinct = 0;
    for g in group_prefix(ranking, k) {
        if let Some(slot) = seen.get_mut(g.index()) {
            if !*slot {
                *slot = true;
                distinct += 1;
            }
        }
    }
    distinct == num_groups
}

fn check_k(spec: &DiversitySpec, k: usize) -> Result<()> {
    if k < spec.len() {
        return Err(config_err(alloc::format!(
            "k = {k} is smaller than the number of groups ({}); Div@k could never be 1",
            spec.len()
        )));
    }
    Ok(())
}

/// Fraction of rankings whose group-bearing top-`k` contains every group.
pub fn div_at_k(rankings: &[RankedList], spec: &DiversitySpec, k: usize) -> Result<f64> {
    check_k(spec, k)?;
    if rankings.is_empty() {
        return Err(Error::EmptyInput("no rankings to evaluate"));
    }
    let hits = rankings
        .iter()
        .filter(|r| covers_all_groups(r, spec.len(), k))
        .count();
    Ok(hits as f64 / rankings.len() as f64)
}

/// Normalized Shannon entropy of a group distribution against a uniform
/// target: `H / ln |𝒟|`, with `|𝒟| = group_counts.len()`.
pub fn shannon_equitability(group_counts: &[usize]) -> Result<f64> {
    let total: usize = group_counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput("all group counts are zero"));
    }
    if group_counts.len() == 1 {
        return Ok(1.0);
    }
    let total = total as f64;
    let entropy: f64 = group_counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * libm::log(p)
        })
        .sum();
    Ok((entropy / libm::log(group_counts.len() as f64)).clamp(0.0, 1.0))
}

/// Mean utility over the first `min(k, len)` entries.
pub fn mean_utility_at_k(ranking: &RankedList, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(config_err("k must be at least 1"));
    }
    if ranking.is_empty() {
        return Err(Error::EmptyInput("ranking has no entries"));
    }
    let n = k.min(ranking.len());
    let sum: f64 = ranking.entries[..n].iter().map(|e| e.utility).sum();
    Ok(sum / n as f64)
}

/// Computes the full [`MetricReport`] over a set of rankings.
///
/// Equitability is taken over the pooled per-group counts and is 0 when no
/// ranking has any group-bearing entry. Mean utility averages the per-query
/// means of non-empty rankings.
pub fn evaluate(rankings: &[RankedList], spec: &DiversitySpec, k: usize) -> Result<MetricReport> {
    let div = div_at_k(rankings, spec, k)?;
    let mut per_group_counts = vec![0usize; spec.len()];
    let mut queries_counted = 0;
    let mut utility_sum = 0.0;
    let mut utility_n = 0usize;
    for ranking in rankings {
        let mut bearing = 0;
        for g in group_prefix(ranking, k) {
            if let Some(c) = per_group_counts.get_mut(g.index()) {
                *c += 1;
            }
            bearing += 1;
        }
        if bearing >= k {
            queries_counted += 1;
        }
        if !ranking.is_empty() {
            utility_sum += mean_utility_at_k(ranking, k)?;
            utility_n += 1;
        }
    }
    let equitability = match shannon_equitability(&per_group_counts) {
        Ok(e) => e,
        Err(Error::EmptyInput(_)) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(MetricReport {
        div_at_k: div,
        k,
        queries_counted,
        queries_skipped: rankings.len() - queries_counted,
        equitability,
        mean_utility_at_k: if utility_n == 0 {
            0.0
        } else {
            utility_sum / utility_n as f64
        },
        per_group_counts,
    })
}
