//! Query evaluation over an [`InvertedIndex`].
//!
//! All set operations run on posting lists of scan positions, so every
//! intermediate result is already in scan order.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::index::InvertedIndex;
use super::query::{SQuery, StrongOr};
use crate::corpus::ItemId;
use crate::error::Result;

/// Candidates admitted for one quota child that plain OR would have missed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotaBucket {
    /// Index of the child within its Strong-OR node.
    pub child: usize,
    pub ids: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenRetrievalResult {
    /// Retrieved ids in scan order, at most `K`.
    pub main: Vec<ItemId>,
    pub buckets: Vec<QuotaBucket>,
}

impl TokenRetrievalResult {
    /// `main` followed by bucket ids not already in `main`.
    pub fn pool(&self) -> Vec<ItemId> {
        let mut out = self.main.clone();
        for bucket in &self.buckets {
            for id in &bucket.ids {
                if !out.contains(id) {
                    out.push(*id);
                }
            }
        }
        out
    }
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .copied()
        .filter(|x| large.binary_search(x).is_ok())
        .collect()
}

fn union_all(lists: impl IntoIterator<Item = Vec<u32>>) -> Vec<u32> {
    lists
        .into_iter()
        .reduce(|acc, l| union(&acc, &l))
        .unwrap_or_default()
}

/// Every scan position matching `query`, ascending.
pub fn matching_positions(index: &InvertedIndex, query: &SQuery) -> Result<Vec<u32>> {
    Ok(match query {
        SQuery::Term(t) => index.postings(t).to_vec(),
        SQuery::Or(children) => union_all(
            children
                .iter()
                .map(|c| matching_positions(index, c))
                .collect::<Result<Vec<_>>>()?,
        ),
        SQuery::And(children) => {
            let mut lists = children
                .iter()
                .map(|c| matching_positions(index, c))
                .collect::<Result<Vec<_>>>()?;
            lists.sort_by_key(Vec::len);
            let mut iter = lists.into_iter();
            let first = iter.next().unwrap_or_default();
            iter.fold(first, |acc, l| intersect(&acc, &l))
        }
        // A nested Strong-OR contributes the set it retrieves.
        SQuery::StrongOr(node) => {
            let (main, buckets) = strong_or_positions(index, node)?;
            union_all(core::iter::once(main).chain(buckets.into_iter().map(|(_, b)| b)))
        }
    })
}

fn to_ids(index: &InvertedIndex, positions: &[u32]) -> Vec<ItemId> {
    positions.iter().map(|&p| index.doc_id(p)).collect()
}

/// Plain disjunction: children merged in scan order, deduplicated, first `k`.
pub fn eval_or(index: &InvertedIndex, children: &[SQuery], k: usize) -> Result<Vec<ItemId>> {
    let lists = children
        .iter()
        .map(|c| matching_positions(index, c))
        .collect::<Result<Vec<_>>>()?;
    let mut merged = union_all(lists);
    merged.truncate(k);
    Ok(to_ids(index, &merged))
}

/// Evaluates a Strong-OR node.
///
/// If the plain OR top-`K` already meets every quota it is returned as is.
/// Otherwise the scan admits candidates like OR until the outstanding quota
/// deficit reaches the remaining capacity; from then on only candidates that
/// match a still-deficient child are admitted. Deficits are capped by how many
/// matching documents remain ahead in the scan, so an unsatisfiable quota
/// takes what exists and the rest of the result follows OR order.
pub fn eval_strong_or(index: &InvertedIndex, node: &StrongOr) -> Result<TokenRetrievalResult> {
    let (main, buckets) = strong_or_positions(index, node)?;
    Ok(TokenRetrievalResult {
        main: to_ids(index, &main),
        buckets: buckets
            .into_iter()
            .map(|(child, positions)| QuotaBucket {
                child,
                ids: to_ids(index, &positions),
            })
            .collect(),
    })
}

type Buckets = Vec<(usize, Vec<u32>)>;

fn strong_or_positions(index: &InvertedIndex, node: &StrongOr) -> Result<(Vec<u32>, Buckets)> {
    node.validate()?;
    let k = node.scan_limit;
    let child_sets = node
        .children
        .iter()
        .map(|c| matching_positions(index, &c.query))
        .collect::<Result<Vec<_>>>()?;
    let quotas: Vec<(usize, usize)> = node
        .min_counts()
        .into_iter()
        .enumerate()
        .filter_map(|(c, q)| q.map(|q| (c, q)))
        .collect();
    let candidates = union_all(child_sets.iter().cloned());
    let plain = &candidates[..k.min(candidates.len())];

    let satisfied = quotas.iter().all(|&(c, need)| {
        plain
            .iter()
            .filter(|p| child_sets[c].binary_search(p).is_ok())
            .count()
            >= need
    });
    let empty_buckets = || quotas.iter().map(|&(c, _)| (c, Vec::new())).collect();
    if satisfied {
        return Ok((plain.to_vec(), empty_buckets()));
    }

    let mut counts = vec![0usize; quotas.len()];
    // Per quota child: index of the first posting at or after the scan point.
    let mut cursors = vec![0usize; quotas.len()];
    let mut matched = vec![false; quotas.len()];
    let mut main: Vec<u32> = Vec::with_capacity(k);
    let mut skipped: Vec<u32> = Vec::new();

    for &pos in &candidates {
        if main.len() == k {
            break;
        }
        let mut deficit = 0;
        let mut helps = false;
        for (q, &(c, need)) in quotas.iter().enumerate() {
            let set = &child_sets[c];
            while cursors[q] < set.len() && set[cursors[q]] < pos {
                cursors[q] += 1;
            }
            matched[q] = cursors[q] < set.len() && set[cursors[q]] == pos;
            let remaining = set.len() - cursors[q];
            let short = need.saturating_sub(counts[q]).min(remaining);
            deficit += short;
            helps |= matched[q] && short > 0;
        }
        let capacity = k - main.len();
        if deficit >= capacity && !helps {
            skipped.push(pos);
            continue;
        }
        main.push(pos);
        for (q, &m) in matched.iter().enumerate() {
            if m {
                counts[q] += 1;
            }
        }
    }
    if main.len() < k && !skipped.is_empty() {
        // A multi-child match can close several deficits with one slot after
        // earlier candidates were passed over; give those back in scan order.
        let missing = k - main.len();
        main = union(&main, &skipped[..missing.min(skipped.len())]);
    }

    let buckets = quotas
        .iter()
        .map(|&(c, need)| {
            let promoted: Vec<u32> = main
                .iter()
                .copied()
                .filter(|p| {
                    plain.binary_search(p).is_err() && child_sets[c].binary_search(p).is_ok()
                })
                .take(need)
                .collect();
            (c, promoted)
        })
        .collect();
    Ok((main, buckets))
}

/// Evaluates any query. A Strong-OR root enforces its own limit `K`; other
/// roots return the first `limit` matches in scan order.
pub fn evaluate(
    index: &InvertedIndex,
    query: &SQuery,
    limit: usize,
) -> Result<TokenRetrievalResult> {
    query.validate()?;
    match query {
        SQuery::StrongOr(node) => eval_strong_or(index, node),
        other => {
            let mut positions = matching_positions(index, other)?;
            positions.truncate(limit);
            Ok(TokenRetrievalResult {
                main: to_ids(index, &positions),
                buckets: Vec::new(),
            })
        }
    }
}
