//! Utility-scored ranked lists.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, GroupId, ItemId};
use crate::error::{Error, Result};
use crate::math::cosine;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    pub item_id: ItemId,
    /// Higher is better.
    pub utility: f64,
    pub group: Option<GroupId>,
}

impl ScoredItem {
    pub fn new(item_id: impl Into<ItemId>, utility: f64, group: Option<GroupId>) -> Self {
        Self {
            item_id: item_id.into(),
            utility,
            group,
        }
    }
}

/// Items in rank order for one query.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<ScoredItem>,
}

impl RankedList {
    pub fn new(query_id: impl Into<String>, entries: Vec<ScoredItem>) -> Self {
        Self {
            query_id: query_id.into(),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> Vec<ItemId> {
        self.entries.iter().map(|e| e.item_id).collect()
    }

    pub fn groups(&self) -> Vec<Option<GroupId>> {
        self.entries.iter().map(|e| e.group).collect()
    }

    /// Sorts by utility (non-increasing), ties by ascending id.
    pub fn sort_by_utility(&mut self) {
        self.entries.sort_by(|a, b| {
            b.utility
                .total_cmp(&a.utility)
                .then_with(|| a.item_id.cmp(&b.item_id))
        });
    }

    pub fn is_utility_sorted(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[0].utility >= w[1].utility)
    }

    pub fn has_duplicates(&self) -> bool {
        let mut seen = BTreeSet::new();
        !self.entries.iter().all(|e| seen.insert(e.item_id))
    }
}

/// Maps cosine similarity in [-1, 1] to a utility in [0, 1].
pub fn cosine_to_utility(cos: f64) -> f64 {
    (1.0 + cos) / 2.0
}

/// Scores candidates by cosine similarity to the query embedding.
///
/// Utility is `(1 + cos) / 2`; entries come back sorted non-increasing by
/// utility with ties broken by ascending id. Duplicate candidate ids are
/// scored once.
pub fn score_by_query(
    corpus: &Corpus,
    query_id: &str,
    query_embedding: &[f64],
    candidate_ids: &[ItemId],
) -> Result<RankedList> {
    if query_embedding.len() != corpus.embedding_dim() {
        return Err(Error::Dimension {
            expected: corpus.embedding_dim(),
            got: query_embedding.len(),
        });
    }
    let mut seen = BTreeSet::new();
    let mut entries = Vec::with_capacity(candidate_ids.len());
    for &id in candidate_ids {
        let item = corpus.get(id).ok_or(Error::NotFound(id))?;
        if !seen.insert(id) {
            continue;
        }
        let utility = cosine_to_utility(cosine(query_embedding, &item.embedding));
        entries.push(ScoredItem::new(id, utility, item.group));
    }
    let mut list = RankedList::new(query_id, entries);
    list.sort_by_utility();
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{DiversitySpec, Item};
    use alloc::vec;

    fn corpus() -> Corpus {
        let spec = DiversitySpec::new("tone", ["d1", "d2"], true).unwrap();
        let items = vec![
            Item {
                id: ItemId(1),
                embedding: vec![1.0, 0.0],
                tokens: BTreeSet::new(),
                group: Some(GroupId(0)),
                category: "beauty".into(),
            },
            Item {
                id: ItemId(2),
                embedding: vec![0.0, 1.0],
                tokens: BTreeSet::new(),
                group: None,
                category: "beauty".into(),
            },
        ];
        Corpus::new(spec, 2, items).unwrap()
    }

    #[test]
    fn identity_and_orthogonal_utilities() {
        let list = score_by_query(&corpus(), "q", &[1.0, 0.0], &[ItemId(2), ItemId(1)]).unwrap();
        assert_eq!(list.ids(), vec![ItemId(1), ItemId(2)]);
        assert_eq!(list.entries[0].utility, 1.0);
        assert_eq!(list.entries[1].utility, 0.5);
        assert_eq!(list.entries[0].group, Some(GroupId(0)));
        assert_eq!(list.query_id, "q");
    }

    #[test]
    fn errors() {
        let c = corpus();
        assert_eq!(
            score_by_query(&c, "q", &[1.0], &[ItemId(1)]),
            Err(Error::Dimension {
                expected: 2,
                got: 1
            })
        );
        assert_eq!(
            score_by_query(&c, "q", &[1.0, 0.0], &[ItemId(9)]),
            Err(Error::NotFound(ItemId(9)))
        );
    }

    #[test]
    fn ties_break_by_id_and_duplicates_collapse() {
        let c = corpus();
        // Query at 45 degrees: both items tie.
        let q = [1.0, 1.0];
        let list = score_by_query(&c, "q", &q, &[ItemId(2), ItemId(1), ItemId(2)]).unwrap();
        assert_eq!(list.ids(), vec![ItemId(1), ItemId(2)]);
        assert!(!list.has_duplicates());
    }
}
