use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Corpus, DiversitySpec, GroupId, ItemId};

/// Prefix of the synthetic tokens that index diversity groups.
pub const GROUP_TOKEN_PREFIX: &str = "__group:";

pub fn group_token(label: &str) -> String {
    format!("{GROUP_TOKEN_PREFIX}{label}")
}

/// Token → posting list of scan positions.
///
/// Documents are scanned in static rank order; position `p` is the `p`-th
/// document in that order. Every posting list is strictly ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<u32>>,
    docs: Vec<ItemId>,
}

impl InvertedIndex {
    /// Indexes every item token plus `__group:<label>` for group-bearing
    /// items. Scan order is ascending id.
    pub fn build(corpus: &Corpus) -> Self {
        Self::from_docs(corpus.iter().map(|item| {
            let group = item.group.and_then(|g| corpus.spec().label(g));
            let tokens = item.tokens.iter().cloned().chain(group.map(group_token));
            (item.id, tokens)
        }))
    }

    /// Builds from `(id, tokens)` pairs; scan order is ascending id and a
    /// repeated id merges its tokens.
    pub fn from_docs<I, T, S>(docs: I) -> Self
    where
        I: IntoIterator<Item = (ItemId, T)>,
        T: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut by_id: BTreeMap<ItemId, Vec<String>> = BTreeMap::new();
        for (id, tokens) in docs {
            by_id
                .entry(id)
                .or_default()
                .extend(tokens.into_iter().map(Into::into));
        }
        let mut index = Self::default();
        for (pos, (id, tokens)) in by_id.into_iter().enumerate() {
            index.docs.push(id);
            for token in tokens {
                let list = index.postings.entry(token).or_default();
                if list.last() != Some(&(pos as u32)) {
                    list.push(pos as u32);
                }
            }
        }
        index
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.postings.len()
    }

    /// Positions of documents containing `token`, ascending.
    pub fn postings(&self, token: &str) -> &[u32] {
        self.postings.get(token).map_or(&[], Vec::as_slice)
    }

    pub fn doc_id(&self, position: u32) -> ItemId {
        self.docs[position as usize]
    }

    /// Static rank of a document (its scan position).
    pub fn doc_rank(&self, id: ItemId) -> Option<usize> {
        self.docs.binary_search(&id).ok()
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, &[u32])> {
        self.postings
            .iter()
            .map(|(t, p)| (t.as_str(), p.as_slice()))
    }

    /// Number of documents per group token of `spec`.
    pub fn group_sizes(&self, spec: &DiversitySpec) -> Vec<(GroupId, usize)> {
        spec.group_ids()
            .map(|g| {
                let label = spec.label(g).unwrap_or_default();
                (g, self.postings(&group_token(label)).len())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Item;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    #[test]
    fn indexes_tokens_and_group() {
        let spec = DiversitySpec::new("tone", ["d1", "d2"], true).unwrap();
        let items = vec![
            Item {
                id: ItemId(7),
                embedding: vec![1.0],
                tokens: ["a", "b"].into_iter().map(String::from).collect(),
                group: Some(GroupId(1)),
                category: "fashion".into(),
            },
            Item {
                id: ItemId(3),
                embedding: vec![1.0],
                tokens: ["a"].into_iter().map(String::from).collect::<BTreeSet<_>>(),
                group: None,
                category: "fashion".into(),
            },
        ];
        let corpus = Corpus::new(spec.clone(), 1, items).unwrap();
        let index = InvertedIndex::build(&corpus);
        assert_eq!(index.num_docs(), 2);
        assert_eq!(index.postings("a"), &[0, 1]);
        assert_eq!(index.postings("b"), &[1]);
        assert_eq!(index.postings("__group:d2"), &[1]);
        assert!(index.postings("__group:d1").is_empty());
        assert_eq!(index.doc_id(1), ItemId(7));
        assert_eq!(index.doc_rank(ItemId(3)), Some(0));
        assert_eq!(
            index.group_sizes(&spec),
            vec![(GroupId(0), 0), (GroupId(1), 1)]
        );
    }
}
