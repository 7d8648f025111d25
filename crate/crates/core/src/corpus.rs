//! Items, the diversity dimension, and the corpus container.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::math::norm;

/// Tolerance on the unit norm of item embeddings.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-6;

/// Unique item identifier. Ascending id is the canonical tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u64);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for ItemId {
    fn from(id: u64) -> Self {
        ItemId(id)
    }
}

/// 0-based index of a group within a [`DiversitySpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupId(pub u16);

impl GroupId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for GroupId {
    fn from(index: usize) -> Self {
        GroupId(index as u16)
    }
}

/// A diversity dimension and its ordered groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiversitySpec {
    pub dimension_name: String,
    pub groups: Vec<String>,
    /// Groups form an ordered scale (e.g. tone ranges 1..4).
    pub ordinal: bool,
}

impl DiversitySpec {
    pub fn new(
        dimension_name: impl Into<String>,
        groups: impl IntoIterator<Item = impl Into<String>>,
        ordinal: bool,
    ) -> Result<Self> {
        let spec = Self {
            dimension_name: dimension_name.into(),
            groups: groups.into_iter().map(Into::into).collect(),
            ordinal,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks that labels are non-empty and unique. Deserialized specs should
    /// be validated before use.
    pub fn validate(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(config_err("diversity spec has no groups"));
        }
        if self.groups.len() > u16::MAX as usize {
            return Err(config_err("too many groups"));
        }
        let unique: BTreeSet<&str> = self.groups.iter().map(String::as_str).collect();
        if unique.len() != self.groups.len() {
            return Err(config_err("group labels must be unique"));
        }
        Ok(())
    }

    /// |𝒟|, the number of groups.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group(&self, label: &str) -> Option<GroupId> {
        self.groups
            .iter()
            .position(|g| g == label)
            .map(GroupId::from)
    }

    pub fn label(&self, group: GroupId) -> Option<&str> {
        self.groups.get(group.index()).map(String::as_str)
    }

    pub fn group_ids(&self) -> impl Iterator<Item = GroupId> + '_ {
        (0..self.groups.len()).map(GroupId::from)
    }

    /// Diversification needs at least two groups to be meaningful.
    pub fn require_diversifiable(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(config_err(format!(
                "diversification needs at least 2 groups, spec `{}` has {}",
                self.dimension_name,
                self.len()
            )));
        }
        Ok(())
    }
}

/// A corpus element.
#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub id: ItemId,
    /// Unit-normalized embedding.
    pub embedding: Vec<f64>,
    pub tokens: BTreeSet<String>,
    /// Absent when the diversity dimension is undefined for the item.
    pub group: Option<GroupId>,
    pub category: String,
}

/// Immutable, id-ordered collection of items sharing one embedding dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    items: Vec<Item>,
    embedding_dim: usize,
    spec: DiversitySpec,
}

impl Corpus {
    /// Builds a corpus, sorting items by id and validating every invariant.
    pub fn new(spec: DiversitySpec, embedding_dim: usize, mut items: Vec<Item>) -> Result<Self> {
        spec.validate()?;
        if embedding_dim == 0 {
            return Err(config_err("embedding dimension must be positive"));
        }
        items.sort_by_key(|item| item.id);
        for pair in items.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(config_err(format!("duplicate item id {}", pair[0].id)));
            }
        }
        for item in &items {
            if item.embedding.len() != embedding_dim {
                return Err(Error::Dimension {
                    expected: embedding_dim,
                    got: item.embedding.len(),
                });
            }
            let n = norm(&item.embedding);
            if (n - 1.0).abs().is_nan() || (n - 1.0).abs() > UNIT_NORM_TOLERANCE {
                return Err(config_err(format!(
                    "item {} embedding norm {n} is not unit",
                    item.id
                )));
            }
            if let Some(g) = item.group {
                if g.index() >= spec.len() {
                    return Err(config_err(format!(
                        "item {} has group index {} outside the spec",
                        item.id,
                        g.index()
                    )));
                }
            }
        }
        Ok(Self {
            items,
            embedding_dim,
            spec,
        })
    }

    pub fn spec(&self) -> &DiversitySpec {
        &self.spec
    }

    pub fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Items in ascending id order.
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Item> {
        self.items.iter()
    }

    pub fn get(&self, id: ItemId) -> Option<&Item> {
        self.position(id).map(|i| &self.items[i])
    }

    /// Position of `id` in ascending id order.
    pub fn position(&self, id: ItemId) -> Option<usize> {
        self.items.binary_search_by_key(&id, |item| item.id).ok()
    }

    pub fn group_of(&self, id: ItemId) -> Result<Option<GroupId>> {
        self.get(id)
            .map(|item| item.group)
            .ok_or(Error::NotFound(id))
    }

    /// Number of items in each group (group-less items are not counted).
    pub fn group_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.spec.len()];
        for item in &self.items {
            if let Some(g) = item.group {
                counts[g.index()] += 1;
            }
        }
        counts
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Item;
    type IntoIter = core::slice::Iter<'a, Item>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn item(id: u64, embedding: Vec<f64>, group: Option<u16>) -> Item {
        Item {
            id: ItemId(id),
            embedding,
            tokens: BTreeSet::new(),
            group: group.map(GroupId),
            category: "fashion".into(),
        }
    }

    fn spec() -> DiversitySpec {
        DiversitySpec::new("tone", ["d1", "d2"], true).unwrap()
    }

    #[test]
    fn spec_rejects_duplicate_and_empty_labels() {
        assert!(DiversitySpec::new("x", ["a", "a"], false).is_err());
        assert!(DiversitySpec::new("x", Vec::<String>::new(), false).is_err());
        let one = DiversitySpec::new("x", ["a"], false).unwrap();
        assert!(one.require_diversifiable().is_err());
        assert_eq!(spec().group("d2"), Some(GroupId(1)));
        assert_eq!(spec().group("d9"), None);
    }

    #[test]
    fn corpus_sorts_by_id() {
        let c = Corpus::new(
            spec(),
            2,
            vec![
                item(5, vec![1.0, 0.0], None),
                item(2, vec![0.0, 1.0], Some(1)),
            ],
        )
        .unwrap();
        let ids: Vec<u64> = c.iter().map(|i| i.id.0).collect();
        assert_eq!(ids, vec![2, 5]);
        assert_eq!(c.group_of(ItemId(2)).unwrap(), Some(GroupId(1)));
        assert_eq!(c.group_of(ItemId(7)), Err(Error::NotFound(ItemId(7))));
        assert_eq!(c.group_counts(), vec![0, 1]);
    }

    #[test]
    fn corpus_rejects_bad_items() {
        let dup = vec![item(1, vec![1.0, 0.0], None), item(1, vec![0.0, 1.0], None)];
        assert!(matches!(Corpus::new(spec(), 2, dup), Err(Error::Config(_))));
        let dim = vec![item(1, vec![1.0, 0.0, 0.0], None)];
        assert!(matches!(
            Corpus::new(spec(), 2, dim),
            Err(Error::Dimension {
                expected: 2,
                got: 3
            })
        ));
        let not_unit = vec![item(1, vec![1.0, 1.0], None)];
        assert!(Corpus::new(spec(), 2, not_unit).is_err());
        let bad_group = vec![item(1, vec![1.0, 0.0], Some(2))];
        assert!(Corpus::new(spec(), 2, bad_group).is_err());
    }
}
