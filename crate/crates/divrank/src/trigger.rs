use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    #[default]
    Search,
    RelatedItems,
    NewUserFeed,
}

/// Which query categories get diversified on a surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerRule {
    pub categories: BTreeSet<String>,
    pub surface: Surface,
}

impl Default for TriggerRule {
    fn default() -> Self {
        Self {
            categories: ["beauty", "fashion"]
                .into_iter()
                .map(String::from)
                .collect(),
            surface: Surface::Search,
        }
    }
}

impl TriggerRule {
    pub fn new(
        surface: Surface,
        categories: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let rule = Self {
            categories: categories.into_iter().map(Into::into).collect(),
            surface,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.categories.is_empty() {
            return Err(Error::config("trigger rule needs at least one category"));
        }
        Ok(())
    }
}

pub fn should_trigger(category: &str, rule: &TriggerRule) -> bool {
    rule.categories.contains(category)
}
