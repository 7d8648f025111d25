use divrank_core::ann::OverfetchConfig;
use divrank_core::rerank::{DppConfig, RoundRobinConfig};
use divrank_core::DiversitySpec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trigger::{Surface, TriggerRule};

/// Candidate generation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Retrieval {
    /// `OR` over the query tokens, first `K` in scan order.
    TokenPlain,
    /// `OR` over the query tokens with a per-group minimum count.
    TokenStrongOr { min_per_group: usize },
    /// Exact top-`K` by cosine distance through the sharded index.
    EmbPlain,
    /// Top-`K` plus the top-`k_d` of every group.
    EmbBucketized { k_d: usize },
    /// Grow the fetch until every group has `k_min` candidates.
    EmbOverfetch {
        k_min: usize,
        #[serde(default)]
        k_max: Option<usize>,
        #[serde(default = "default_growth")]
        growth: f64,
    },
}

fn default_growth() -> f64 {
    2.0
}

impl Retrieval {
    /// The non-diversifying counterpart used for untriggered queries.
    pub fn plain(self) -> Retrieval {
        match self {
            Retrieval::TokenPlain | Retrieval::TokenStrongOr { .. } => Retrieval::TokenPlain,
            _ => Retrieval::EmbPlain,
        }
    }

    pub fn overfetch(&self, k: usize) -> Option<OverfetchConfig> {
        match *self {
            Retrieval::EmbOverfetch {
                k_min,
                k_max,
                growth,
            } => Some(OverfetchConfig {
                k_max: k_max.unwrap_or(2 * k),
                growth,
                ..OverfetchConfig::new(k, k_min)
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ranker {
    UtilityOnly,
    RoundRobin(RoundRobinConfig),
    Dpp(DppConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    #[serde(default)]
    pub surface: Surface,
    pub retrieval: Retrieval,
    pub ranker: Ranker,
    /// Candidate count `K` requested from retrieval.
    pub k: usize,
    /// Metric depth.
    pub k_eval: usize,
    #[serde(default)]
    pub trigger: TriggerRule,
    #[serde(default)]
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(retrieval: Retrieval, ranker: Ranker) -> Self {
        Self {
            surface: Surface::Search,
            retrieval,
            ranker,
            k: 100,
            k_eval: 10,
            trigger: TriggerRule::default(),
            seed: 0,
        }
    }

    pub fn validate(&self, spec: &DiversitySpec) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("k must be positive"));
        }
        if self.k_eval < spec.len() {
            return Err(Error::config(format!(
                "k_eval {} is smaller than the number of groups {}",
                self.k_eval,
                spec.len()
            )));
        }
        self.trigger.validate()?;
        if self.trigger.surface != self.surface {
            return Err(Error::config(
                "trigger rule surface differs from the pipeline surface",
            ));
        }
        match self.retrieval {
            Retrieval::TokenStrongOr { min_per_group } if min_per_group * spec.len() > self.k => {
                return Err(Error::config("min_per_group * |groups| exceeds k"));
            }
            Retrieval::TokenStrongOr { min_per_group: 0 } => {
                return Err(Error::config("min_per_group must be positive"));
            }
            _ => {}
        }
        if let Some(overfetch) = self.retrieval.overfetch(self.k) {
            overfetch.validate(spec.len())?;
        }
        match &self.ranker {
            Ranker::UtilityOnly => {}
            Ranker::RoundRobin(rr) => rr.validate()?,
            Ranker::Dpp(dpp) => dpp.validate()?,
        }
        Ok(())
    }
}
