//! trigger → retrieve → score → diversify, per query.

use std::time::Instant;

use divrank_core::ann::{bucketized_knn, overfetch_and_rerank, AnnTopology};
use divrank_core::rerank::{dpp_rerank, round_robin, RoundRobinConfig};
use divrank_core::token::{
    evaluate, group_token, InvertedIndex, Quota, SQuery, StrongOr, StrongOrChild,
};
use divrank_core::{score_by_query, Corpus, ItemId, RankedList};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{PipelineConfig, Ranker, Retrieval};
use crate::error::{Error, Result};
use crate::queries::Query;
use crate::trigger::should_trigger;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopologyConfig {
    pub leaves: usize,
    pub segments_per_leaf: usize,
    pub salt: u64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            leaves: 4,
            segments_per_leaf: 4,
            salt: 0,
        }
    }
}

/// A corpus with its token index and sharded embedding index.
pub struct Engine {
    pub corpus: Corpus,
    pub index: InvertedIndex,
    pub topology: AnnTopology,
}

impl Engine {
    pub fn new(corpus: Corpus, topology: TopologyConfig) -> Result<Self> {
        let index = InvertedIndex::build(&corpus);
        let topology = AnnTopology::with_salt(
            &corpus,
            topology.leaves,
            topology.segments_per_leaf,
            topology.salt,
        )?;
        Ok(Self {
            corpus,
            index,
            topology,
        })
    }

    fn token_query(&self, query: &Query, retrieval: Retrieval, k: usize) -> Result<SQuery> {
        if query.tokens.is_empty() {
            return Err(Error::config(format!(
                "query {} has no tokens for token retrieval",
                query.id
            )));
        }
        let or = SQuery::Or(query.tokens.iter().map(SQuery::term).collect());
        Ok(match retrieval {
            Retrieval::TokenStrongOr { min_per_group } => {
                let mut children = vec![StrongOrChild {
                    query: or.clone(),
                    quota: None,
                }];
                children.extend(self.corpus.spec().groups.iter().map(|label| StrongOrChild {
                    query: SQuery::And(vec![or.clone(), SQuery::term(group_token(label))]),
                    quota: Some(Quota::MinCount(min_per_group)),
                }));
                SQuery::StrongOr(Box::new(StrongOr {
                    children,
                    scan_limit: k,
                }))
            }
            _ => or,
        })
    }

    /// Candidate ids for one query, deduplicated, main results first.
    pub fn retrieve(&self, query: &Query, retrieval: Retrieval, k: usize) -> Result<Vec<ItemId>> {
        Ok(match retrieval {
            Retrieval::TokenPlain | Retrieval::TokenStrongOr { .. } => {
                let sq = self.token_query(query, retrieval, k)?;
                evaluate(&self.index, &sq, k)?.pool()
            }
            Retrieval::EmbPlain => {
                bucketized_knn(&self.corpus, &self.topology, &query.embedding, k, 0)?.pool()
            }
            Retrieval::EmbBucketized { k_d } => {
                bucketized_knn(&self.corpus, &self.topology, &query.embedding, k, k_d)?.pool()
            }
            Retrieval::EmbOverfetch { .. } => {
                let cfg = retrieval.overfetch(k).expect("overfetch retrieval");
                overfetch_and_rerank(&self.corpus, &self.topology, &query.embedding, &cfg)?.ids
            }
        })
    }

    /// Runs one query; returns the ranking, whether it was diversified and
    /// per-stage seconds.
    pub fn run_query(
        &self,
        cfg: &PipelineConfig,
        query: &Query,
        ordinal: usize,
    ) -> Result<QueryOutcome> {
        let triggered = should_trigger(&query.category, &cfg.trigger);
        let retrieval = if triggered {
            cfg.retrieval
        } else {
            cfg.retrieval.plain()
        };

        let t0 = Instant::now();
        let candidates = self.retrieve(query, retrieval, cfg.k)?;
        let t1 = Instant::now();
        let mut ranking = score_by_query(&self.corpus, &query.id, &query.embedding, &candidates)?;
        let t2 = Instant::now();
        if triggered {
            ranking = match &cfg.ranker {
                Ranker::UtilityOnly => ranking,
                Ranker::RoundRobin(rr) => {
                    let rr = RoundRobinConfig {
                        rng_seed: query_seed(cfg.seed.wrapping_add(rr.rng_seed), ordinal),
                        ..*rr
                    };
                    round_robin(&ranking, self.corpus.spec(), &rr)
                }
                Ranker::Dpp(dpp) => dpp_rerank(&ranking, self.corpus.spec(), dpp)?,
            };
        }
        let t3 = Instant::now();
        Ok(QueryOutcome {
            ranking,
            triggered,
            timings: StageTimings {
                retrieve: (t1 - t0).as_secs_f64(),
                score: (t2 - t1).as_secs_f64(),
                rerank: (t3 - t2).as_secs_f64(),
            },
        })
    }
}

fn query_seed(seed: u64, ordinal: usize) -> u64 {
    seed ^ (ordinal as u64)
        .wrapping_add(1)
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTimings {
    pub retrieve: f64,
    pub score: f64,
    pub rerank: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    pub ranking: RankedList,
    pub triggered: bool,
    pub timings: StageTimings,
}

/// Mean and 99th percentile, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LatencyStats {
    pub mean_ms: f64,
    pub p99_ms: f64,
}

impl LatencyStats {
    pub fn from_seconds(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Self::default();
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        // Nearest-rank percentile.
        let rank = ((0.99 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        Self {
            mean_ms: 1e3 * sorted.iter().sum::<f64>() / sorted.len() as f64,
            p99_ms: 1e3 * sorted[rank - 1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageLatency {
    pub retrieve: LatencyStats,
    pub score: LatencyStats,
    pub rerank: LatencyStats,
    pub total: LatencyStats,
}

impl StageLatency {
    pub fn from_timings(timings: &[StageTimings]) -> Self {
        let stage = |f: fn(&StageTimings) -> f64| {
            LatencyStats::from_seconds(&timings.iter().map(f).collect::<Vec<_>>())
        };
        Self {
            retrieve: stage(|t| t.retrieve),
            score: stage(|t| t.score),
            rerank: stage(|t| t.rerank),
            total: stage(|t| t.retrieve + t.score + t.rerank),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub rankings: Vec<RankedList>,
    pub triggered: Vec<bool>,
    pub latency: StageLatency,
}

/// Runs every query (in parallel) and collects results in query order.
pub fn run_pipeline(
    engine: &Engine,
    cfg: &PipelineConfig,
    queries: &[Query],
) -> Result<PipelineRun> {
    cfg.validate(engine.corpus.spec())?;
    let outcomes: Vec<QueryOutcome> = queries
        .par_iter()
        .enumerate()
        .map(|(i, q)| {
            engine.run_query(cfg, q, i).map_err(|e| match e {
                Error::Core(source) => Error::Query {
                    query: q.id.clone(),
                    source,
                },
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    let timings: Vec<StageTimings> = outcomes.iter().map(|o| o.timings).collect();
    let (rankings, triggered) = outcomes
        .into_iter()
        .map(|o| (o.ranking, o.triggered))
        .unzip();
    Ok(PipelineRun {
        rankings,
        triggered,
        latency: StageLatency::from_timings(&timings),
    })
}
