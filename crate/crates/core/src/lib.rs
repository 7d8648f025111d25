//! Diversity-aware retrieval and ranking primitives.
//!
//! The crate covers every stage of a two-stage search/recommendation
//! pipeline where results must represent all groups of a diversity
//! dimension (for example, ordinal skin tone ranges):
//!
//! ```text
//! corpus ──► retrieval ──────────────► scoring ──► re-ranking ──► metrics
//!            token:  OR / Strong-OR                RR / DPP        Div@k
//!            embed:  bucketized ANN,
//!                    overfetch-and-rerank
//! ```
//!
//! - [`corpus`]: items, the diversity dimension, and the corpus container.
//! - [`ranking`]: utility-scored lists and the geometric utility scorer.
//! - [`metrics`]: Div@k, Shannon equitability and mean utility.
//! - [`rerank`]: Round-Robin and windowed greedy DPP with incremental Cholesky.
//! - [`token`]: inverted index, structured queries and the Strong-OR operator.
//! - [`ann`]: scatter-gather nearest neighbour search with per-group buckets.
//!
//! Everything here is pure computation over in-memory data; it builds under
//! `no_std` with `alloc`. File formats, the CLI and the experiment harness
//! live in the companion `divrank` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ann;
pub mod corpus;
mod error;
pub(crate) mod math;
pub mod metrics;
pub mod ranking;
pub mod rerank;
pub mod token;

pub use corpus::{Corpus, DiversitySpec, GroupId, Item, ItemId};
pub use error::{Error, Result};
pub use metrics::{div_at_k, mean_utility_at_k, shannon_equitability, MetricReport};
pub use ranking::{score_by_query, RankedList, ScoredItem};
