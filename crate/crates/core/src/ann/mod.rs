//! Simulated distributed nearest-neighbour retrieval.
//!
//! A query fans out from the root to every leaf and from each leaf to its
//! segments. Segments search exactly; each level merges its children into a
//! global top-`K` plus one top-`K_d` bucket per group, so under-represented
//! groups survive aggregation even when they never make the overall top-`K`.

pub mod overfetch;
pub mod search;
pub mod topology;

pub use overfetch::{overfetch_and_rerank, round_robin_select, OverfetchConfig, OverfetchOutcome};
pub use search::{
    aggregate, bucketized_knn, cosine_distance, segment_search, BucketedCandidates, Neighbor,
};
pub use topology::AnnTopology;
