//! Diversity-aware re-ranking of utility-sorted lists.

pub mod cholesky;
pub mod dpp;
pub mod oracle;
pub mod round_robin;
pub mod similarity;

pub use cholesky::{log_det_incremental, CholeskyState};
pub use dpp::{dpp_rerank, greedy_select, DppConfig, GreedyStep};
pub use oracle::{dpp_step_oracle, greedy_sequence_oracle};
pub use round_robin::{round_robin, ExhaustionPolicy, GrouplessPolicy, RoundRobinConfig};
pub use similarity::{build_similarity, KernelTransform, Similarity, SimilarityMatrix};
