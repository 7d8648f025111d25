//! Token retrieval: inverted index, structured queries, and Strong-OR.

pub mod eval;
pub mod index;
pub mod query;

pub use eval::{
    eval_or, eval_strong_or, evaluate, matching_positions, QuotaBucket, TokenRetrievalResult,
};
pub use index::{group_token, InvertedIndex, GROUP_TOKEN_PREFIX};
pub use query::{Quota, SQuery, StrongOr, StrongOrChild};
