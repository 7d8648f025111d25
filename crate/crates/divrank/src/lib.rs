//! Std companion to `divrank-core`: file formats, a synthetic corpus
//! generator, the end-to-end pipeline and experiment reporting.

pub mod config;
pub mod error;
pub mod experiment;
pub mod generator;
pub mod io;
pub mod pipeline;
pub mod queries;
pub mod trigger;

pub use config::{PipelineConfig, Ranker, Retrieval};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentOptions, ExperimentReport, NamedConfig};
pub use generator::{generate_corpus, GenConfig};
pub use pipeline::{run_pipeline, Engine, TopologyConfig};
pub use queries::{generate_queries, Query, QueryGenConfig};
pub use trigger::{should_trigger, Surface, TriggerRule};
