use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use divrank::experiment::{render_text, ExperimentOptions, SweepConfig};
use divrank::io::{create_dir, read_corpus, read_json, read_spec, write_corpus, write_json};
use divrank::pipeline::StageLatency;
use divrank::queries::query_from_item;
use divrank::{
    generate_corpus, generate_queries, run_experiment, run_pipeline, Engine, Error, GenConfig,
    NamedConfig, PipelineConfig, QueryGenConfig, Ranker, Result, Retrieval, TopologyConfig,
};
use divrank_core::{Corpus, ItemId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(
    name = "divrank",
    version,
    about = "Diversity-aware retrieval and re-ranking harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus (corpus.jsonl + spec.json).
    GenCorpus(GenCorpusArgs),
    /// Build the token and embedding indices and print their statistics.
    Index(IndexArgs),
    /// Run one query and print the ranked ids with their groups.
    Query(QueryArgs),
    /// Run an experiment config and write report.json / report.txt.
    Experiment(ExperimentArgs),
    /// Run a pipeline config over generated queries and print latency only.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenCorpusArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    dim: usize,
    /// Comma-separated group marginals.
    #[arg(long, value_delimiter = ',', default_value = "0.7,0.15,0.1,0.05")]
    marginals: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    groupless_fraction: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus JSONL file.
    #[arg(long)]
    corpus: PathBuf,
    /// Diversity spec JSON; defaults to spec.json next to the corpus.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    leaves: usize,
    #[arg(long, default_value_t = 4)]
    segments: usize,
}

impl CorpusArgs {
    fn load(&self) -> Result<Engine> {
        let spec_path = self
            .spec
            .clone()
            .unwrap_or_else(|| self.corpus.with_file_name("spec.json"));
        let corpus = read_corpus(&self.corpus, read_spec(&spec_path)?)?;
        Engine::new(
            corpus,
            TopologyConfig {
                leaves: self.leaves,
                segments_per_leaf: self.segments,
                salt: 0,
            },
        )
    }
}

#[derive(Args)]
struct IndexArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Pipeline config JSON; defaults to bucketized retrieval with DPP.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Build the query from this item's embedding and tokens.
    #[arg(long)]
    like: u64,
    /// Override the query category (drives triggering).
    #[arg(long)]
    category: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of results to print.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.json and report.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    queries: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

/// Where the experiment corpus comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CorpusSource {
    Generate(GenConfig),
    Files { corpus: PathBuf, spec: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ExperimentFile {
    corpus: CorpusSource,
    #[serde(default)]
    topology: TopologyConfig,
    #[serde(default)]
    queries: QueryGenConfig,
    configs: Vec<NamedConfig>,
    #[serde(default)]
    sweep: Option<SweepConfig>,
    #[serde(default)]
    dump_sequences: bool,
}

fn default_pipeline() -> PipelineConfig {
    PipelineConfig::new(
        Retrieval::EmbBucketized { k_d: 3 },
        Ranker::Dpp(Default::default()),
    )
}

fn load_pipeline(path: Option<&Path>) -> Result<PipelineConfig> {
    path.map_or_else(|| Ok(default_pipeline()), read_json)
}

fn gen_corpus(args: &GenCorpusArgs) -> Result<()> {
    let cfg = GenConfig {
        n: args.n,
        dim: args.dim,
        group_marginals: args.marginals.clone(),
        groupless_fraction: args.groupless_fraction,
        seed: args.seed,
        ..Default::default()
    };
    let corpus = generate_corpus(&cfg)?;
    create_dir(&args.out)?;
    write_corpus(&args.out.join("corpus.jsonl"), &corpus)?;
    write_json(&args.out.join("spec.json"), corpus.spec())?;
    println!("wrote {} items to {}", corpus.len(), args.out.display());
    Ok(())
}

fn index(args: &IndexArgs) -> Result<()> {
    let engine = args.corpus.load()?;
    let corpus = &engine.corpus;
    println!("items: {}  dim: {}", corpus.len(), corpus.embedding_dim());
    println!("tokens: {}", engine.index.num_tokens());
    for (g, count) in corpus.spec().group_ids().zip(corpus.group_counts()) {
        println!("group {}: {count}", corpus.spec().label(g).unwrap_or("?"));
    }
    let groupless = corpus.len() - corpus.group_counts().iter().sum::<usize>();
    println!("group-less: {groupless}");
    println!("segment sizes: {:?}", engine.topology.segment_sizes());
    Ok(())
}

fn query(args: &QueryArgs) -> Result<()> {
    let engine = args.corpus.load()?;
    let cfg = load_pipeline(args.config.as_deref())?;
    let item = engine
        .corpus
        .get(ItemId(args.like))
        .ok_or_else(|| Error::config(format!("no item with id {}", args.like)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut q = query_from_item("cli", item, args.noise, 2, &mut rng);
    if let Some(category) = &args.category {
        q.category = category.clone();
    }
    let run = run_pipeline(&engine, &cfg, std::slice::from_ref(&q))?;
    println!(
        "query: category={} tokens={:?} triggered={}",
        q.category, q.tokens, run.triggered[0]
    );
    for (rank, e) in run.rankings[0].entries.iter().take(args.top).enumerate() {
        let group = e
            .group
            .and_then(|g| engine.corpus.spec().label(g))
            .unwrap_or("-");
        println!(
            "{:>3}  {:>8}  {:<6} {:.4}",
            rank + 1,
            e.item_id.0,
            group,
            e.utility
        );
    }
    Ok(())
}

fn load_experiment_corpus(source: &CorpusSource) -> Result<Corpus> {
    match source {
        CorpusSource::Generate(cfg) => generate_corpus(cfg),
        CorpusSource::Files { corpus, spec } => read_corpus(corpus, read_spec(spec)?),
    }
}

fn experiment(args: &ExperimentArgs) -> Result<()> {
    let file: ExperimentFile = read_json(&args.config)?;
    let engine = Engine::new(load_experiment_corpus(&file.corpus)?, file.topology)?;
    let queries = generate_queries(&engine.corpus, &file.queries)?;
    let options = ExperimentOptions {
        sweep: file.sweep,
        dump_sequences: file.dump_sequences,
    };
    let report = run_experiment(&engine, &file.configs, &queries, &options)?;
    create_dir(&args.out)?;
    write_json(&args.out.join("report.json"), &report)?;
    let text = render_text(&report);
    std::fs::write(args.out.join("report.txt"), &text)
        .map_err(|e| Error::io(args.out.join("report.txt"), e))?;
    print!("{text}");
    Ok(())
}

fn print_latency(latency: &StageLatency) {
    for (stage, stats) in [
        ("retrieve", latency.retrieve),
        ("score", latency.score),
        ("rerank", latency.rerank),
        ("total", latency.total),
    ] {
        println!(
            "{stage:<9} mean {:>9.3} ms   p99 {:>9.3} ms",
            stats.mean_ms, stats.p99_ms
        );
    }
}

fn bench(args: &BenchArgs) -> Result<()> {
    let engine = args.corpus.load()?;
    let cfg = load_pipeline(args.config.as_deref())?;
    let queries = generate_queries(
        &engine.corpus,
        &QueryGenConfig {
            count: args.queries,
            seed: args.seed,
            ..Default::default()
        },
    )?;
    let run = run_pipeline(&engine, &cfg, &queries)?;
    println!("queries: {}", queries.len());
    print_latency(&run.latency);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GenCorpus(a) => gen_corpus(a),
        Command::Index(a) => index(a),
        Command::Query(a) => query(a),
        Command::Experiment(a) => experiment(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
