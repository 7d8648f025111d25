//! Multi-configuration experiments and their reports.

use std::fmt::Write as _;

use divrank_core::metrics::{evaluate, MetricReport};
use divrank_core::{RankedList, ScoredItem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::pipeline::{run_pipeline, Engine, StageLatency};
use crate::queries::Query;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedConfig {
    pub name: String,
    #[serde(flatten)]
    pub pipeline: PipelineConfig,
}

/// Depth sweep over impression logs: per-query rankings cut at a random
/// depth in `[min_len, max_len]`, as if only that many results were seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub ks: Vec<usize>,
    /// Deltas are reported relative to this depth.
    pub reference_k: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ks: vec![6, 8, 10, 15],
            reference_k: 10,
            min_len: 6,
            max_len: 30,
            seed: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub div_at_k: f64,
    pub eligible_queries: usize,
    pub div_delta_pct: Option<f64>,
    pub eligible_delta_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigReport {
    pub name: String,
    pub metrics: MetricReport,
    pub triggered_queries: usize,
    pub latency: StageLatency,
}

/// Relative differences against the control, in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub name: String,
    pub div_at_k_pct: Option<f64>,
    pub equitability_pct: Option<f64>,
    pub mean_utility_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDump {
    pub config: String,
    pub query: String,
    /// Group label per position, `null` for group-less entries.
    pub groups: Vec<Option<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub query_count: usize,
    pub k: usize,
    pub k_eval: usize,
    pub control: String,
    pub configs: Vec<ConfigReport>,
    pub deltas: Vec<Delta>,
    pub sweep: Option<Vec<SweepRow>>,
    pub sequences: Option<Vec<SequenceDump>>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentOptions {
    pub sweep: Option<SweepConfig>,
    pub dump_sequences: bool,
}

/// `(treatment − control) / control` in percent; `None` when the control is 0
/// and the treatment is not.
pub fn relative_delta(control: f64, treatment: f64) -> Option<f64> {
    if control == 0.0 {
        (treatment == 0.0).then_some(0.0)
    } else {
        Some(100.0 * (treatment - control) / control)
    }
}

pub fn run_experiment(
    engine: &Engine,
    configs: &[NamedConfig],
    queries: &[Query],
    options: &ExperimentOptions,
) -> Result<ExperimentReport> {
    let control = configs
        .first()
        .ok_or_else(|| Error::config("experiment needs at least one config"))?;
    let (k, k_eval) = (control.pipeline.k, control.pipeline.k_eval);
    for c in configs {
        if c.pipeline.k_eval != k_eval || c.pipeline.k != k {
            return Err(Error::config(format!(
                "config {:?} uses k={} k_eval={}, control uses k={k} k_eval={k_eval}",
                c.name, c.pipeline.k, c.pipeline.k_eval
            )));
        }
    }
    let spec = engine.corpus.spec();
    let mut reports = Vec::with_capacity(configs.len());
    let mut sequences = Vec::new();
    let mut control_rankings = Vec::new();
    for (i, c) in configs.iter().enumerate() {
        let run = run_pipeline(engine, &c.pipeline, queries)?;
        reports.push(ConfigReport {
            name: c.name.clone(),
            metrics: evaluate(&run.rankings, spec, k_eval)?,
            triggered_queries: run.triggered.iter().filter(|&&t| t).count(),
            latency: run.latency,
        });
        if options.dump_sequences {
            sequences.extend(run.rankings.iter().map(|r| {
                SequenceDump {
                    config: c.name.clone(),
                    query: r.query_id.clone(),
                    groups: r
                        .entries
                        .iter()
                        .take(k_eval)
                        .map(|e| e.group.and_then(|g| spec.label(g)).map(str::to_owned))
                        .collect(),
                }
            }));
        }
        if i == 0 {
            control_rankings = run.rankings;
        }
    }
    let base = &reports[0].metrics;
    let deltas = reports
        .iter()
        .map(|r| Delta {
            name: r.name.clone(),
            div_at_k_pct: relative_delta(base.div_at_k, r.metrics.div_at_k),
            equitability_pct: relative_delta(base.equitability, r.metrics.equitability),
            mean_utility_pct: relative_delta(base.mean_utility_at_k, r.metrics.mean_utility_at_k),
        })
        .collect();
    let sweep = match &options.sweep {
        Some(cfg) => Some(impression_sweep(
            &impression_log(&control_rankings, cfg)?,
            engine,
            cfg,
        )?),
        None => None,
    };
    Ok(ExperimentReport {
        query_count: queries.len(),
        k,
        k_eval,
        control: control.name.clone(),
        configs: reports,
        deltas,
        sweep,
        sequences: options.dump_sequences.then_some(sequences),
        notes: vec![
            "mean_utility_at_k (cosine-derived relevance) stands in for engagement metrics as the utility guardrail"
                .into(),
            "deltas are (treatment - control) / control against the first config".into(),
        ],
    })
}

/// Truncates each ranking at a seeded random depth in `[min_len, max_len]`.
pub fn impression_log(rankings: &[RankedList], cfg: &SweepConfig) -> Result<Vec<RankedList>> {
    if cfg.min_len == 0 || cfg.min_len > cfg.max_len {
        return Err(Error::config("sweep needs 0 < min_len <= max_len"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(rankings
        .iter()
        .map(|r| {
            let depth = rng.random_range(cfg.min_len..=cfg.max_len);
            let entries: Vec<ScoredItem> = r.entries.iter().take(depth).copied().collect();
            RankedList::new(r.query_id.clone(), entries)
        })
        .collect())
}

/// Div@k and the number of queries with at least `k` group-bearing
/// impressions, for every `k` in the sweep.
pub fn impression_sweep(
    log: &[RankedList],
    engine: &Engine,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    let spec = engine.corpus.spec();
    let mut rows = Vec::with_capacity(cfg.ks.len());
    for &k in &cfg.ks {
        let m = evaluate(log, spec, k)?;
        rows.push(SweepRow {
            k,
            div_at_k: m.div_at_k,
            eligible_queries: m.queries_counted,
            div_delta_pct: None,
            eligible_delta_pct: None,
        });
    }
    if let Some(reference) = rows.iter().find(|r| r.k == cfg.reference_k).cloned() {
        for row in &mut rows {
            row.div_delta_pct = relative_delta(reference.div_at_k, row.div_at_k);
            row.eligible_delta_pct = relative_delta(
                reference.eligible_queries as f64,
                row.eligible_queries as f64,
            );
        }
    }
    Ok(rows)
}

fn pct(value: Option<f64>) -> String {
    value.map_or("n/a".into(), |v| format!("{v:+.2}%"))
}

/// Plain-text rendering of a report.
pub fn render_text(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "queries: {}  K: {}  k_eval: {}  control: {}",
        report.query_count, report.k, report.k_eval, report.control
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<28} {:>9} {:>9} {:>9} {:>9} {:>10} {:>10} {:>10}",
        "config", "div@k", "equit.", "util@k", "trigger", "counted", "mean ms", "p99 ms"
    );
    for r in &report.configs {
        let m = &r.metrics;
        let _ = writeln!(
            out,
            "{:<28} {:>9.4} {:>9.4} {:>9.4} {:>9} {:>10} {:>10.3} {:>10.3}",
            r.name,
            m.div_at_k,
            m.equitability,
            m.mean_utility_at_k,
            r.triggered_queries,
            m.queries_counted,
            r.latency.total.mean_ms,
            r.latency.total.p99_ms
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<28} {:>12} {:>12} {:>12}",
        "delta vs control", "div@k", "equit.", "util@k"
    );
    for d in &report.deltas {
        let _ = writeln!(
            out,
            "{:<28} {:>12} {:>12} {:>12}",
            d.name,
            pct(d.div_at_k_pct),
            pct(d.equitability_pct),
            pct(d.mean_utility_pct)
        );
    }
    if let Some(sweep) = &report.sweep {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>4} {:>9} {:>10} {:>12} {:>12}",
            "k", "div@k", "eligible", "div delta", "elig. delta"
        );
        for row in sweep {
            let _ = writeln!(
                out,
                "{:>4} {:>9.4} {:>10} {:>12} {:>12}",
                row.k,
                row.div_at_k,
                row.eligible_queries,
                pct(row.div_delta_pct),
                pct(row.eligible_delta_pct)
            );
        }
    }
    for note in &report.notes {
        let _ = writeln!(out, "\nnote: {note}");
    }
    out
}
