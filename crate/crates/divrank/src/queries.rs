use divrank_core::token::GROUP_TOKEN_PREFIX;
use divrank_core::{Corpus, Item};
use rand::seq::{IndexedRandom, IteratorRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub category: String,
    pub embedding: Vec<f64>,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QueryGenConfig {
    pub count: usize,
    /// Norm of the perturbation added to the seed item's embedding.
    pub noise: f64,
    pub seed: u64,
    /// Seed items are drawn from these categories; empty means any.
    pub categories: Vec<String>,
    pub max_tokens: usize,
}

impl Default for QueryGenConfig {
    fn default() -> Self {
        Self {
            count: 500,
            noise: 0.1,
            seed: 7,
            categories: Vec::new(),
            max_tokens: 2,
        }
    }
}

/// A query shaped like `item`: its embedding nudged by noise of norm
/// `noise`, and a random non-empty subset of its tokens without the group
/// token.
pub fn query_from_item(
    id: impl Into<String>,
    item: &Item,
    noise: f64,
    max_tokens: usize,
    rng: &mut impl Rng,
) -> Query {
    let dim = item.embedding.len();
    let perturbation: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let p_norm = perturbation
        .iter()
        .map(|x: &f64| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1e-12);
    let mut embedding: Vec<f64> = item
        .embedding
        .iter()
        .zip(&perturbation)
        .map(|(e, p)| e + noise * p / p_norm)
        .collect();
    let norm = embedding.iter().map(|x| x * x).sum::<f64>().sqrt();
    embedding.iter_mut().for_each(|x| *x /= norm);

    let candidates: Vec<&String> = item
        .tokens
        .iter()
        .filter(|t| !t.starts_with(GROUP_TOKEN_PREFIX))
        .collect();
    let take = rng
        .random_range(1..=max_tokens.max(1))
        .min(candidates.len());
    let mut tokens: Vec<String> = candidates
        .into_iter()
        .choose_multiple(rng, take)
        .into_iter()
        .cloned()
        .collect();
    tokens.sort();
    Query {
        id: id.into(),
        category: item.category.clone(),
        embedding,
        tokens,
    }
}

pub fn generate_queries(corpus: &Corpus, cfg: &QueryGenConfig) -> Result<Vec<Query>> {
    if !(cfg.noise >= 0.0 && cfg.noise.is_finite()) {
        return Err(Error::config("query noise must be finite and non-negative"));
    }
    let pool: Vec<&Item> = corpus
        .iter()
        .filter(|it| cfg.categories.is_empty() || cfg.categories.contains(&it.category))
        .filter(|it| it.tokens.iter().any(|t| !t.starts_with(GROUP_TOKEN_PREFIX)))
        .collect();
    if pool.is_empty() {
        return Err(Error::config(
            "no corpus item can seed a query for the requested categories",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..cfg.count)
        .map(|i| {
            let item = pool.choose(&mut rng).expect("non-empty pool");
            query_from_item(format!("q{i}"), item, cfg.noise, cfg.max_tokens, &mut rng)
        })
        .collect())
}
