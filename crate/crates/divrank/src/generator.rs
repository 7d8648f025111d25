//! Seeded synthetic corpora with skewed group marginals.
//!
//! Each item belongs to a topic and a group, though a fraction of items do
//! not carry their group label. The embedding mixes a topic center, a group
//! center and isotropic noise, so nearest neighbours
//! share a topic and lean towards the query's own group while still mixing
//! groups. Tokens come from a small per-topic slice of the topic category's
//! vocabulary.

use std::collections::BTreeSet;

use divrank_core::token::group_token;
use divrank_core::{Corpus, DiversitySpec, GroupId, Item, ItemId};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CATEGORIES: [&str; 5] = ["fashion", "beauty", "home_decor", "food", "travel"];

fn vocabulary(category: &str) -> &'static [&'static str] {
    match category {
        "fashion" => &[
            "dress", "shirt", "jeans", "boots", "jacket", "skirt", "scarf", "heels", "denim",
            "linen", "blazer", "sneakers",
        ],
        "beauty" => &[
            "lipstick",
            "foundation",
            "eyeliner",
            "blush",
            "serum",
            "mascara",
            "braids",
            "curls",
            "nails",
            "skincare",
            "bronzer",
            "highlighter",
        ],
        "home_decor" => &[
            "sofa",
            "rug",
            "lamp",
            "shelf",
            "curtain",
            "vase",
            "mirror",
            "pillow",
            "tile",
            "plant",
            "wallpaper",
            "armchair",
        ],
        "food" => &[
            "pasta", "salad", "curry", "bread", "cake", "soup", "tacos", "noodles", "smoothie",
            "cookies", "pizza", "stew",
        ],
        _ => &[
            "beach", "mountain", "city", "island", "hiking", "museum", "desert", "lake", "camping",
            "roadtrip", "forest", "harbor",
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub n: usize,
    pub dim: usize,
    pub group_marginals: Vec<f64>,
    pub groupless_fraction: f64,
    pub seed: u64,
    pub dimension_name: String,
    pub group_labels: Vec<String>,
    pub topics: usize,
    pub topic_weight: f64,
    pub group_weight: f64,
    pub noise_weight: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            dim: 64,
            group_marginals: vec![0.7, 0.15, 0.1, 0.05],
            groupless_fraction: 0.1,
            seed: 42,
            dimension_name: "skin_tone".into(),
            group_labels: Vec::new(),
            topics: 64,
            topic_weight: 1.0,
            group_weight: 0.1,
            noise_weight: 0.45,
        }
    }
}

impl GenConfig {
    /// Group labels: the configured ones, or `d1..dn` from the marginals.
    pub fn labels(&self) -> Vec<String> {
        if self.group_labels.is_empty() {
            (1..=self.group_marginals.len())
                .map(|i| format!("d{i}"))
                .collect()
        } else {
            self.group_labels.clone()
        }
    }

    pub fn spec(&self) -> Result<DiversitySpec> {
        Ok(DiversitySpec::new(
            self.dimension_name.clone(),
            self.labels(),
            true,
        )?)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.group_marginals;
        if m.is_empty() || m.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::config("group marginals must be probabilities"));
        }
        let sum: f64 = m.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "group marginals sum to {sum}, expected 1"
            )));
        }
        if !(0.0..=1.0).contains(&self.groupless_fraction) {
            return Err(Error::config("groupless_fraction must be in [0, 1]"));
        }
        if self.labels().len() != m.len() {
            return Err(Error::config("one group label per marginal is required"));
        }
        if self.n == 0 || self.dim == 0 || self.topics == 0 {
            return Err(Error::config("n, dim and topics must be positive"));
        }
        for w in [self.topic_weight, self.group_weight, self.noise_weight] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::config(
                    "mixture weights must be finite and non-negative",
                ));
            }
        }
        Ok(())
    }
}

fn gaussian_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

struct Topic {
    center: Vec<f64>,
    category: &'static str,
    words: Vec<&'static str>,
}

pub fn generate_corpus(cfg: &GenConfig) -> Result<Corpus> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let weights = WeightedIndex::new(&cfg.group_marginals)
        .map_err(|e| Error::config(format!("group marginals: {e}")))?;

    let topics: Vec<Topic> = (0..cfg.topics)
        .map(|_| {
            let category = CATEGORIES[rng.random_range(0..CATEGORIES.len())];
            let words = vocabulary(category)
                .choose_multiple(&mut rng, 4)
                .copied()
                .collect();
            Topic {
                center: gaussian_unit(&mut rng, cfg.dim),
                category,
                words,
            }
        })
        .collect();
    let group_centers: Vec<Vec<f64>> = (0..spec.len())
        .map(|_| gaussian_unit(&mut rng, cfg.dim))
        .collect();
    let noise_scale = cfg.noise_weight / (cfg.dim as f64).sqrt();

    let mut items = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let topic = &topics[rng.random_range(0..topics.len())];
        // Every item has a latent group; group-less items just lack the label.
        let latent = GroupId::from(weights.sample(&mut rng));
        let group = (!rng.random_bool(cfg.groupless_fraction)).then_some(latent);
        let mut embedding: Vec<f64> = topic.center.iter().map(|c| cfg.topic_weight * c).collect();
        for (e, c) in embedding.iter_mut().zip(&group_centers[latent.index()]) {
            *e += cfg.group_weight * c;
        }
        for e in embedding.iter_mut() {
            *e += noise_scale * rng.sample::<f64, _>(StandardNormal);
        }
        let norm = embedding.iter().map(|x| x * x).sum::<f64>().sqrt();
        embedding.iter_mut().for_each(|e| *e /= norm);

        let count = rng.random_range(2..=3);
        let mut tokens: BTreeSet<String> = topic
            .words
            .choose_multiple(&mut rng, count)
            .map(|w| w.to_string())
            .collect();
        tokens.insert(
            vocabulary(topic.category)
                .choose(&mut rng)
                .expect("non-empty vocabulary")
                .to_string(),
        );
        if let Some(g) = group {
            tokens.insert(group_token(
                spec.label(g).expect("generated group is in spec"),
            ));
        }
        items.push(Item {
            id: ItemId(i as u64 + 1),
            embedding,
            tokens,
            group,
            category: topic.category.to_string(),
        });
    }
    Ok(Corpus::new(spec, cfg.dim, items)?)
}
