//! Windowed greedy MAP inference for a determinantal point process.
//!
//! The kernel is `L = U·S·U` with `U = diag(exp(θ·uᵢ))`, so for a subset `Y`
//!
//! ```text
//! log det L_Y = 2θ·Σ_{i∈Y} uᵢ + log det S_Y
//! ```
//!
//! Items are added one at a time, each step taking the candidate that
//! maximizes `2θ·u_y + log det S_{W ∪ {y}}` where `W` holds the last `w`
//! selections. The log-det of the window is kept as a Cholesky factor; every
//! candidate's increment is one forward substitution against it, which makes
//! a step O(w²·N) and a batch O(w²·B·N).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::cholesky::CholeskyState;
use super::similarity::{build_similarity, KernelTransform, Similarity, SimilarityMatrix};
use crate::corpus::{DiversitySpec, GroupId};
use crate::error::{config_err, Error, Result};
use crate::ranking::RankedList;

/// Objective values within this distance count as tied; ties go to the
/// candidate with the better original rank.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DppConfig {
    /// Utility–diversity trade-off; large values recover the utility order.
    pub theta: f64,
    /// Repulsion window: how many recent selections the determinant sees.
    pub window: usize,
    /// Positions diversified per batch.
    pub batch_size: usize,
    /// Candidates searched to fill one batch.
    pub depth: usize,
    /// Only candidates at or above this utility are eligible.
    pub score_threshold: Option<f64>,
    pub kernel_transform: KernelTransform,
    pub similarity: Similarity,
    /// Added to the diagonal of `S` before factorization.
    pub jitter: f64,
    /// Number of consecutive depth segments diversified independently.
    pub batches: usize,
}

impl Default for DppConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            window: 4,
            batch_size: 10,
            depth: 100,
            score_threshold: None,
            kernel_transform: KernelTransform::Identity,
            similarity: Similarity::Equality { off_diag: 0.0 },
            jitter: 1e-6,
            batches: 1,
        }
    }
}

impl DppConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(config_err("dpp theta must be finite and non-negative"));
        }
        if self.window == 0 || self.batch_size == 0 || self.batches == 0 {
            return Err(config_err(
                "dpp window, batch_size and batches must be positive",
            ));
        }
        if self.batch_size > self.depth {
            return Err(config_err(format!(
                "dpp batch_size {} exceeds depth {}",
                self.batch_size, self.depth
            )));
        }
        if !(self.jitter > 0.0 && self.jitter <= 1e-3) {
            return Err(config_err("dpp jitter must be in (0, 1e-3]"));
        }
        if let Some(t) = self.score_threshold {
            if !t.is_finite() {
                return Err(config_err("dpp score_threshold must be finite"));
            }
        }
        match self.similarity {
            Similarity::Equality { off_diag } if !(0.0..1.0).contains(&off_diag) => {
                return Err(config_err("equality off_diag must be in [0, 1)"));
            }
            Similarity::Exponential { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                return Err(config_err("exponential alpha must be positive"));
            }
            _ => {}
        }
        if let KernelTransform::Rbf { sigma } = self.kernel_transform {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(config_err("rbf sigma must be positive"));
            }
        }
        Ok(())
    }

    /// Similarity matrix for items with the given groups under this config.
    pub fn similarity_matrix(
        &self,
        groups: &[Option<GroupId>],
        spec: &DiversitySpec,
    ) -> SimilarityMatrix {
        build_similarity(
            groups,
            spec,
            self.similarity,
            self.kernel_transform,
            self.jitter,
        )
    }
}

/// One greedy selection step: the chosen candidate and its objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyStep {
    pub chosen: usize,
    pub objective: f64,
}

/// Greedily selects up to `count` items, returning indices into `utilities`
/// in selection order.
///
/// `similarity` must be indexed like `utilities`; lower index means better
/// original rank.
pub fn greedy_select(
    utilities: &[f64],
    similarity: &SimilarityMatrix,
    theta: f64,
    window: usize,
    count: usize,
) -> Result<Vec<GreedyStep>> {
    let n = utilities.len();
    if similarity.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: similarity.len(),
        });
    }
    let window = window.max(1);
    let count = count.min(n);
    let mut steps: Vec<GreedyStep> = Vec::with_capacity(count);
    let mut taken = vec![false; n];
    let mut chol = CholeskyState::with_capacity(window);
    let mut row = Vec::with_capacity(window + 1);
    let mut scratch = Vec::with_capacity(window);
    let mut objectives = vec![f64::NEG_INFINITY; n];

    let mut factored: Vec<usize> = Vec::with_capacity(window);
    let mut recent: Vec<usize> = Vec::with_capacity(window);

    for _ in 0..count {
        recent.clear();
        recent.extend(
            steps[steps.len().saturating_sub(window)..]
                .iter()
                .map(|s| s.chosen),
        );
        if recent.len() == factored.len() + 1 && recent.starts_with(&factored) {
            // Window still growing: extend with the newest selection.
            let newest = recent[recent.len() - 1];
            fill_row(&mut row, similarity, &factored, newest);
            chol.extend(&row)?;
            factored.push(newest);
        } else if recent != factored {
            // Window slid: refactor from scratch.
            chol.clear();
            factored.clear();
            for &item in &recent {
                fill_row(&mut row, similarity, &factored, item);
                chol.extend(&row)?;
                factored.push(item);
            }
        }
        let base = chol.log_det();

        let mut best = f64::NEG_INFINITY;
        for c in 0..n {
            if taken[c] {
                continue;
            }
            fill_row(&mut row, similarity, &factored, c);
            let delta = chol.increment(&row, &mut scratch)?;
            let obj = 2.0 * theta * utilities[c] + base + delta;
            if !obj.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite objective for candidate {c}"
                )));
            }
            objectives[c] = obj;
            best = best.max(obj);
        }
        let chosen = (0..n)
            .find(|&c| !taken[c] && objectives[c] >= best - TIE_TOLERANCE)
            .expect("at least one untaken candidate");
        taken[chosen] = true;
        steps.push(GreedyStep {
            chosen,
            objective: objectives[chosen],
        });
    }
    Ok(steps)
}

/// `[S(w₁, c), …, S(w_k, c), S(c, c) + jitter]` for window items `w`.
fn fill_row(row: &mut Vec<f64>, s: &SimilarityMatrix, window: &[usize], c: usize) {
    row.clear();
    row.extend(window.iter().map(|&w| s.kernel(w, c)));
    row.push(s.kernel(c, c));
}

/// Re-ranks a utility-sorted list with windowed greedy DPP.
///
/// For each of the first `batches` segments of `depth` entries, the eligible
/// entries (at or above `score_threshold`, when set) compete for
/// `batch_size` slots. Selected entries lead the segment in selection order;
/// the rest of the segment follows in original order. Entries past the last
/// diversified segment are untouched.
pub fn dpp_rerank(
    ranking: &RankedList,
    spec: &DiversitySpec,
    cfg: &DppConfig,
) -> Result<RankedList> {
    cfg.validate()?;
    let n = ranking.len();
    let mut entries = Vec::with_capacity(n);
    let mut start = 0;
    for _ in 0..cfg.batches {
        if start >= n {
            break;
        }
        let end = (start + cfg.depth).min(n);
        let segment = &ranking.entries[start..end];
        let eligible: Vec<usize> = (0..segment.len())
            .filter(|&i| cfg.score_threshold.is_none_or(|t| segment[i].utility >= t))
            .collect();
        let groups: Vec<Option<GroupId>> = eligible.iter().map(|&i| segment[i].group).collect();
        let utilities: Vec<f64> = eligible.iter().map(|&i| segment[i].utility).collect();
        let similarity = cfg.similarity_matrix(&groups, spec);
        let steps = greedy_select(
            &utilities,
            &similarity,
            cfg.theta,
            cfg.window,
            cfg.batch_size,
        )?;

        let mut placed = vec![false; segment.len()];
        for step in &steps {
            let i = eligible[step.chosen];
            placed[i] = true;
            entries.push(segment[i]);
        }
        entries.extend(
            segment
                .iter()
                .zip(&placed)
                .filter(|(_, &p)| !p)
                .map(|(e, _)| *e),
        );
        start = end;
    }
    entries.extend_from_slice(&ranking.entries[start.min(n)..]);
    Ok(RankedList::new(ranking.query_id.clone(), entries))
}
