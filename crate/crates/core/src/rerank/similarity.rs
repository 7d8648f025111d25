//! Group similarity kernels for the DPP diversity term.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{DiversitySpec, GroupId};

/// Similarity between the groups of two items, over ordinal group indices.
///
/// Cosine similarity over one-hot group vectors is `Equality { off_diag: 0.0 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Similarity {
    /// 1 for the same group, `off_diag` otherwise (`off_diag < 1`).
    Equality { off_diag: f64 },
    /// `1 − |gᵢ − gⱼ| / (|𝒟| − 1)`.
    Linear,
    /// `exp(−alpha·|gᵢ − gⱼ|)`.
    Exponential { alpha: f64 },
}

/// Post-processing applied to similarity values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelTransform {
    Identity,
    /// `exp(−(1 − s)² / (2σ²))`.
    Rbf {
        sigma: f64,
    },
}

impl Similarity {
    pub fn between(&self, a: GroupId, b: GroupId, num_groups: usize) -> f64 {
        let dist = a.index().abs_diff(b.index()) as f64;
        match *self {
            Similarity::Equality { off_diag } => {
                if a == b {
                    1.0
                } else {
                    off_diag
                }
            }
            Similarity::Linear => {
                if num_groups <= 1 {
                    1.0
                } else {
                    (1.0 - dist / (num_groups - 1) as f64).max(0.0)
                }
            }
            Similarity::Exponential { alpha } => libm::exp(-alpha * dist),
        }
    }
}

impl KernelTransform {
    pub fn apply(&self, s: f64) -> f64 {
        match *self {
            KernelTransform::Identity => s,
            KernelTransform::Rbf { sigma } => {
                let gap = 1.0 - s;
                libm::exp(-(gap * gap) / (2.0 * sigma * sigma))
            }
        }
    }
}

/// Symmetric item-by-item similarity with unit diagonal.
///
/// `jitter` is added to the diagonal by [`SimilarityMatrix::kernel`]; the
/// stored values keep `S_ii = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
    jitter: f64,
}

impl SimilarityMatrix {
    /// Wraps a dense row-major matrix. Panics if the shape is not `n × n`.
    pub fn from_dense(n: usize, values: Vec<f64>, jitter: f64) -> Self {
        assert_eq!(values.len(), n * n, "similarity matrix must be n x n");
        Self { n, values, jitter }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// `S + jitter·I` entry, the matrix that actually gets factored.
    pub fn kernel(&self, i: usize, j: usize) -> f64 {
        let v = self.get(i, j);
        if i == j {
            v + self.jitter
        } else {
            v
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Builds the similarity matrix for items with the given (optional) groups.
///
/// Group-less items are dissimilar to everything: their off-diagonal
/// entries are 0 before and after the kernel transform.
pub fn build_similarity(
    groups: &[Option<GroupId>],
    spec: &DiversitySpec,
    similarity: Similarity,
    transform: KernelTransform,
    jitter: f64,
) -> SimilarityMatrix {
    let n = groups.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let s = match (groups[i], groups[j]) {
                (Some(a), Some(b)) => transform.apply(similarity.between(a, b, spec.len())),
                _ => 0.0,
            };
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    SimilarityMatrix { n, values, jitter }
}
