//! Brute-force reference for the greedy DPP step.
//!
//! Every candidate's objective is recomputed from a freshly assembled dense
//! matrix via LU decomposition with partial pivoting. Nothing is shared with
//! the incremental Cholesky path, so the two can check each other.

use alloc::format;
use alloc::vec::Vec;

use super::dpp::TIE_TOLERANCE;
use super::similarity::SimilarityMatrix;
use crate::error::{Error, Result};

/// `ln det` of a dense row-major `n × n` matrix; fails unless det > 0.
pub fn dense_log_det(mut a: Vec<f64>, n: usize) -> Result<f64> {
    assert_eq!(a.len(), n * n);
    let mut log_det = 0.0;
    let mut negative = false;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .expect("non-empty range");
        let pivot = a[pivot_row * n + col];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::Numerical(format!("singular matrix at column {col}")));
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            negative = !negative;
        }
        if pivot < 0.0 {
            negative = !negative;
        }
        log_det += libm::log(pivot.abs());
        for r in (col + 1)..n {
            let factor = a[r * n + col] / pivot;
            if factor != 0.0 {
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    if negative {
        return Err(Error::Numerical("determinant is negative".into()));
    }
    Ok(log_det)
}

/// Objective `2θ·u_c + ln det S_{window ∪ {c}}` computed from scratch.
pub fn oracle_objective(
    window: &[usize],
    candidate: usize,
    s: &SimilarityMatrix,
    utilities: &[f64],
    theta: f64,
) -> Result<f64> {
    let members: Vec<usize> = window
        .iter()
        .copied()
        .chain(core::iter::once(candidate))
        .collect();
    let m = members.len();
    let mut dense = Vec::with_capacity(m * m);
    for &i in &members {
        for &j in &members {
            dense.push(s.kernel(i, j));
        }
    }
    Ok(2.0 * theta * utilities[candidate] + dense_log_det(dense, m)?)
}

/// The candidate maximizing the greedy objective; ties within
/// [`TIE_TOLERANCE`] go to the lowest index (best original rank).
pub fn dpp_step_oracle(
    selected_window: &[usize],
    candidates: &[usize],
    s: &SimilarityMatrix,
    utilities: &[f64],
    theta: f64,
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput("no candidates"));
    }
    let scored: Vec<(usize, f64)> = candidates
        .iter()
        .map(|&c| oracle_objective(selected_window, c, s, utilities, theta).map(|o| (c, o)))
        .collect::<Result<_>>()?;
    let best = scored
        .iter()
        .map(|&(_, o)| o)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(scored
        .iter()
        .filter(|&&(_, o)| o >= best - TIE_TOLERANCE)
        .map(|&(c, _)| c)
        .min()
        .expect("at least one candidate within tolerance of the max"))
}

/// Full greedy sequence driven by [`dpp_step_oracle`].
pub fn greedy_sequence_oracle(
    s: &SimilarityMatrix,
    utilities: &[f64],
    theta: f64,
    window: usize,
    count: usize,
) -> Result<Vec<usize>> {
    let mut selected: Vec<usize> = Vec::new();
    let mut remaining: Vec<usize> = (0..utilities.len()).collect();
    for _ in 0..count.min(utilities.len()) {
        let recent = &selected[selected.len().saturating_sub(window.max(1))..];
        let pick = dpp_step_oracle(recent, &remaining, s, utilities, theta)?;
        remaining.retain(|&c| c != pick);
        selected.push(pick);
    }
    Ok(selected)
}
