//! Incrementally extended Cholesky factor of a growing symmetric PD matrix.
//!
//! Appending a row/column `[b; c]` to `A = L·Lᵀ` extends the factor with
//! `l = L⁻¹·b` and pivot `d = sqrt(c − ‖l‖²)`, so
//! `log det` grows by `2·ln d`. Each extension costs one forward
//! substitution, O(n²).

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Lower-triangular factor stored row-major in packed form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CholeskyState {
    n: usize,
    packed: Vec<f64>,
    log_det: f64,
}

#[inline]
fn row_start(i: usize) -> usize {
    i * (i + 1) / 2
}

impl CholeskyState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            n: 0,
            packed: Vec::with_capacity(row_start(n)),
            log_det: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Log-determinant of the factored matrix (0 for the empty matrix).
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Entry `(i, j)` of the lower factor, `j ≤ i`.
    pub fn factor(&self, i: usize, j: usize) -> f64 {
        debug_assert!(j <= i && i < self.n);
        self.packed[row_start(i) + j]
    }

    pub fn clear(&mut self) {
        self.n = 0;
        self.packed.clear();
        self.log_det = 0.0;
    }

    /// Solves `L·x = b` into `out` and returns the squared pivot `c − ‖x‖²`
    /// for a candidate row `b ++ [c]`.
    fn schur(&self, new_row: &[f64], out: &mut Vec<f64>) -> Result<f64> {
        if new_row.len() != self.n + 1 {
            return Err(Error::Dimension {
                expected: self.n + 1,
                got: new_row.len(),
            });
        }
        out.clear();
        let mut sq = 0.0;
        for i in 0..self.n {
            let row = &self.packed[row_start(i)..row_start(i) + i + 1];
            let partial: f64 = row[..i].iter().zip(out.iter()).map(|(l, x)| l * x).sum();
            let x = (new_row[i] - partial) / row[i];
            sq += x * x;
            out.push(x);
        }
        Ok(new_row[self.n] - sq)
    }

    /// Log-det increment of appending `new_row` (similarities to the current
    /// items followed by the new diagonal entry), without modifying the state.
    pub fn increment(&self, new_row: &[f64], scratch: &mut Vec<f64>) -> Result<f64> {
        let pivot_sq = self.schur(new_row, scratch)?;
        check_pivot(pivot_sq)?;
        Ok(libm::log(pivot_sq))
    }

    /// Appends one row/column and returns the log-det increment `2·ln d`.
    pub fn extend(&mut self, new_row: &[f64]) -> Result<f64> {
        let mut solved = Vec::with_capacity(self.n + 1);
        let pivot_sq = self.schur(new_row, &mut solved)?;
        check_pivot(pivot_sq)?;
        let pivot = libm::sqrt(pivot_sq);
        let delta = 2.0 * libm::log(pivot);
        self.packed.extend_from_slice(&solved);
        self.packed.push(pivot);
        self.n += 1;
        self.log_det += delta;
        Ok(delta)
    }
}

fn check_pivot(pivot_sq: f64) -> Result<()> {
    if pivot_sq.is_nan() || pivot_sq <= 0.0 || !pivot_sq.is_finite() {
        return Err(Error::Numerical(format!(
            "non-positive pivot {pivot_sq}: matrix is not positive definite"
        )));
    }
    Ok(())
}

/// Functional form of [`CholeskyState::extend`].
pub fn log_det_incremental(state: &CholeskyState, new_row: &[f64]) -> Result<(CholeskyState, f64)> {
    let mut next = state.clone();
    let delta = next.extend(new_row)?;
    Ok((next, delta))
}
