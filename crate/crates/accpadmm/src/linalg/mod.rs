//! Sparse matrices, symmetric factorization and a few dense vector helpers.

mod ldl;
mod sparse;

pub use ldl::{factorize_spd, solve_factored, SymmetricFactorization};
pub use sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({nrows}x{ncols})")]
    NotSquare { nrows: usize, ncols: usize },
    #[error("matrix is indefinite at pivot {pivot}")]
    IndefiniteMatrix { pivot: usize },
    #[error("infeasible bounds at index {index}: lower > upper")]
    InfeasibleBounds { index: usize },
    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),
    #[error("fill-reducing ordering failed: {0}")]
    Ordering(String),
}

/// Componentwise `median(l, v, u)`. Infinite bounds are allowed.
pub fn project_box(v: &[f64], l: &[f64], u: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if l.len() != v.len() || u.len() != v.len() {
        return Err(LinalgError::DimensionMismatch {
            expected: v.len(),
            found: if l.len() != v.len() { l.len() } else { u.len() },
        });
    }
    if let Some(index) = (0..v.len()).find(|&i| l[i] > u[i]) {
        return Err(LinalgError::InfeasibleBounds { index });
    }
    Ok(v.iter().zip(l.iter().zip(u)).map(|(&x, (&lo, &hi))| clamp(x, lo, hi)).collect())
}

#[inline]
pub(crate) fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += a·x`
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
