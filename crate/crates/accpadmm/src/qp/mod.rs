//! Convex QP through its restricted-Wolfe dual.
//!
//! Primal:
//!
//! ```text
//! min ½xᵀQx + cᵀx   s.t.  Ax = b,  l ≤ x ≤ u
//! ```
//!
//! Dual, written as a two-block problem with `y` restricted to `Range(Q)`:
//!
//! ```text
//! min ½yᵀQy + δ*_C(−z1) − ⟨b, z2⟩   s.t.  −Qy + z1 + Aᵀz2 = c
//! ```
//!
//! The multiplier of the dual constraint is the primal `x`. The z-update
//! uses a symmetric Gauss-Seidel proximal term so that the joint `(z1, z2)`
//! minimization splits into three closed-form sweeps.

mod dual;
mod solver;
mod subproblems;

pub use dual::QpTwoBlock;
pub use solver::{
    adapt_sigma, relative_kkt, run_solver, run_solver_with, write_records_csv, Algorithm,
    IterationRecord, RelativeKkt, RestartAnchor, SigmaPolicy, SigmaRatio, SolveResult, SolveStatus,
    SolverConfig, CSV_HEADER,
};
pub use subproblems::{sgs_z_update, solve_y, solve_z1, solve_z2, QpFactors, QpResolvent};

use crate::linalg::{dot, LinalgError, SparseMatrix};
use crate::splitting::Point;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QpError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{step}: {source}")]
    Linalg {
        step: &'static str,
        #[source]
        source: LinalgError,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl QpError {
    pub(crate) fn at(step: &'static str) -> impl FnOnce(LinalgError) -> QpError {
        move |source| QpError::Linalg { step, source }
    }
}

/// `min ½xᵀQx + cᵀx + obj_const  s.t.  Ax = b,  l ≤ x ≤ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub name: String,
    pub q: SparseMatrix,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub l: Vec<f64>,
    pub u: Vec<f64>,
    pub obj_const: f64,
}

impl QpProblem {
    /// Validates shapes, exact symmetry of `Q` and `l ≤ u`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        q: SparseMatrix,
        a: SparseMatrix,
        b: Vec<f64>,
        c: Vec<f64>,
        l: Vec<f64>,
        u: Vec<f64>,
        obj_const: f64,
    ) -> Result<Self, QpError> {
        let n = c.len();
        let m = b.len();
        if q.nrows() != n || q.ncols() != n {
            return Err(QpError::Invalid(format!("Q is {}x{}, expected {n}x{n}", q.nrows(), q.ncols())));
        }
        if a.nrows() != m || a.ncols() != n {
            return Err(QpError::Invalid(format!("A is {}x{}, expected {m}x{n}", a.nrows(), a.ncols())));
        }
        if l.len() != n || u.len() != n {
            return Err(QpError::Invalid("bound vectors do not match the column count".into()));
        }
        if !q.is_symmetric() {
            return Err(QpError::Invalid("Q is not symmetric".into()));
        }
        if let Some(index) = (0..n).find(|&i| l[i] > u[i]) {
            return Err(QpError::Linalg { step: "bounds", source: LinalgError::InfeasibleBounds { index } });
        }
        Ok(Self { name: name.into(), q, a, b, c, l, u, obj_const })
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// `½xᵀQx + cᵀx + obj_const`
    pub fn primal_objective(&self, x: &[f64]) -> f64 {
        let qx = self.q.spmv(x).expect("x dimension");
        0.5 * dot(x, &qx) + dot(&self.c, x) + self.obj_const
    }

    /// `δ*_C(−z1) = sup_{x∈C} ⟨−z1, x⟩`, with `0·∞ = 0`.
    pub fn support_neg(&self, z1: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..z1.len() {
            let v = -z1[i];
            if v > 0.0 {
                s += v * self.u[i];
            } else if v < 0.0 {
                s += v * self.l[i];
            }
        }
        s
    }

    /// Dual objective `−½⟨y,Qy⟩ − δ*_C(−z1) + ⟨b,z2⟩ + obj_const`.
    pub fn dual_objective(&self, y: &[f64], qy: &[f64], z1: &[f64], z2: &[f64]) -> f64 {
        -0.5 * dot(y, qy) - self.support_neg(z1) + dot(&self.b, z2) + self.obj_const
    }
}

/// Dual iterate. `y` holds the unprojected y-solve output; `qy = Q·y` is
/// carried along so that `Qy` never needs a separate product.
#[derive(Debug, Clone, PartialEq)]
pub struct DualIterate {
    pub y: Vec<f64>,
    pub qy: Vec<f64>,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub x: Vec<f64>,
}

impl DualIterate {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            y: vec![0.0; n],
            qy: vec![0.0; n],
            z1: vec![0.0; n],
            z2: vec![0.0; m],
            x: vec![0.0; n],
        }
    }

    /// Recomputes `qy` from `y`.
    pub fn refresh_qy(&mut self, q: &SparseMatrix) {
        q.spmv_into(&self.y, &mut self.qy);
    }
}

impl Point for DualIterate {
    fn dim(&self) -> usize {
        self.y.len() + self.z1.len() + self.z2.len() + self.x.len()
    }

    fn lincomb(&mut self, a: f64, other: &Self, b: f64) {
        self.y.lincomb(a, &other.y, b);
        self.qy.lincomb(a, &other.qy, b);
        self.z1.lincomb(a, &other.z1, b);
        self.z2.lincomb(a, &other.z2, b);
        self.x.lincomb(a, &other.x, b);
    }
}
