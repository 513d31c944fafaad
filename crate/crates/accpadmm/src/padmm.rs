//! Two-block preconditioned ADMM and its accelerated form.
//!
//! The model problem is
//!
//! ```text
//! min f1(y) + f2(z)   s.t.  B1 y + B2 z = c
//! ```
//!
//! with proximal terms `T1`, `T2` added to the y- and z-subproblems. One
//! sweep (z̄, then x̄, then ȳ) evaluates the resolvent `(M + T)⁻¹M`, where
//!
//! ```text
//! ‖w‖²_M = ‖y‖²_T1 + σ⁻¹‖σB1y + x‖² + ‖z‖²_T2
//! ```
//!
//! so the relaxed and accelerated iterations are just the engine in
//! [`crate::splitting`] driven by [`PadmmResolvent`].

use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dot, factorize_spd, norm2, SparseMatrix};
use crate::splitting::{accel_step, AccelState, Point, ResolventOracle, SplittingError};

/// Problem data and subproblem oracles for the two-block model.
pub trait TwoBlockProblem {
    type Error: fmt::Display;

    fn y_dim(&self) -> usize;
    fn z_dim(&self) -> usize;
    fn x_dim(&self) -> usize;

    fn b1(&self, y: &[f64]) -> Vec<f64>;
    fn b1_adj(&self, x: &[f64]) -> Vec<f64>;
    fn b2(&self, z: &[f64]) -> Vec<f64>;
    fn b2_adj(&self, x: &[f64]) -> Vec<f64>;
    fn c(&self) -> &[f64];

    /// `argmin_z f2(z) + ⟨x, B2z⟩ + σ/2‖B1y + B2z − c‖² + ½‖z − zᵏ‖²_T2`
    fn solve_z(&self, y: &[f64], z: &[f64], x: &[f64], sigma: f64) -> Result<Vec<f64>, Self::Error>;
    /// `argmin_y f1(y) + ⟨x̄, B1y⟩ + σ/2‖B1y + B2z̄ − c‖² + ½‖y − yᵏ‖²_T1`
    fn solve_y(&self, z_bar: &[f64], x_bar: &[f64], y: &[f64], sigma: f64) -> Result<Vec<f64>, Self::Error>;

    fn apply_t1(&self, y: &[f64], sigma: f64) -> Vec<f64>;
    fn apply_t2(&self, z: &[f64], sigma: f64) -> Vec<f64>;

    fn t1_norm_sq(&self, y: &[f64], sigma: f64) -> f64 {
        dot(y, &self.apply_t1(y, sigma))
    }

    fn t2_norm_sq(&self, z: &[f64], sigma: f64) -> f64 {
        dot(z, &self.apply_t2(z, sigma))
    }

    /// y-block of the natural residual at `(y, x)`.
    fn residual_y(&self, y: &[f64], x: &[f64]) -> Vec<f64>;
    /// z-block of the natural residual at `(z, x)`.
    fn residual_z(&self, z: &[f64], x: &[f64]) -> Vec<f64>;
    /// Whether the residual blocks use the smooth/nonsmooth split form.
    fn composite(&self) -> bool {
        false
    }

    /// `f1(y) + f2(z)`
    fn objective(&self, y: &[f64], z: &[f64]) -> f64;
}

/// `w = (y, z, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PadmmIterate {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub x: Vec<f64>,
}

impl PadmmIterate {
    pub fn zeros<P: TwoBlockProblem>(p: &P) -> Self {
        Self { y: vec![0.0; p.y_dim()], z: vec![0.0; p.z_dim()], x: vec![0.0; p.x_dim()] }
    }

    pub fn flatten(&self) -> Vec<f64> {
        [&self.y[..], &self.z, &self.x].concat()
    }
}

impl Point for PadmmIterate {
    fn dim(&self) -> usize {
        self.y.len() + self.z.len() + self.x.len()
    }

    fn lincomb(&mut self, a: f64, other: &Self, b: f64) {
        self.y.lincomb(a, &other.y, b);
        self.z.lincomb(a, &other.z, b);
        self.x.lincomb(a, &other.x, b);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PadmmError {
    pub step: &'static str,
    pub message: String,
}

impl fmt::Display for PadmmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.step, self.message)
    }
}

impl std::error::Error for PadmmError {}

impl From<SplittingError<PadmmError>> for PadmmError {
    fn from(e: SplittingError<PadmmError>) -> Self {
        match e {
            SplittingError::Oracle(e) => e,
            other => PadmmError { step: "engine", message: other.to_string() },
        }
    }
}

/// The pADMM sweep seen as a resolvent for a fixed `σ`.
pub struct PadmmResolvent<'a, P> {
    pub problem: &'a P,
    pub sigma: f64,
}

impl<'a, P: TwoBlockProblem> PadmmResolvent<'a, P> {
    pub fn new(problem: &'a P, sigma: f64) -> Self {
        Self { problem, sigma }
    }
}

impl<P: TwoBlockProblem> ResolventOracle for PadmmResolvent<'_, P> {
    type Point = PadmmIterate;
    type Error = PadmmError;

    fn resolve(&self, w: &PadmmIterate) -> Result<PadmmIterate, PadmmError> {
        let p = self.problem;
        let s = self.sigma;
        let z = p
            .solve_z(&w.y, &w.z, &w.x, s)
            .map_err(|e| PadmmError { step: "z-subproblem", message: e.to_string() })?;
        let b1y = p.b1(&w.y);
        let b2z = p.b2(&z);
        let x: Vec<f64> = (0..w.x.len()).map(|i| w.x[i] + s * (b1y[i] + b2z[i] - p.c()[i])).collect();
        let y = p
            .solve_y(&z, &x, &w.y, s)
            .map_err(|e| PadmmError { step: "y-subproblem", message: e.to_string() })?;
        Ok(PadmmIterate { y, z, x })
    }

    fn seminorm(&self, w: &PadmmIterate) -> f64 {
        let s = self.sigma;
        let b1y = self.problem.b1(&w.y);
        let mixed: Vec<f64> = b1y.iter().zip(&w.x).map(|(b, x)| s * b + x).collect();
        let sq = self.problem.t1_norm_sq(&w.y, s) + dot(&mixed, &mixed) / s + self.problem.t2_norm_sq(&w.z, s);
        sq.max(0.0).sqrt()
    }

    fn dim(&self) -> usize {
        self.problem.y_dim() + self.problem.z_dim() + self.problem.x_dim()
    }
}

/// One relaxed pADMM step. Returns `(wᵏ⁺¹, w̄ᵏ)`.
pub fn padmm_iterate<P: TwoBlockProblem>(
    w: &PadmmIterate,
    problem: &P,
    sigma: f64,
    rho: f64,
) -> Result<(PadmmIterate, PadmmIterate), PadmmError> {
    if !(rho > 0.0 && rho <= 2.0) {
        return Err(PadmmError { step: "relaxation", message: format!("rho {rho} outside (0, 2]") });
    }
    let w_bar = PadmmResolvent::new(problem, sigma).resolve(w)?;
    let mut next = w_bar.clone();
    next.lincomb(rho, w, 1.0 - rho);
    Ok((next, w_bar))
}

/// One accelerated step; the state carries `ρ` and `α`. Returns the new state and `w̄ᵏ`.
pub fn acc_padmm_iterate<P: TwoBlockProblem>(
    state: &AccelState<PadmmIterate>,
    problem: &P,
    sigma: f64,
) -> Result<(AccelState<PadmmIterate>, PadmmIterate), PadmmError> {
    Ok(accel_step(state, &PadmmResolvent::new(problem, sigma))?)
}

/// Residual blocks at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct KktBlocks {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub feasibility: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResidual {
    pub y: f64,
    pub z: f64,
    pub feasibility: f64,
    pub aggregate: f64,
    pub composite: bool,
    pub objective_gap: Option<f64>,
}

pub fn kkt_blocks<P: TwoBlockProblem>(w: &PadmmIterate, problem: &P) -> KktBlocks {
    let b1y = problem.b1(&w.y);
    let b2z = problem.b2(&w.z);
    let feasibility = (0..b1y.len()).map(|i| problem.c()[i] - b1y[i] - b2z[i]).collect();
    KktBlocks { y: problem.residual_y(&w.y, &w.x), z: problem.residual_z(&w.z, &w.x), feasibility }
}

pub fn kkt_residual<P: TwoBlockProblem>(w: &PadmmIterate, problem: &P) -> KktResidual {
    let b = kkt_blocks(w, problem);
    let (y, z, feasibility) = (norm2(&b.y), norm2(&b.z), norm2(&b.feasibility));
    KktResidual {
        y,
        z,
        feasibility,
        aggregate: (y * y + z * z + feasibility * feasibility).sqrt(),
        composite: problem.composite(),
        objective_gap: None,
    }
}

/// `h(ȳ, z̄) = f1(ȳ) + f2(z̄) − reference`. Can be negative.
pub fn objective_gap<P: TwoBlockProblem>(w_bar: &PadmmIterate, problem: &P, reference: f64) -> f64 {
    problem.objective(&w_bar.y, &w_bar.z) - reference
}

/// Spectral norm of a linear map by power iteration on `BᵀB` from a seeded start.
pub fn power_norm(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_adj: impl Fn(&[f64]) -> Vec<f64>,
    dim: usize,
    iters: usize,
    seed: u64,
) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut lambda = 0.0;
    for _ in 0..iters {
        let nv = norm2(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|t| *t /= nv);
        let bv = apply(&v);
        lambda = norm2(&bv);
        v = apply_adj(&bv);
    }
    lambda
}

/// Operator norms used by the complexity bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundNorms {
    pub b1_adj: f64,
    pub sqrt_t1: f64,
    pub sqrt_t2: f64,
}

pub fn estimate_bound_norms<P: TwoBlockProblem>(problem: &P, sigma: f64, seed: u64) -> BoundNorms {
    const ITERS: usize = 50;
    let b1_adj = power_norm(|x| problem.b1_adj(x), |y| problem.b1(y), problem.x_dim(), ITERS, seed);
    // ‖√T‖² = ‖T‖ for T ⪰ 0, and power iteration on T·T gives ‖T‖
    let t1 = power_norm(|y| problem.apply_t1(y, sigma), |y| problem.apply_t1(y, sigma), problem.y_dim(), ITERS, seed);
    let t2 = power_norm(|z| problem.apply_t2(z, sigma), |z| problem.apply_t2(z, sigma), problem.z_dim(), ITERS, seed);
    BoundNorms { b1_adj, sqrt_t1: t1.sqrt(), sqrt_t2: t2.sqrt() }
}

/// Right-hand side of `‖R(w̄ᵏ)‖ ≤ ((σ‖B1*‖+1)/√σ + ‖√T2‖ + ‖√T1‖)·2R₀/(ρ(k+1))`.
pub fn residual_bound(norms: BoundNorms, sigma: f64, rho: f64, r0: f64, k: usize) -> f64 {
    let c = (sigma * norms.b1_adj + 1.0) / sigma.sqrt() + norms.sqrt_t2 + norms.sqrt_t1;
    c * 2.0 * r0 / (rho * (k as f64 + 1.0))
}

/// Strongly convex quadratic two-block problem with linear coupling:
///
/// ```text
/// f1(y) = ½yᵀPy + pᵀy,   f2(z) = ½zᵀRz + rᵀz
/// ```
///
/// Both subproblems are linear solves. Used for tests and examples.
#[derive(Debug, Clone)]
pub struct QuadraticTwoBlock {
    pub p: SparseMatrix,
    pub p_lin: Vec<f64>,
    pub r: SparseMatrix,
    pub r_lin: Vec<f64>,
    pub b1: SparseMatrix,
    pub b2: SparseMatrix,
    pub c: Vec<f64>,
    pub t1: SparseMatrix,
    pub t2: SparseMatrix,
}

impl QuadraticTwoBlock {
    /// `min ½y² + ½z²  s.t.  y + z = 1` with `T1 = T2 = 0`.
    pub fn scalar_example() -> Self {
        let one = SparseMatrix::identity(1);
        Self {
            p: one.clone(),
            p_lin: vec![0.0],
            r: one.clone(),
            r_lin: vec![0.0],
            b1: one.clone(),
            b2: one,
            c: vec![1.0],
            t1: SparseMatrix::zeros(1, 1),
            t2: SparseMatrix::zeros(1, 1),
        }
    }

    fn solve_block(
        h: &SparseMatrix,
        b: &SparseMatrix,
        t: &SparseMatrix,
        rhs: Vec<f64>,
        sigma: f64,
    ) -> Result<Vec<f64>, crate::linalg::LinalgError> {
        let btb = b.transpose().matmul(b)?;
        let lhs = h.add(&btb, 1.0, sigma)?.add(t, 1.0, 1.0)?;
        factorize_spd(&lhs)?.solve(&rhs)
    }
}

impl TwoBlockProblem for QuadraticTwoBlock {
    type Error = crate::linalg::LinalgError;

    fn y_dim(&self) -> usize {
        self.b1.ncols()
    }
    fn z_dim(&self) -> usize {
        self.b2.ncols()
    }
    fn x_dim(&self) -> usize {
        self.c.len()
    }
    fn b1(&self, y: &[f64]) -> Vec<f64> {
        self.b1.spmv(y).expect("y dimension")
    }
    fn b1_adj(&self, x: &[f64]) -> Vec<f64> {
        self.b1.spmv_transpose(x).expect("x dimension")
    }
    fn b2(&self, z: &[f64]) -> Vec<f64> {
        self.b2.spmv(z).expect("z dimension")
    }
    fn b2_adj(&self, x: &[f64]) -> Vec<f64> {
        self.b2.spmv_transpose(x).expect("x dimension")
    }
    fn c(&self) -> &[f64] {
        &self.c
    }

    fn solve_z(&self, y: &[f64], z: &[f64], x: &[f64], sigma: f64) -> Result<Vec<f64>, Self::Error> {
        // (R + σB2ᵀB2 + T2) z = −r − B2ᵀ(x + σ(B1y − c)) + T2 zᵏ
        let b1y = self.b1(y);
        let v: Vec<f64> = (0..x.len()).map(|i| x[i] + sigma * (b1y[i] - self.c[i])).collect();
        let bt = self.b2_adj(&v);
        let tz = self.t2.spmv(z)?;
        let rhs = (0..z.len()).map(|i| -self.r_lin[i] - bt[i] + tz[i]).collect();
        Self::solve_block(&self.r, &self.b2, &self.t2, rhs, sigma)
    }

    fn solve_y(&self, z_bar: &[f64], x_bar: &[f64], y: &[f64], sigma: f64) -> Result<Vec<f64>, Self::Error> {
        let b2z = self.b2(z_bar);
        let v: Vec<f64> = (0..x_bar.len()).map(|i| x_bar[i] + sigma * (b2z[i] - self.c[i])).collect();
        let bt = self.b1_adj(&v);
        let ty = self.t1.spmv(y)?;
        let rhs = (0..y.len()).map(|i| -self.p_lin[i] - bt[i] + ty[i]).collect();
        Self::solve_block(&self.p, &self.b1, &self.t1, rhs, sigma)
    }

    fn apply_t1(&self, y: &[f64], _sigma: f64) -> Vec<f64> {
        self.t1.spmv(y).expect("y dimension")
    }
    fn apply_t2(&self, z: &[f64], _sigma: f64) -> Vec<f64> {
        self.t2.spmv(z).expect("z dimension")
    }

    // both functions are smooth, so the split form is ∇f + B*x
    fn residual_y(&self, y: &[f64], x: &[f64]) -> Vec<f64> {
        let g = self.p.spmv(y).expect("y dimension");
        let bx = self.b1_adj(x);
        (0..y.len()).map(|i| g[i] + self.p_lin[i] + bx[i]).collect()
    }
    fn residual_z(&self, z: &[f64], x: &[f64]) -> Vec<f64> {
        let g = self.r.spmv(z).expect("z dimension");
        let bx = self.b2_adj(x);
        (0..z.len()).map(|i| g[i] + self.r_lin[i] + bx[i]).collect()
    }
    fn composite(&self) -> bool {
        true
    }

    fn objective(&self, y: &[f64], z: &[f64]) -> f64 {
        0.5 * dot(y, &self.p.spmv(y).expect("y dimension"))
            + dot(&self.p_lin, y)
            + 0.5 * dot(z, &self.r.spmv(z).expect("z dimension"))
            + dot(&self.r_lin, z)
    }
}
