//! Seeded random instances shared by the integration tests.

use accpadmm::linalg::SparseMatrix;
use accpadmm::qp::QpProblem;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unif(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.0.random::<f64>()
    }

    /// Uniform in `lo..hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + ((hi - lo) as f64 * self.0.random::<f64>()) as usize
    }

    pub fn vec(&mut self, n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n).map(|_| self.unif(a, b)).collect()
    }

    /// Row-major dense matrix with entries zeroed at rate `1 − density`.
    pub fn sparse_dense(&mut self, r: usize, c: usize, density: f64) -> Vec<f64> {
        (0..r * c).map(|_| if self.unif(0.0, 1.0) < density { self.unif(-1.0, 1.0) } else { 0.0 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bounds {
    Free,
    Mixed,
    Finite,
}

/// `G Gᵀ (+ shift·I)` for a random `n × rank` factor, exactly symmetric.
pub fn gram(rng: &mut Rng, n: usize, rank: usize, shift: f64) -> Vec<f64> {
    let g = rng.vec(n * rank, -1.0, 1.0);
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..rank).map(|k| g[i * rank + k] * g[j * rank + k]).sum();
            q[i * n + j] = s + if i == j { shift } else { 0.0 };
        }
    }
    q
}

/// Feasible QP with `b = A x₀` for some `x₀` inside the bounds. `pd`
/// makes `Q` positive definite; otherwise its rank is random.
pub fn random_qp(seed: u64, n: usize, m: usize, pd: bool, bounds: Bounds) -> QpProblem {
    let mut rng = Rng::new(seed);
    let rank = if pd { n } else { rng.int(0, n + 1) };
    let q = gram(&mut rng, n, rank, if pd { 0.5 } else { 0.0 });
    let a = rng.vec(m * n, -1.0, 1.0);
    let x0 = rng.vec(n, -1.0, 1.0);
    let mut l = vec![f64::NEG_INFINITY; n];
    let mut u = vec![f64::INFINITY; n];
    for j in 0..n {
        let kind = match bounds {
            Bounds::Free => 0,
            Bounds::Finite => 3,
            Bounds::Mixed => rng.int(0, 4),
        };
        if kind == 1 || kind == 3 {
            l[j] = x0[j] - rng.unif(0.0, 1.0);
        }
        if kind == 2 || kind == 3 {
            u[j] = x0[j] + rng.unif(0.0, 1.0);
        }
    }
    let b: Vec<f64> = (0..m).map(|i| (0..n).map(|j| a[i * n + j] * x0[j]).sum()).collect();
    let c = rng.vec(n, -1.0, 1.0);
    QpProblem::new(
        format!("random-{seed}"),
        SparseMatrix::from_dense(n, n, &q).unwrap(),
        SparseMatrix::from_dense(m, n, &a).unwrap(),
        b,
        c,
        l,
        u,
        0.0,
    )
    .unwrap()
}
