//! Property checks shared by the proptest suite and the acceptance runner.

use accpadmm::linalg::{dot, factorize_spd, norm2, project_box, SparseMatrix};
use accpadmm::padmm::TwoBlockProblem;
use accpadmm::qp::{DualIterate, QpFactors, QpResolvent, QpTwoBlock};
use accpadmm::splitting::{Point, ResolventOracle};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::gen::{gram, random_qp, Bounds, Rng};

/// `(seed, n, m, σ, ρ)` for a small random QP and dPPM parameters.
pub fn qp_case() -> impl Strategy<Value = (u64, usize, usize, f64, f64)> {
    (any::<u64>(), 1usize..=6, 0usize..=3, 0.05f64..20.0, 0.05f64..=2.0)
        .prop_map(|(s, n, m, sigma, rho)| (s, n, m.min(n), sigma, rho))
}

fn random_point(rng: &mut Rng, p: &accpadmm::qp::QpProblem) -> DualIterate {
    let (n, m) = (p.n(), p.m());
    let mut w = DualIterate {
        y: rng.vec(n, -3.0, 3.0),
        qy: vec![0.0; n],
        z1: rng.vec(n, -3.0, 3.0),
        z2: rng.vec(m, -3.0, 3.0),
        x: rng.vec(n, -3.0, 3.0),
    };
    w.refresh_qy(&p.q);
    w
}

/// `F_ρ = (1 − ρ)I + ρT̂` is nonexpansive in the M-seminorm of the QP sweep.
pub fn nonexpansive((seed, n, m, sigma, rho): (u64, usize, usize, f64, f64)) -> Result<(), TestCaseError> {
    let p = random_qp(seed, n, m, false, Bounds::Mixed);
    let f = QpFactors::new(&p, sigma).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let oracle = QpResolvent::new(&p, &f);
    let mut rng = Rng::new(seed ^ 0xabc);
    let (w1, w2) = (random_point(&mut rng, &p), random_point(&mut rng, &p));
    let relax = |w: &DualIterate| -> Result<DualIterate, TestCaseError> {
        let mut out = oracle.resolve(w).map_err(|e| TestCaseError::fail(e.to_string()))?;
        out.lincomb(rho, w, 1.0 - rho);
        Ok(out)
    };
    let (f1, f2) = (relax(&w1)?, relax(&w2)?);
    let mut d_in = w1.clone();
    d_in.lincomb(1.0, &w2, -1.0);
    let mut d_out = f1;
    d_out.lincomb(1.0, &f2, -1.0);
    let (before, after) = (oracle.seminorm(&d_in), oracle.seminorm(&d_out));
    prop_assert!(after <= before * (1.0 + 1e-9) + 1e-9, "‖Fw − Fw'‖ = {after} > ‖w − w'‖ = {before}");
    Ok(())
}

/// `⟨Bv, x⟩ = ⟨v, B*x⟩` for a random sparse matrix and for both coupling
/// maps of the QP two-block problem.
pub fn adjoint((seed, n, m, sigma, _): (u64, usize, usize, f64, f64)) -> Result<(), TestCaseError> {
    let mut rng = Rng::new(seed);
    let (r, c) = (rng.int(1, 9), rng.int(1, 9));
    let a = SparseMatrix::from_dense(r, c, &rng.sparse_dense(r, c, 0.4)).unwrap();
    let (v, x) = (rng.vec(c, -2.0, 2.0), rng.vec(r, -2.0, 2.0));
    let lhs = dot(&a.spmv(&v).unwrap(), &x);
    let rhs = dot(&v, &a.spmv_transpose(&x).unwrap());
    prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));

    let p = random_qp(seed, n, m, false, Bounds::Mixed);
    let f = QpFactors::new(&p, sigma).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let tb = QpTwoBlock::new(&p, &f);
    let y = rng.vec(tb.y_dim(), -2.0, 2.0);
    let z = rng.vec(tb.z_dim(), -2.0, 2.0);
    let x = rng.vec(tb.x_dim(), -2.0, 2.0);
    for (l, r) in [
        (dot(&tb.b1(&y), &x), dot(&y, &tb.b1_adj(&x))),
        (dot(&tb.b2(&z), &x), dot(&z, &tb.b2_adj(&x))),
    ] {
        prop_assert!((l - r).abs() <= 1e-12 * (1.0 + l.abs()), "{l} vs {r}");
    }
    Ok(())
}

/// Box bounds and two points, some bounds infinite.
pub fn box_case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..=20).prop_flat_map(|n| {
        let bound = prop_oneof![Just(f64::INFINITY), 0.0f64..5.0];
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(bound.clone(), n),
            prop::collection::vec(bound, n),
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
        )
            .prop_map(|(mid, lo, hi, a, b)| {
                let l = mid.iter().zip(&lo).map(|(m, d)| m - d).collect();
                let u = mid.iter().zip(&hi).map(|(m, d)| m + d).collect();
                (l, u, a, b)
            })
    })
}

/// Projection onto a box is 1-Lipschitz, idempotent and lands in the box.
pub fn projection((l, u, a, b): (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)) -> Result<(), TestCaseError> {
    let pa = project_box(&a, &l, &u).unwrap();
    let pb = project_box(&b, &l, &u).unwrap();
    let diff = |x: &[f64], y: &[f64]| norm2(&x.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>());
    prop_assert!(diff(&pa, &pb) <= diff(&a, &b) * (1.0 + 1e-15));
    prop_assert_eq!(project_box(&pa, &l, &u).unwrap(), pa.clone());
    for i in 0..pa.len() {
        prop_assert!(l[i] <= pa[i] && pa[i] <= u[i]);
    }
    Ok(())
}

/// `(seed, n, σ)` for a sparse SPD system.
pub fn spd_case() -> impl Strategy<Value = (u64, usize, f64)> {
    (any::<u64>(), 1usize..=50, 0.01f64..100.0)
}

/// LDLᵀ solves have small backward error, and scaling the matrix by σ
/// scales the solution by 1/σ.
pub fn factorization((seed, n, sigma): (u64, usize, f64)) -> Result<(), TestCaseError> {
    let mut rng = Rng::new(seed);
    let k = if rng.unif(0.0, 1.0) < 0.5 {
        let b = SparseMatrix::from_dense(n, n, &rng.sparse_dense(n, n, 3.0 / n as f64)).unwrap();
        b.transpose().matmul(&b).unwrap().add(&SparseMatrix::identity(n), 1.0, 0.1).unwrap()
    } else {
        SparseMatrix::from_dense(n, n, &gram(&mut rng, n, n, 0.1)).unwrap()
    };
    let r = rng.vec(n, -1.0, 1.0);
    let f = factorize_spd(&k).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let x = f.solve(&r).unwrap();
    let res: Vec<f64> = k.spmv(&x).unwrap().iter().zip(&r).map(|(a, b)| a - b).collect();
    prop_assert!(norm2(&res) <= 1e-10 * (k.norm_inf() * norm2(&x) + norm2(&r)), "residual {}", norm2(&res));

    let fs = factorize_spd(&k.scale(sigma)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let xs = fs.solve(&r).unwrap();
    for i in 0..n {
        prop_assert!((xs[i] - x[i] / sigma).abs() <= 1e-12 * (1.0 + (x[i] / sigma).abs()) * n as f64);
    }
    Ok(())
}
