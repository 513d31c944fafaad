use super::{DualIterate, QpError, QpProblem};
use crate::linalg::{dot, factorize_spd, project_box, SparseMatrix, SymmetricFactorization};
use crate::splitting::ResolventOracle;

/// Factorizations needed by one σ.
///
/// `AAᵀ` does not depend on σ and is shared; `I + σQ` is rebuilt by
/// [`QpFactors::with_sigma`].
#[derive(Debug, Clone)]
pub struct QpFactors {
    pub aat: Option<std::sync::Arc<SymmetricFactorization>>,
    pub iq: SymmetricFactorization,
    pub sigma: f64,
}

impl QpFactors {
    pub fn new(p: &QpProblem, sigma: f64) -> Result<Self, QpError> {
        let aat = if p.m() > 0 {
            Some(std::sync::Arc::new(factorize_spd(&p.a.gram_rows()).map_err(QpError::at("AAᵀ factorization"))?))
        } else {
            None
        };
        Ok(Self { aat, iq: factor_iq(p, sigma)?, sigma })
    }

    pub fn with_sigma(&self, p: &QpProblem, sigma: f64) -> Result<Self, QpError> {
        Ok(Self { aat: self.aat.clone(), iq: factor_iq(p, sigma)?, sigma })
    }
}

fn factor_iq(p: &QpProblem, sigma: f64) -> Result<SymmetricFactorization, QpError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(QpError::Config(format!("sigma {sigma} must be positive and finite")));
    }
    let m = SparseMatrix::identity(p.n()).add(&p.q, 1.0, sigma).map_err(QpError::at("I + σQ assembly"))?;
    factorize_spd(&m).map_err(QpError::at("I + σQ factorization"))
}

/// z2-minimizer of the augmented Lagrangian:
/// `σAAᵀ z2 = b − σA(−Qy + z1 − c + x/σ)`.
pub fn solve_z2(
    p: &QpProblem,
    aat: Option<&SymmetricFactorization>,
    qy: &[f64],
    z1: &[f64],
    x: &[f64],
    sigma: f64,
) -> Result<Vec<f64>, QpError> {
    let Some(f) = aat else {
        return Ok(Vec::new());
    };
    let v: Vec<f64> = (0..p.n()).map(|i| -qy[i] + z1[i] - p.c[i] + x[i] / sigma).collect();
    let av = p.a.spmv(&v).map_err(QpError::at("z2 right-hand side"))?;
    let rhs: Vec<f64> = (0..p.m()).map(|i| (p.b[i] - sigma * av[i]) / sigma).collect();
    f.solve(&rhs).map_err(QpError::at("z2 solve"))
}

/// z1-minimizer by Moreau decomposition: with `r = −Qy + Aᵀz2 − c + x/σ`,
/// `z1 = Π_C(σr)/σ − r`.
pub fn solve_z1(p: &QpProblem, qy: &[f64], z2: &[f64], x: &[f64], sigma: f64) -> Result<Vec<f64>, QpError> {
    let atz = if p.m() > 0 { p.a.spmv_transpose(z2).map_err(QpError::at("z1 right-hand side"))? } else { vec![0.0; p.n()] };
    let r: Vec<f64> = (0..p.n()).map(|i| -qy[i] + atz[i] - p.c[i] + x[i] / sigma).collect();
    let sr: Vec<f64> = r.iter().map(|v| sigma * v).collect();
    let proj = project_box(&sr, &p.l, &p.u).map_err(QpError::at("z1 projection"))?;
    // (Π_C(σr) − σr)/σ is exactly zero where σr is interior
    Ok((0..p.n()).map(|i| (proj[i] - sr[i]) / sigma).collect())
}

/// y-update: solves `(I + σQ)w = σ(z1 + Aᵀz2 − c) + x` and returns `(w, Qw)`.
///
/// The minimizer over `Range(Q)` is the projection of `w`, which has the
/// same image under `Q`.
pub fn solve_y(
    p: &QpProblem,
    iq: &SymmetricFactorization,
    z1: &[f64],
    z2: &[f64],
    x: &[f64],
    sigma: f64,
) -> Result<(Vec<f64>, Vec<f64>), QpError> {
    let atz = if p.m() > 0 { p.a.spmv_transpose(z2).map_err(QpError::at("y right-hand side"))? } else { vec![0.0; p.n()] };
    let rhs: Vec<f64> = (0..p.n()).map(|i| sigma * (z1[i] + atz[i] - p.c[i]) + x[i]).collect();
    let w = iq.solve(&rhs).map_err(QpError::at("y solve"))?;
    let qw = p.q.spmv(&w).map_err(QpError::at("y product"))?;
    Ok((w, qw))
}

/// Backward-forward sweep `z2′ → z1 → z2` from the iterate's `(Qy, z1, x)`.
pub fn sgs_z_update(p: &QpProblem, f: &QpFactors, w: &DualIterate) -> Result<(Vec<f64>, Vec<f64>), QpError> {
    let s = f.sigma;
    let aat = f.aat.as_deref();
    let z2_half = solve_z2(p, aat, &w.qy, &w.z1, &w.x, s)?;
    let z1 = solve_z1(p, &w.qy, &z2_half, &w.x, s)?;
    let z2 = solve_z2(p, aat, &w.qy, &z1, &w.x, s)?;
    Ok((z1, z2))
}

/// One sGS-pADMM sweep as a resolvent at fixed σ.
pub struct QpResolvent<'a> {
    pub problem: &'a QpProblem,
    pub factors: &'a QpFactors,
}

impl<'a> QpResolvent<'a> {
    pub fn new(problem: &'a QpProblem, factors: &'a QpFactors) -> Self {
        Self { problem, factors }
    }

    /// `σ⁻¹‖x − σQy‖²` and `‖z‖²_T2 = σ·z1ᵀAᵀ(AAᵀ)⁻¹Az1` of a difference `d`.
    pub fn seminorm_parts(&self, d: &DualIterate) -> (f64, f64) {
        let s = self.factors.sigma;
        let mixed: f64 = d.x.iter().zip(&d.qy).map(|(x, q)| (x - s * q).powi(2)).sum::<f64>() / s;
        let t2 = match self.factors.aat.as_deref() {
            Some(f) => {
                let az = self.problem.a.spmv(&d.z1).expect("z1 dimension");
                let t = f.solve(&az).expect("z1 dimension");
                s * dot(&az, &t)
            }
            None => 0.0,
        };
        (mixed, t2.max(0.0))
    }
}

impl ResolventOracle for QpResolvent<'_> {
    type Point = DualIterate;
    type Error = QpError;

    fn resolve(&self, w: &DualIterate) -> Result<DualIterate, QpError> {
        let p = self.problem;
        let s = self.factors.sigma;
        let (z1, z2) = sgs_z_update(p, self.factors, w)?;
        let atz = if p.m() > 0 { p.a.spmv_transpose(&z2).map_err(QpError::at("multiplier update"))? } else { vec![0.0; p.n()] };
        let x: Vec<f64> = (0..p.n()).map(|i| w.x[i] + s * (-w.qy[i] + z1[i] + atz[i] - p.c[i])).collect();
        let (y, qy) = solve_y(p, &self.factors.iq, &z1, &z2, &x, s)?;
        Ok(DualIterate { y, qy, z1, z2, x })
    }

    fn seminorm(&self, w: &DualIterate) -> f64 {
        let (a, b) = self.seminorm_parts(w);
        (a + b).sqrt()
    }

    fn dim(&self) -> usize {
        3 * self.problem.n() + self.problem.m()
    }
}
