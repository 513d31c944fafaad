use super::{solve_y, QpError, QpFactors, QpProblem};
use crate::linalg::project_box;
use crate::padmm::TwoBlockProblem;
use crate::qp::{sgs_z_update, DualIterate};

/// The QP dual as a generic two-block problem.
///
/// `y` is the y-solve surrogate (any representative with the right `Qy`),
/// `z = (z1, z2)` is stored flat, and `B1 = −Q`, `B2 = [I  Aᵀ]`. The
/// factors fix σ; calling an oracle with another σ is an error.
pub struct QpTwoBlock<'a> {
    pub problem: &'a QpProblem,
    pub factors: &'a QpFactors,
}

impl<'a> QpTwoBlock<'a> {
    pub fn new(problem: &'a QpProblem, factors: &'a QpFactors) -> Self {
        Self { problem, factors }
    }

    fn check_sigma(&self, sigma: f64) -> Result<(), QpError> {
        if sigma != self.factors.sigma {
            return Err(QpError::Config(format!(
                "factors were built for sigma {}, called with {sigma}",
                self.factors.sigma
            )));
        }
        Ok(())
    }

    fn split<'z>(&self, z: &'z [f64]) -> (&'z [f64], &'z [f64]) {
        z.split_at(self.problem.n())
    }

    fn qy(&self, y: &[f64]) -> Vec<f64> {
        self.problem.q.spmv(y).expect("y dimension")
    }

    fn at(&self, z2: &[f64]) -> Vec<f64> {
        if self.problem.m() == 0 {
            vec![0.0; self.problem.n()]
        } else {
            self.problem.a.spmv_transpose(z2).expect("z2 dimension")
        }
    }
}

impl TwoBlockProblem for QpTwoBlock<'_> {
    type Error = QpError;

    fn y_dim(&self) -> usize {
        self.problem.n()
    }
    fn z_dim(&self) -> usize {
        self.problem.n() + self.problem.m()
    }
    fn x_dim(&self) -> usize {
        self.problem.n()
    }

    fn b1(&self, y: &[f64]) -> Vec<f64> {
        self.qy(y).into_iter().map(|v| -v).collect()
    }
    fn b1_adj(&self, x: &[f64]) -> Vec<f64> {
        self.b1(x)
    }
    fn b2(&self, z: &[f64]) -> Vec<f64> {
        let (z1, z2) = self.split(z);
        let atz = self.at(z2);
        z1.iter().zip(atz).map(|(a, b)| a + b).collect()
    }
    fn b2_adj(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        if self.problem.m() > 0 {
            out.extend(self.problem.a.spmv(x).expect("x dimension"));
        }
        out
    }
    fn c(&self) -> &[f64] {
        &self.problem.c
    }

    fn solve_z(&self, y: &[f64], z: &[f64], x: &[f64], sigma: f64) -> Result<Vec<f64>, QpError> {
        self.check_sigma(sigma)?;
        let (z1, z2) = self.split(z);
        let w = DualIterate { y: y.to_vec(), qy: self.qy(y), z1: z1.to_vec(), z2: z2.to_vec(), x: x.to_vec() };
        let (z1, z2) = sgs_z_update(self.problem, self.factors, &w)?;
        Ok([z1, z2].concat())
    }

    fn solve_y(&self, z_bar: &[f64], x_bar: &[f64], _y: &[f64], sigma: f64) -> Result<Vec<f64>, QpError> {
        self.check_sigma(sigma)?;
        let (z1, z2) = self.split(z_bar);
        Ok(solve_y(self.problem, &self.factors.iq, z1, z2, x_bar, sigma)?.0)
    }

    fn apply_t1(&self, y: &[f64], _sigma: f64) -> Vec<f64> {
        vec![0.0; y.len()]
    }

    /// `T2 = σ·diag(Aᵀ(AAᵀ)⁻¹A, 0)`.
    fn apply_t2(&self, z: &[f64], sigma: f64) -> Vec<f64> {
        let n = self.problem.n();
        let mut out = vec![0.0; z.len()];
        if let Some(f) = self.factors.aat.as_deref() {
            let az = self.problem.a.spmv(&z[..n]).expect("z1 dimension");
            let t = f.solve(&az).expect("z1 dimension");
            let pz = self.problem.a.spmv_transpose(&t).expect("z2 dimension");
            out[..n].iter_mut().zip(pz).for_each(|(o, v)| *o = sigma * v);
        }
        out
    }

    /// `∇(½yᵀQy) + B1*x = Qy − Qx`
    fn residual_y(&self, y: &[f64], x: &[f64]) -> Vec<f64> {
        let qy = self.qy(y);
        let qx = self.qy(x);
        qy.iter().zip(qx).map(|(a, b)| a - b).collect()
    }

    /// `(x − Π_C(x − z1), Ax − b)`
    fn residual_z(&self, z: &[f64], x: &[f64]) -> Vec<f64> {
        let p = self.problem;
        let (z1, _) = self.split(z);
        let shifted: Vec<f64> = x.iter().zip(z1).map(|(a, b)| a - b).collect();
        let proj = project_box(&shifted, &p.l, &p.u).expect("bounds validated at construction");
        let mut out: Vec<f64> = x.iter().zip(proj).map(|(a, b)| a - b).collect();
        if p.m() > 0 {
            let ax = p.a.spmv(x).expect("x dimension");
            out.extend(ax.iter().zip(&p.b).map(|(a, b)| a - b));
        }
        out
    }

    fn composite(&self) -> bool {
        true
    }

    fn objective(&self, y: &[f64], z: &[f64]) -> f64 {
        let (z1, z2) = self.split(z);
        let qy = self.qy(y);
        0.5 * crate::linalg::dot(y, &qy) + self.problem.support_neg(z1) - crate::linalg::dot(&self.problem.b, z2)
    }
}
