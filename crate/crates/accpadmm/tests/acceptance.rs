//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero only on outcomes that differ from the expectation list.

mod common;

use std::convert::Infallible;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use accpadmm::linalg::SparseMatrix;
use accpadmm::padmm::{padmm_iterate, PadmmIterate};
use accpadmm::qp::{
    run_solver, sgs_z_update, DualIterate, QpFactors, QpProblem, QpTwoBlock, SigmaPolicy, SolveStatus,
    SolverConfig,
};
use accpadmm::qps::{parse_qps, to_standard_form};
use accpadmm::splitting::{accel_step, dppm_step, step_residual, AccelState, ResolventOracle};
use nalgebra::{DMatrix, DVector};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use common::gen::{random_qp, Bounds, Rng};
use common::props;

/// Criteria whose failure is understood; see the project notes.
const EXPECTED_FAIL: &[&str] = &["parser_golden"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn dense(s: &SparseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| s.get(i, j))
}

fn dv(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Affine map `w ↦ Gw + g` under a dense seminorm `√(wᵀMw)`.
struct Affine {
    g: DMatrix<f64>,
    shift: DVector<f64>,
    m: DMatrix<f64>,
}

impl ResolventOracle for Affine {
    type Point = Vec<f64>;
    type Error = Infallible;

    fn resolve(&self, w: &Vec<f64>) -> Result<Vec<f64>, Infallible> {
        Ok((&self.g * dv(w) + &self.shift).as_slice().to_vec())
    }

    fn seminorm(&self, w: &Vec<f64>) -> f64 {
        let w = dv(w);
        w.dot(&(&self.m * &w)).max(0.0).sqrt()
    }

    fn dim(&self) -> usize {
        self.shift.len()
    }
}

fn random_matrix(rng: &mut Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(r, c, &rng.vec(r * c, -1.0, 1.0))
}

fn halpern_identity() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = Rng::new(100 + seed);
        let d = rng.int(1, 51);
        // (I + N)/2 with ‖N‖ ≤ 1 is firmly nonexpansive
        let n = random_matrix(&mut rng, d, d);
        let norm = n.clone().svd(false, false).singular_values.max();
        let g = (DMatrix::identity(d, d) + n / norm) * 0.5;
        let oracle = Affine { g, shift: dv(&rng.vec(d, -1.0, 1.0)), m: DMatrix::identity(d, d) };
        let rho = if seed % 2 == 0 { 1.0 } else { 2.0 };
        let w0 = rng.vec(d, -1.0, 1.0);
        let mut s = AccelState::new(w0.clone(), 2.0, rho).unwrap();
        for _ in 0..1000 {
            s = accel_step(&s, &oracle).unwrap().0;
            let k = s.k() as f64;
            let dev: Vec<f64> = (0..d).map(|i| (k + 1.0) * s.w()[i] - k * s.w_hat()[i] - w0[i]).collect();
            worst = worst.max(dv(&dev).norm());
        }
    }
    outcome(worst <= 1e-9, format!("max ‖(k+1)wᵏ − kŵᵏ − w⁰‖ = {worst:.2e}"))
}

fn residual_bound() -> Outcome {
    let mut worst_margin = f64::NEG_INFINITY;
    for seed in 0..20u64 {
        let mut rng = Rng::new(200 + seed);
        let d = rng.int(2, 31);
        let rank = rng.int(0, d + 1);
        let f = random_matrix(&mut rng, d, rank);
        let h = random_matrix(&mut rng, d, d);
        let b = &f * f.transpose() + (&h - h.transpose()) + DMatrix::identity(d, d) * 0.1;
        let m = if seed % 2 == 0 {
            DMatrix::identity(d, d)
        } else {
            let rank = rng.int(1, d);
            let c = random_matrix(&mut rng, d, rank);
            &c * c.transpose()
        };
        let w_star = dv(&rng.vec(d, -1.0, 1.0));
        let q = &b * &w_star;
        // T̂w = (M + B)⁻¹(Mw + q)
        let inv = (&m + &b).try_inverse().unwrap();
        let oracle = Affine { g: &inv * &m, shift: &inv * q, m };
        let rho = if seed % 4 < 2 { 1.0 } else { 2.0 };
        let w0 = rng.vec(d, -1.0, 1.0);
        let gap: Vec<f64> = (0..d).map(|i| w0[i] - w_star[i]).collect();
        let bound = 2.0 * oracle.seminorm(&gap) + 1e-6;
        let mut s = AccelState::new(w0, 2.0, rho).unwrap();
        for k in 0..=5000usize {
            let (next, w_bar) = accel_step(&s, &oracle).unwrap();
            let lhs = (k + 1) as f64 * step_residual(s.w(), &w_bar, rho, &oracle);
            worst_margin = worst_margin.max(lhs - bound);
            s = next;
        }
    }
    outcome(worst_margin <= 0.0, format!("max (k+1)‖wᵏ−ŵᵏ⁺¹‖_M − bound = {worst_margin:.2e}"))
}

fn random_iterate(rng: &mut Rng, p: &QpProblem) -> DualIterate {
    let (n, m) = (p.n(), p.m());
    let mut w = DualIterate {
        y: rng.vec(n, -2.0, 2.0),
        qy: vec![0.0; n],
        z1: rng.vec(n, -2.0, 2.0),
        z2: rng.vec(m, -2.0, 2.0),
        x: rng.vec(n, -2.0, 2.0),
    };
    w.refresh_qy(&p.q);
    w
}

fn project(v: &DVector<f64>, p: &QpProblem) -> DVector<f64> {
    DVector::from_fn(v.len(), |i, _| v[i].clamp(p.l[i], p.u[i]))
}

/// Joint minimizer over `(z1, z2)` of
/// `δ*_C(−z1) − ⟨b,z2⟩ + ⟨x, B̃z⟩ + σ/2‖B̃z − Qy − c‖² + ½‖z − zᵏ‖²_T`
/// with `B̃ = [I Aᵀ]` and `T = UD⁻¹Uᵀ` built from the block split of
/// `σB̃ᵀB̃`. The smooth part is assembled densely, `z2` is eliminated by a
/// Schur complement and the remaining prox problem in `z1` is solved by
/// proximal gradient.
fn joint_z_oracle(p: &QpProblem, w: &DualIterate, sigma: f64) -> (Vec<f64>, Vec<f64>) {
    let (n, m) = (p.n(), p.m());
    let a = dense(&p.a);
    let mut bt = DMatrix::zeros(n, n + m);
    bt.view_mut((0, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
    bt.view_mut((0, n), (n, m)).copy_from(&a.transpose());
    let k = bt.transpose() * &bt * sigma;
    let mut upper = DMatrix::zeros(n + m, n + m);
    upper.view_mut((0, n), (n, m)).copy_from(&k.view((0, n), (n, m)));
    let mut diag = DMatrix::zeros(n + m, n + m);
    diag.view_mut((0, 0), (n, n)).copy_from(&k.view((0, 0), (n, n)));
    diag.view_mut((n, n), (m, m)).copy_from(&k.view((n, n), (m, m)));
    let t = &upper * diag.try_inverse().unwrap() * upper.transpose();
    let h = &k + &t;

    let zk = dv(&[&w.z1[..], &w.z2].concat());
    let shift: Vec<f64> = (0..n).map(|i| -w.qy[i] - p.c[i]).collect();
    let mut b_pad = DVector::zeros(n + m);
    b_pad.rows_mut(n, m).copy_from(&dv(&p.b));
    let lin = bt.transpose() * (dv(&w.x) + dv(&shift) * sigma) - b_pad - &t * zk;

    let h11 = h.view((0, 0), (n, n)).into_owned();
    let h12 = h.view((0, n), (n, m)).into_owned();
    let h22_inv = h.view((n, n), (m, m)).into_owned().try_inverse().unwrap();
    let hr = &h11 - &h12 * &h22_inv * h12.transpose();
    let hr = (&hr + hr.transpose()) * 0.5;
    let lr = lin.rows(0, n).into_owned() - &h12 * &h22_inv * lin.rows(n, m);
    let step = hr.clone().symmetric_eigen().eigenvalues.max();

    let mut z1 = DVector::zeros(n);
    for _ in 0..500 {
        let v = &z1 - (&hr * &z1 + &lr) / step;
        // argmin δ*_C(−u) + L/2‖u − v‖² = v + Π_C(−Lv)/L
        let next = &v + project(&(-&v * step), p) / step;
        let change = (&next - &z1).norm();
        z1 = next;
        if change <= 1e-16 * (1.0 + z1.norm()) {
            break;
        }
    }
    let z2 = -(&h22_inv * (lin.rows(n, m) + h12.transpose() * &z1));
    (z1.as_slice().to_vec(), z2.as_slice().to_vec())
}

fn sgs_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let mut rng = Rng::new(300 + seed);
        let n = rng.int(1, 13);
        let m = rng.int(0, n.min(6) + 1);
        let p = random_qp(300 + seed, n, m, false, Bounds::Mixed);
        let sigma = rng.unif(0.1, 10.0);
        let w = random_iterate(&mut rng, &p);
        let f = QpFactors::new(&p, sigma).unwrap();
        let (z1, z2) = sgs_z_update(&p, &f, &w).unwrap();
        let (o1, o2) = joint_z_oracle(&p, &w, sigma);
        let got = [z1, z2].concat();
        let want = [o1, o2].concat();
        let rel = dv(&got).metric_distance(&dv(&want)) / dv(&want).norm().max(1.0);
        worst = worst.max(rel);
    }
    outcome(worst <= 1e-9, format!("max relative error {worst:.2e}"))
}

/// `(M + T)⁻¹M` for a QP with free bounds, from the dense block form of
/// `M` and `T` on `w = (y, z1, z2, x)`:
///
/// ```text
/// M = [σQ²  0     0  −Q  ]     T(w) = (Qy − Qx,  ∂δ*(−z1) + x,  Ax − b,  c + Qy − z1 − Aᵀz2)
///     [0    σP_A  0   0  ]
///     [0    0     0   0  ]
///     [−Q   0     0  I/σ ]
/// ```
///
/// With `C = ℝⁿ` the z1-row forces `z̄1 = 0` and is replaced by that equation.
struct DenseResolvent {
    lhs_inv: DMatrix<f64>,
    m: DMatrix<f64>,
    t0: DVector<f64>,
    n: usize,
}

impl DenseResolvent {
    fn new(p: &QpProblem, sigma: f64) -> Self {
        let (n, m) = (p.n(), p.m());
        let d = 3 * n + m;
        let (q, a) = (dense(&p.q), dense(&p.a));
        let pa = a.transpose() * (&a * a.transpose()).try_inverse().unwrap() * &a;
        let (iy, iz1, iz2, ix) = (0, n, 2 * n, 2 * n + m);
        let eye = DMatrix::<f64>::identity(n, n);

        let mut mm = DMatrix::zeros(d, d);
        mm.view_mut((iy, iy), (n, n)).copy_from(&(&q * &q * sigma));
        mm.view_mut((iy, ix), (n, n)).copy_from(&(-&q));
        mm.view_mut((ix, iy), (n, n)).copy_from(&(-&q));
        mm.view_mut((iz1, iz1), (n, n)).copy_from(&(&pa * sigma));
        mm.view_mut((ix, ix), (n, n)).copy_from(&(&eye / sigma));

        let mut lt = DMatrix::zeros(d, d);
        lt.view_mut((iy, iy), (n, n)).copy_from(&q);
        lt.view_mut((iy, ix), (n, n)).copy_from(&(-&q));
        lt.view_mut((iz2, ix), (m, n)).copy_from(&a);
        lt.view_mut((ix, iy), (n, n)).copy_from(&q);
        lt.view_mut((ix, iz1), (n, n)).copy_from(&(-&eye));
        lt.view_mut((ix, iz2), (n, m)).copy_from(&(-a.transpose()));
        let mut t0 = DVector::zeros(d);
        t0.rows_mut(iz2, m).copy_from(&(-dv(&p.b)));
        t0.rows_mut(ix, n).copy_from(&dv(&p.c));

        let mut lhs = &mm + &lt;
        lhs.view_mut((iz1, 0), (n, d)).fill(0.0);
        lhs.view_mut((iz1, iz1), (n, n)).copy_from(&eye);
        Self { lhs_inv: lhs.try_inverse().unwrap(), m: mm, t0, n }
    }
}

impl ResolventOracle for DenseResolvent {
    type Point = Vec<f64>;
    type Error = Infallible;

    fn resolve(&self, w: &Vec<f64>) -> Result<Vec<f64>, Infallible> {
        let mut rhs = &self.m * dv(w) - &self.t0;
        rhs.rows_mut(self.n, self.n).fill(0.0);
        Ok((&self.lhs_inv * rhs).as_slice().to_vec())
    }

    fn seminorm(&self, w: &Vec<f64>) -> f64 {
        let w = dv(w);
        w.dot(&(&self.m * &w)).max(0.0).sqrt()
    }

    fn dim(&self) -> usize {
        self.t0.len()
    }
}

fn padmm_is_dppm() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let mut rng = Rng::new(400 + seed);
        let n = rng.int(2, 9);
        let m = rng.int(1, n);
        let p = random_qp(400 + seed, n, m, true, Bounds::Free);
        let sigma = rng.unif(0.2, 5.0);
        let rho = rng.unif(0.5, 1.9);
        let f = QpFactors::new(&p, sigma).unwrap();
        let tb = QpTwoBlock::new(&p, &f);
        let oracle = DenseResolvent::new(&p, sigma);
        let mut a = PadmmIterate {
            y: rng.vec(n, -1.0, 1.0),
            z: rng.vec(n + m, -1.0, 1.0),
            x: rng.vec(n, -1.0, 1.0),
        };
        let mut b = a.flatten();
        for _ in 0..200 {
            a = padmm_iterate(&a, &tb, sigma, rho).unwrap().0;
            b = dppm_step(&b, rho, &oracle).unwrap();
            let flat = a.flatten();
            let scale = 1.0 + flat.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            worst = worst.max(max_abs_diff(&flat, &b) / scale);
        }
    }
    outcome(worst <= 1e-10, format!("max deviation over 200 steps {worst:.2e}"))
}

/// Minimizer of a strictly convex QP by enumerating which bounds are active.
fn active_set_oracle(p: &QpProblem) -> Option<Vec<f64>> {
    let (n, m) = (p.n(), p.m());
    let (q, a) = (dense(&p.q), dense(&p.a));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..3usize.pow(n as u32) {
        // pattern digit: 0 free, 1 at lower, 2 at upper
        let pat: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        if (0..n).any(|i| (pat[i] == 1 && !p.l[i].is_finite()) || (pat[i] == 2 && !p.u[i].is_finite())) {
            continue;
        }
        let fixed: Vec<usize> = (0..n).filter(|&i| pat[i] != 0).collect();
        let d = n + m + fixed.len();
        // Qx + c − Aᵀλ − Σ μ_i e_i = 0,  Ax = b,  x_i = bound_i
        let mut k = DMatrix::zeros(d, d);
        let mut r = DVector::zeros(d);
        k.view_mut((0, 0), (n, n)).copy_from(&q);
        k.view_mut((0, n), (n, m)).copy_from(&(-a.transpose()));
        k.view_mut((n, 0), (m, n)).copy_from(&a);
        r.rows_mut(0, n).copy_from(&(-dv(&p.c)));
        r.rows_mut(n, m).copy_from(&dv(&p.b));
        for (t, &i) in fixed.iter().enumerate() {
            k[(i, n + m + t)] = -1.0;
            k[(n + m + t, i)] = 1.0;
            r[n + m + t] = if pat[i] == 1 { p.l[i] } else { p.u[i] };
        }
        let Some(sol) = k.lu().solve(&r) else { continue };
        if !sol.iter().all(|v| v.is_finite()) {
            continue;
        }
        let x: Vec<f64> = sol.rows(0, n).iter().copied().collect();
        let inside = (0..n).all(|i| x[i] >= p.l[i] - 1e-9 && x[i] <= p.u[i] + 1e-9);
        let signs = fixed.iter().enumerate().all(|(t, &i)| {
            let mu = sol[n + m + t];
            if pat[i] == 1 { mu >= -1e-9 } else { mu <= 1e-9 }
        });
        if inside && signs {
            let obj = p.primal_objective(&x);
            if best.as_ref().is_none_or(|(o, _)| obj < *o) {
                best = Some((obj, x));
            }
        }
    }
    best.map(|(_, x)| x)
}

fn tiny_qps() -> Outcome {
    let inf = f64::INFINITY;
    let mut problems = vec![QpProblem::new(
        "equality",
        SparseMatrix::identity(2),
        SparseMatrix::from_dense(1, 2, &[1.0, 1.0]).unwrap(),
        vec![1.0],
        vec![0.0; 2],
        vec![-inf; 2],
        vec![inf; 2],
        0.0,
    )
    .unwrap()];
    for seed in 0..9u64 {
        let mut rng = Rng::new(500 + seed);
        let n = rng.int(1, 7);
        let m = rng.int(0, (n - 1).min(2) + 1);
        let bounds = if seed % 3 == 2 { Bounds::Mixed } else { Bounds::Finite };
        let p = random_qp(500 + seed, n, m, true, bounds);
        problems.push(QpProblem { c: p.c.iter().map(|v| 4.0 * v).collect(), ..p });
    }
    let cfg = SolverConfig { tol: 1e-10, max_iter: 200_000, ..SolverConfig::acc(2.0) };
    let (mut worst_x, mut worst_obj, mut active, mut failures) = (0.0f64, 0.0f64, 0, Vec::new());
    for p in &problems {
        let Some(want) = active_set_oracle(p) else {
            failures.push(format!("{}: no oracle solution", p.name));
            continue;
        };
        active += (0..p.n()).filter(|&i| want[i] == p.l[i] || want[i] == p.u[i]).count();
        let r = run_solver(p, &cfg).unwrap();
        if r.status != SolveStatus::Solved {
            failures.push(format!("{}: {:?}", p.name, r.status));
        }
        let ox = p.primal_objective(&want);
        worst_x = worst_x.max(max_abs_diff(r.x(), &want));
        worst_obj = worst_obj.max((r.objective - ox).abs() / ox.abs().max(1.0));
    }
    let pass = failures.is_empty() && worst_x <= 1e-5 && worst_obj <= 1e-6;
    let mut detail = format!(
        "{} problems, {active} active bounds at the oracle solutions, max |x − x*| {worst_x:.2e}, max relative objective error {worst_obj:.2e}",
        problems.len()
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; {}", failures.join(", ")));
    }
    outcome(pass, detail)
}

fn load(name: &str) -> QpProblem {
    let path = common::corpus_dir().join(format!("{name}.QPS"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    to_standard_form(&parse_qps(&text).unwrap()).unwrap().0
}

fn iterations_or_cap(r: &accpadmm::qp::SolveResult, cap: usize) -> usize {
    if r.status == SolveStatus::Solved { r.iterations } else { cap }
}

fn desk_scale() -> Outcome {
    // (name, acc-pADMM α = 2 iterations reported for the reference run)
    const DESK: [(&str, usize); 5] =
        [("HS118", 300), ("QRECIPE", 1050), ("QSCORPIO", 350), ("GOULDQP3", 300), ("QSCAGR25", 3800)];
    const PADMM_CAP: usize = 30_000;
    let (mut acc_ok, mut slower, mut parts) = (true, 0, Vec::new());
    for (name, reference) in DESK {
        let p = load(name);
        let acc = run_solver(&p, &SolverConfig::acc(2.0)).unwrap();
        let plain = run_solver(&p, &SolverConfig { max_iter: PADMM_CAP, ..SolverConfig::padmm() }).unwrap();
        let fixed = run_solver(&p, &SolverConfig { sigma_update: SigmaPolicy::disabled(), ..SolverConfig::padmm() }).unwrap();
        let solved = acc.status == SolveStatus::Solved && acc.iterations <= 10_000;
        let ok = solved && acc.iterations <= 5 * reference;
        acc_ok &= ok;
        let pi = iterations_or_cap(&plain, PADMM_CAP);
        if pi >= 2 * acc.iterations {
            slower += 1;
        }
        let fixed_str = match fixed.status {
            SolveStatus::Solved => fixed.iterations.to_string(),
            _ => "max-iter".into(),
        };
        parts.push(format!(
            "{name}: acc {}{} pADMM {}{} fixed-σ pADMM {fixed_str}",
            acc.iterations,
            if ok { "" } else { " (!)" },
            if plain.status == SolveStatus::Solved { pi.to_string() } else { format!(">{PADMM_CAP}") },
            if pi >= 2 * acc.iterations { " (≥2×)" } else { "" },
        ));
    }
    let pass = acc_ok && slower >= 3;
    outcome(pass, format!("pADMM ≥ 2× acc on {slower}/5; {}", parts.join("; ")))
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn rate_slope() -> Outcome {
    const ITERS: usize = 10_000;
    let p = load("QSCAGR25");
    // (log k, residual·(k+1)) over the last decade, k counting from 0
    let decade = |alpha: f64| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let cfg = SolverConfig { max_iter: ITERS, tol: f64::MIN_POSITIVE, ..SolverConfig::rate(alpha) };
        let r = run_solver(&p, &cfg).unwrap();
        let tail: Vec<_> = r.records.iter().filter(|rec| rec.k - 1 >= ITERS / 10).collect();
        let logk = tail.iter().map(|rec| ((rec.k - 1) as f64).ln()).collect();
        let logr = tail.iter().map(|rec| rec.seminorm_res.ln()).collect();
        let scaled = tail.iter().map(|rec| rec.seminorm_res * rec.k as f64).collect();
        (logk, logr, scaled)
    };
    let (logk, logr, _) = decade(2.0);
    let s2 = slope(&logk, &logr);
    let (logk, _, scaled) = decade(30.0);
    let logs: Vec<f64> = scaled.iter().map(|v| v.ln()).collect();
    let s30 = slope(&logk, &logs);
    let (first, last) = (scaled[0], scaled[scaled.len() - 1]);
    let pass = s2 <= -0.8 && last < first && s30 < 0.0;
    outcome(
        pass,
        format!(
            "α=2 slope {s2:.3}; α=30 residual·(k+1) {first:.3e} → {last:.3e}, log-log slope {s30:.3}"
        ),
    )
}

fn parser_golden() -> Outcome {
    let mut bad_shapes = Vec::new();
    for (name, m, n) in common::REFERENCE_SHAPES {
        let p = load(name);
        if (p.m(), p.n()) != (m, n) {
            bad_shapes.push(format!("{name} ({},{}) vs ({m},{n})", p.m(), p.n()));
        }
    }
    let bad_dumps: Vec<&str> = common::GOLDEN
        .iter()
        .filter(|(name, reduced)| {
            let (got, want) = common::golden_pair(name, *reduced);
            got != want
        })
        .map(|(name, _)| *name)
        .collect();
    let pass = bad_shapes.is_empty() && bad_dumps.is_empty();
    let mut detail = format!(
        "shapes {}/25, golden dumps {}/12",
        25 - bad_shapes.len(),
        12 - bad_dumps.len()
    );
    if !bad_shapes.is_empty() {
        detail.push_str(&format!("; shape mismatches: {}", bad_shapes.join(", ")));
    }
    if !bad_dumps.is_empty() {
        detail.push_str(&format!("; dump mismatches: {}", bad_dumps.join(", ")));
    }
    outcome(pass, detail)
}

fn property_suites() -> Outcome {
    const CASES: u32 = 250;
    let runner = || {
        let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
    };
    let errors = [
        ("nonexpansive", runner().run(&props::qp_case(), props::nonexpansive).err().map(|e| e.to_string())),
        ("adjoint", runner().run(&props::qp_case(), props::adjoint).err().map(|e| e.to_string())),
        ("projection", runner().run(&props::box_case(), props::projection).err().map(|e| e.to_string())),
        ("factorization", runner().run(&props::spd_case(), props::factorization).err().map(|e| e.to_string())),
    ];
    let failed: Vec<String> =
        errors.iter().filter_map(|(n, e)| e.as_ref().map(|e| format!("{n}: {e}"))).collect();
    outcome(
        failed.is_empty(),
        if failed.is_empty() { format!("{} cases", 4 * CASES) } else { failed.join("; ") },
    )
}

fn main() -> ExitCode {
    // (name, runtime limit in seconds, check)
    let criteria: [(&str, f64, fn() -> Outcome); 9] = [
        ("halpern_identity", 5.0, halpern_identity),
        ("residual_bound", 10.0, residual_bound),
        ("sgs_equivalence", 5.0, sgs_equivalence),
        ("padmm_is_dppm", 5.0, padmm_is_dppm),
        ("tiny_qps", 10.0, tiny_qps),
        ("desk_scale", 120.0, desk_scale),
        ("rate_slope", 60.0, rate_slope),
        ("parser_golden", f64::INFINITY, parser_golden),
        ("property_suites", 10.0, property_suites),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let corpus = Path::new(&common::corpus_dir()).is_dir();
    let mut unexpected = 0;
    for (name, limit, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        if !corpus && matches!(name, "desk_scale" | "rate_slope" | "parser_golden") {
            println!("SKIP {name}: corpus directory not found");
            continue;
        }
        let start = Instant::now();
        let out = check();
        let secs = start.elapsed().as_secs_f64();
        let pass = out.pass && secs < limit;
        let expected_fail = EXPECTED_FAIL.contains(&name);
        let tag = match (pass, expected_fail) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
        };
        let limit_note = if out.pass && !pass { format!(", over the {limit} s limit") } else { String::new() };
        println!("{tag} {name} [{secs:.2} s{limit_note}]: {}", out.detail);
        if pass == expected_fail {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected outcome(s)");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
