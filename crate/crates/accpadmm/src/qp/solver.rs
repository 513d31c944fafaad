use std::io;
use std::time::Instant;

use super::{DualIterate, QpError, QpFactors, QpProblem, QpResolvent};
use crate::linalg::{norm2, project_box};
use crate::splitting::{accel_step, restart, step_residual, AccelState, Point, ResolventOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Padmm,
    AccPadmm,
}

/// Point that becomes the new anchor on restart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestartAnchor {
    /// The resolvent output `w̄ᵏ` of the step that triggered the restart.
    WBar,
    /// The iterate `wᵏ⁺¹`.
    W,
}

/// Which residual ratio drives σ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaRatio {
    /// `r_p / r_d`: primal over dual feasibility of the QP.
    QpFeasibility,
    /// `r_d / max(r_p, r_qxy, r_comp)`: constraint violation of the dual
    /// two-block problem over the optimality residual of its multiplier.
    SplittingBalance,
}

/// Residual balancing: σ ← σ·factor when θ > threshold, σ ← σ/factor when
/// θ < 1/threshold, at most once every `cooldown` checks, clamped to
/// `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPolicy {
    pub enabled: bool,
    pub ratio: SigmaRatio,
    pub threshold: f64,
    pub factor: f64,
    pub cooldown: usize,
    pub min: f64,
    pub max: f64,
}

impl Default for SigmaPolicy {
    fn default() -> Self {
        Self {
            enabled: true,
            ratio: SigmaRatio::SplittingBalance,
            threshold: 5.0,
            factor: 1.5,
            cooldown: 2,
            min: 1e-8,
            max: 1e8,
        }
    }
}

impl SigmaPolicy {
    pub fn disabled() -> Self {
        Self { enabled: false, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub sigma0: f64,
    pub rho: f64,
    pub alpha: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub check_every: usize,
    /// `None` disables periodic restarts.
    pub restart_every: Option<usize>,
    pub restart_anchor: RestartAnchor,
    pub sigma_update: SigmaPolicy,
    pub algorithm: Algorithm,
    /// Also record every `r`-th iteration, without testing for termination.
    pub record_every: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::acc(2.0)
    }
}

impl SolverConfig {
    /// Accelerated variant: `ρ = 2`, restarts every 200 steps, `σ₀ = 0.4`.
    pub fn acc(alpha: f64) -> Self {
        Self {
            sigma0: 0.4,
            rho: 2.0,
            alpha,
            tol: 1e-5,
            max_iter: 10_000,
            check_every: 50,
            restart_every: Some(200),
            restart_anchor: RestartAnchor::WBar,
            sigma_update: SigmaPolicy::default(),
            algorithm: Algorithm::AccPadmm,
            record_every: None,
        }
    }

    /// Plain relaxed pADMM with `ρ = 1.9`.
    pub fn padmm() -> Self {
        Self { rho: 1.9, algorithm: Algorithm::Padmm, restart_every: None, ..Self::acc(2.0) }
    }

    /// Fixed σ = 1, no restarts, every iteration recorded.
    pub fn rate(alpha: f64) -> Self {
        Self {
            sigma0: 1.0,
            sigma_update: SigmaPolicy::disabled(),
            restart_every: None,
            record_every: Some(1),
            ..Self::acc(alpha)
        }
    }

    pub fn validate(&self) -> Result<(), QpError> {
        let bad = |s: String| Err(QpError::Config(s));
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return bad(format!("sigma {} must be positive", self.sigma0));
        }
        if !(self.rho > 0.0 && self.rho <= 2.0) {
            return bad(format!("rho {} outside (0, 2]", self.rho));
        }
        if !(self.alpha >= 2.0 && self.alpha.is_finite()) {
            return bad(format!("alpha {} must be >= 2", self.alpha));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tolerance {} must be positive", self.tol));
        }
        if self.check_every == 0 || self.restart_every == Some(0) || self.record_every == Some(0) {
            return bad("check, restart and record periods must be positive".into());
        }
        let p = &self.sigma_update;
        if p.enabled && !(p.factor > 1.0 && p.threshold >= 1.0 && p.min > 0.0 && p.min <= p.max) {
            return bad("sigma policy needs factor > 1, threshold >= 1 and 0 < min <= max".into());
        }
        Ok(())
    }
}

/// The four relative residuals and their maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeKkt {
    pub r_p: f64,
    pub r_d: f64,
    pub r_qxy: f64,
    pub r_comp: f64,
    pub kkt_res: f64,
}

/// ```text
/// r_p    = ‖Ax − b‖ / (1 + ‖b‖)
/// r_d    = ‖−Qy + z1 + Aᵀz2 − c‖ / (1 + ‖c‖)
/// r_qxy  = ‖Qx − Qy‖ / (1 + ‖Qx‖ + ‖Qy‖)
/// r_comp = ‖x − Π_C(x − z1)‖ / (1 + ‖x‖ + ‖z1‖)
/// ```
pub fn relative_kkt(p: &QpProblem, w: &DualIterate) -> RelativeKkt {
    let n = p.n();
    let (r_p, atz) = if p.m() > 0 {
        let ax = p.a.spmv(&w.x).expect("x dimension");
        let res: Vec<f64> = ax.iter().zip(&p.b).map(|(a, b)| a - b).collect();
        (norm2(&res) / (1.0 + norm2(&p.b)), p.a.spmv_transpose(&w.z2).expect("z2 dimension"))
    } else {
        (0.0, vec![0.0; n])
    };
    let dres: Vec<f64> = (0..n).map(|i| -w.qy[i] + w.z1[i] + atz[i] - p.c[i]).collect();
    let r_d = norm2(&dres) / (1.0 + norm2(&p.c));

    let qx = p.q.spmv(&w.x).expect("x dimension");
    let diff: Vec<f64> = qx.iter().zip(&w.qy).map(|(a, b)| a - b).collect();
    let r_qxy = norm2(&diff) / (1.0 + norm2(&qx) + norm2(&w.qy));

    let shifted: Vec<f64> = w.x.iter().zip(&w.z1).map(|(a, b)| a - b).collect();
    let proj = project_box(&shifted, &p.l, &p.u).expect("bounds validated at construction");
    let comp: Vec<f64> = w.x.iter().zip(&proj).map(|(a, b)| a - b).collect();
    let r_comp = norm2(&comp) / (1.0 + norm2(&w.x) + norm2(&w.z1));

    // NaN must win the max so that blow-ups are caught
    let kkt_res = [r_p, r_d, r_qxy, r_comp].into_iter().fold(0.0, |a: f64, b| if b.is_nan() || b > a { b } else { a });
    RelativeKkt { r_p, r_d, r_qxy, r_comp, kkt_res }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Number of resolvent evaluations so far.
    pub k: usize,
    pub kkt_res: f64,
    pub r_p: f64,
    pub r_d: f64,
    pub r_qxy: f64,
    pub r_comp: f64,
    pub sigma: f64,
    /// Primal objective at `x̄`.
    pub obj: f64,
    /// Dual objective at `(ȳ, z̄)`.
    pub dual_obj: f64,
    /// `‖wᵏ − ŵᵏ⁺¹‖_M` under the σ in force.
    pub seminorm_res: f64,
    pub time_s: f64,
}

pub const CSV_HEADER: [&str; 10] =
    ["k", "kkt_res", "r_p", "r_d", "r_qxy", "r_comp", "sigma", "obj", "seminorm_res", "time_s"];

impl IterationRecord {
    pub fn csv_fields(&self) -> [String; 10] {
        [
            self.k.to_string(),
            format!("{:e}", self.kkt_res),
            format!("{:e}", self.r_p),
            format!("{:e}", self.r_d),
            format!("{:e}", self.r_qxy),
            format!("{:e}", self.r_comp),
            format!("{:e}", self.sigma),
            format!("{:e}", self.obj),
            format!("{:e}", self.seminorm_res),
            format!("{:.6}", self.time_s),
        ]
    }
}

pub fn write_records_csv<W: io::Write>(out: W, records: &[IterationRecord]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Residual balancing on the latest record. Returns `(σ_new, changed)`.
///
/// A change is allowed when σ has been in force for at least `cooldown`
/// records, or has never changed.
pub fn adapt_sigma(history: &[IterationRecord], sigma: f64, policy: &SigmaPolicy) -> (f64, bool) {
    let Some(last) = history.last() else {
        return (sigma, false);
    };
    if !policy.enabled {
        return (sigma, false);
    }
    let trailing = history.iter().rev().take_while(|r| r.sigma == sigma).count();
    if trailing < policy.cooldown && trailing < history.len() {
        return (sigma, false);
    }
    let (num, den) = match policy.ratio {
        SigmaRatio::QpFeasibility => (last.r_p, last.r_d),
        SigmaRatio::SplittingBalance => (last.r_d, last.r_p.max(last.r_qxy).max(last.r_comp)),
    };
    let theta = if num == 0.0 && den == 0.0 { 1.0 } else { num / den.max(f64::MIN_POSITIVE) };
    let target = if theta > policy.threshold {
        sigma * policy.factor
    } else if theta < 1.0 / policy.threshold {
        sigma / policy.factor
    } else {
        sigma
    };
    let new = target.clamp(policy.min, policy.max);
    (new, new != sigma)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Solved,
    MaxIter,
    NumericalError(String),
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// `w̄` of the last step.
    pub iterate: DualIterate,
    pub iterations: usize,
    pub kkt: RelativeKkt,
    pub objective: f64,
    pub sigma: f64,
    pub restarts: usize,
    pub sigma_changes: usize,
    pub records: Vec<IterationRecord>,
    pub time_s: f64,
}

impl SolveResult {
    pub fn x(&self) -> &[f64] {
        &self.iterate.x
    }
}

pub fn run_solver(problem: &QpProblem, config: &SolverConfig) -> Result<SolveResult, QpError> {
    run_solver_with(problem, config, None, |_| {})
}

/// Full solve loop. `observer` sees every record as it is produced;
/// `warm_start` replaces `w⁰ = 0`.
pub fn run_solver_with(
    problem: &QpProblem,
    config: &SolverConfig,
    warm_start: Option<DualIterate>,
    mut observer: impl FnMut(&IterationRecord),
) -> Result<SolveResult, QpError> {
    config.validate()?;
    let start = Instant::now();
    let (n, m) = (problem.n(), problem.m());
    let mut sigma = config.sigma0;
    let mut factors = QpFactors::new(problem, sigma)?;
    let w0 = match warm_start {
        Some(w) if w.y.len() == n && w.z1.len() == n && w.x.len() == n && w.z2.len() == m => w,
        Some(_) => return Err(QpError::Invalid("warm start has wrong dimensions".into())),
        None => DualIterate::zeros(n, m),
    };
    let accelerated = config.algorithm == Algorithm::AccPadmm;
    let mut plain = w0.clone();
    let mut acc = AccelState::new(w0.clone(), config.alpha, config.rho).map_err(QpError::Config)?;

    let mut records = Vec::new();
    let mut checks: Vec<IterationRecord> = Vec::new();
    let mut status = SolveStatus::MaxIter;
    let mut last_bar = w0;
    let mut last_kkt = relative_kkt(problem, &last_bar);
    let mut iterations = 0;
    let mut restarts = 0;
    let mut sigma_changes = 0;

    for it in 0..config.max_iter {
        let iters = it + 1;
        let check = iters % config.check_every == 0 || iters == config.max_iter;
        let record = check || config.record_every.is_some_and(|r| iters % r == 0);

        let oracle = QpResolvent::new(problem, &factors);
        let (w_bar, seminorm_res) = if accelerated {
            let (next, w_bar) = accel_step(&acc, &oracle).map_err(|e| QpError::Numerical(e.to_string()))?;
            let res = if record { step_residual(acc.w(), &w_bar, config.rho, &oracle) } else { 0.0 };
            acc = next;
            (w_bar, res)
        } else {
            let w_bar = oracle.resolve(&plain)?;
            let res = if record { step_residual(&plain, &w_bar, config.rho, &oracle) } else { 0.0 };
            let mut next = w_bar.clone();
            next.lincomb(config.rho, &plain, 1.0 - config.rho);
            plain = next;
            (w_bar, res)
        };
        iterations = iters;

        if record {
            let kkt = relative_kkt(problem, &w_bar);
            let rec = IterationRecord {
                k: iters,
                kkt_res: kkt.kkt_res,
                r_p: kkt.r_p,
                r_d: kkt.r_d,
                r_qxy: kkt.r_qxy,
                r_comp: kkt.r_comp,
                sigma,
                obj: problem.primal_objective(&w_bar.x),
                dual_obj: problem.dual_objective(&w_bar.y, &w_bar.qy, &w_bar.z1, &w_bar.z2),
                seminorm_res,
                time_s: start.elapsed().as_secs_f64(),
            };
            observer(&rec);
            records.push(rec);
            last_kkt = kkt;
            if !kkt.kkt_res.is_finite() {
                status = SolveStatus::NumericalError(format!("non-finite residual at iteration {iters}"));
                last_bar = w_bar;
                break;
            }
            if check {
                checks.push(rec);
                if kkt.kkt_res <= config.tol {
                    status = SolveStatus::Solved;
                    last_bar = w_bar;
                    break;
                }
                let (new_sigma, changed) = adapt_sigma(&checks, sigma, &config.sigma_update);
                if changed {
                    sigma = new_sigma;
                    sigma_changes += 1;
                    factors = match factors.with_sigma(problem, sigma) {
                        Ok(f) => f,
                        Err(e) => {
                            status = SolveStatus::NumericalError(e.to_string());
                            last_bar = w_bar;
                            break;
                        }
                    };
                    if accelerated {
                        acc = restart(&acc, anchor(config.restart_anchor, &w_bar, acc.w()));
                        restarts += 1;
                    }
                }
            }
        }
        if accelerated && config.restart_every.is_some_and(|r| acc.k() >= r) {
            acc = restart(&acc, anchor(config.restart_anchor, &w_bar, acc.w()));
            restarts += 1;
        }
        last_bar = w_bar;
    }

    Ok(SolveResult {
        status,
        objective: problem.primal_objective(&last_bar.x),
        iterate: last_bar,
        iterations,
        kkt: last_kkt,
        sigma,
        restarts,
        sigma_changes,
        records,
        time_s: start.elapsed().as_secs_f64(),
    })
}

fn anchor(kind: RestartAnchor, w_bar: &DualIterate, w: &DualIterate) -> DualIterate {
    match kind {
        RestartAnchor::WBar => w_bar.clone(),
        RestartAnchor::W => w.clone(),
    }
}
