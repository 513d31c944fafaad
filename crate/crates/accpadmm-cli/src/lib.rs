//! Subcommands behind the `accpadmm` binary.
//!
//! Each `cmd_*` function writes its report to the given writers and returns
//! a process exit code, so tests can drive them without spawning
//! a process.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use accpadmm::padmm::estimate_bound_norms;
use accpadmm::qp::{
    run_solver, run_solver_with, write_records_csv, QpError, QpFactors, QpProblem, QpTwoBlock,
    SigmaPolicy, SolveResult, SolveStatus, SolverConfig,
};
use accpadmm::qps::{dump_problem, parse_qps, to_standard_form_with, ConvertOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_SOLVED: i32 = 0;
pub const EXIT_MAX_ITER: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const CSV_HELP: &str = "\
CSV outputs:
  solve --log   k,kkt_res,r_p,r_d,r_qxy,r_comp,sigma,obj,seminorm_res,time_s
  bench         problem,m,n, then <cfg>_iter,<cfg>_time_s,<cfg>_kkt_res for
                cfg in padmm,acc2,acc15,acc30,acc45, then error; followed by
                mean, median, min and max rows
  rate          k,seminorm_res,kkt_res,abs_h

Exit codes: 0 solved or complete, 1 iteration limit, 2 input error,
3 numerical error.";

#[derive(Debug, Parser)]
#[command(name = "accpadmm", version, about = "Accelerated preconditioned ADMM for convex QPs", after_help = CSV_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one QPS file.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        flags: SolveFlags,
    },
    /// Run pADMM and acc-pADMM (α = 2, 15, 30, 45) on every QPS file in a directory.
    Bench {
        dir: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: SolveFlags,
    },
    /// Fixed-σ, restart-free run logging every iteration.
    Rate {
        path: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Optimal dual objective for |h|; computed by a tight solve when omitted.
        #[arg(long)]
        reference: Option<f64>,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the power iterations behind the bound constant.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the converted standard-form problem as text.
    Dump {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the structural reductions and range splitting.
        #[arg(long)]
        plain: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Padmm,
    Acc,
}

#[derive(Debug, Clone, Args)]
pub struct SolveFlags {
    #[arg(long, value_enum, default_value_t = Algo::Acc)]
    pub algo: Algo,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Relaxation factor; 2 for acc, 1.9 for padmm when omitted.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Initial σ.
    #[arg(long, default_value_t = 0.4)]
    pub sigma: f64,
    /// Keep σ fixed.
    #[arg(long)]
    pub fixed_sigma: bool,
    /// Disable periodic restarts of acc-pADMM.
    #[arg(long)]
    pub no_restart: bool,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 50)]
    pub check_every: usize,
    #[arg(long, default_value_t = 200)]
    pub restart_every: usize,
    /// Per-check iteration log (CSV).
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Accepted for reproducible scripting; the solve path draws no random numbers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Default for SolveFlags {
    fn default() -> Self {
        Self {
            algo: Algo::Acc,
            alpha: 2.0,
            rho: None,
            sigma: 0.4,
            fixed_sigma: false,
            no_restart: false,
            tol: 1e-5,
            max_iter: 10_000,
            check_every: 50,
            restart_every: 200,
            log: None,
            seed: 0,
        }
    }
}

impl SolveFlags {
    pub fn config(&self) -> SolverConfig {
        let mut cfg = match self.algo {
            Algo::Acc => SolverConfig::acc(self.alpha),
            Algo::Padmm => SolverConfig { alpha: self.alpha, ..SolverConfig::padmm() },
        };
        if let Some(rho) = self.rho {
            cfg.rho = rho;
        }
        cfg.sigma0 = self.sigma;
        if self.fixed_sigma {
            cfg.sigma_update = SigmaPolicy::disabled();
        }
        cfg.restart_every = match (self.algo, self.no_restart) {
            (Algo::Acc, false) => Some(self.restart_every),
            _ => None,
        };
        cfg.tol = self.tol;
        cfg.max_iter = self.max_iter;
        cfg.check_every = self.check_every;
        cfg
    }
}

/// Reads, parses and converts a QPS file. Errors are input errors.
pub fn load_problem(path: &Path, opts: ConvertOptions) -> Result<QpProblem, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = parse_qps(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let (p, _) = to_standard_form_with(&file, opts).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(p)
}

fn error_code(e: &QpError) -> i32 {
    match e {
        QpError::Invalid(_) | QpError::Config(_) => EXIT_INPUT,
        QpError::Linalg { .. } | QpError::Numerical(_) => EXIT_NUMERICAL,
    }
}

fn status_code(s: &SolveStatus) -> i32 {
    match s {
        SolveStatus::Solved => EXIT_SOLVED,
        SolveStatus::MaxIter => EXIT_MAX_ITER,
        SolveStatus::NumericalError(_) => EXIT_NUMERICAL,
    }
}

fn status_str(s: &SolveStatus) -> String {
    match s {
        SolveStatus::Solved => "Solved".into(),
        SolveStatus::MaxIter => "MaxIter".into(),
        SolveStatus::NumericalError(m) => format!("NumericalError({m})"),
    }
}

pub fn cmd_solve(path: &Path, flags: &SolveFlags, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let problem = match load_problem(path, ConvertOptions::default()) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let result = match run_solver(&problem, &flags.config()) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return error_code(&e);
        }
    };
    if let Some(log) = &flags.log {
        let written = fs::File::create(log)
            .map_err(|e| e.to_string())
            .and_then(|f| write_records_csv(f, &result.records).map_err(|e| e.to_string()));
        if let Err(e) = written {
            let _ = writeln!(err, "error: writing {}: {e}", log.display());
            return EXIT_INPUT;
        }
    }
    let _ = report(out, &problem, &result);
    status_code(&result.status)
}

fn report(out: &mut dyn Write, p: &QpProblem, r: &SolveResult) -> io::Result<()> {
    writeln!(out, "problem     {}", p.name)?;
    writeln!(out, "size        m={} n={}", p.m(), p.n())?;
    writeln!(out, "status      {}", status_str(&r.status))?;
    writeln!(out, "iterations  {}", r.iterations)?;
    writeln!(out, "kkt_res     {:e}", r.kkt.kkt_res)?;
    writeln!(out, "objective   {:e}", r.objective)?;
    writeln!(out, "sigma       {:e}", r.sigma)?;
    writeln!(out, "restarts    {}", r.restarts)?;
    writeln!(out, "time_s      {:.6}", r.time_s)
}

/// One run inside a [`BenchRow`].
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub iterations: usize,
    pub time_s: f64,
    pub kkt_res: f64,
    pub solved: bool,
}

/// Per-problem benchmark line: pADMM, then acc-pADMM at each of [`BENCH_ALPHAS`].
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub problem: String,
    pub m: usize,
    pub n: usize,
    pub runs: Vec<BenchRun>,
    pub error: Option<String>,
}

pub const BENCH_ALPHAS: [f64; 4] = [2.0, 15.0, 30.0, 45.0];
pub const BENCH_CONFIGS: [&str; 5] = ["padmm", "acc2", "acc15", "acc30", "acc45"];

pub fn bench_header() -> Vec<String> {
    let mut h = vec!["problem".to_string(), "m".into(), "n".into()];
    for c in BENCH_CONFIGS {
        h.push(format!("{c}_iter"));
        h.push(format!("{c}_time_s"));
        h.push(format!("{c}_kkt_res"));
    }
    h.push("error".into());
    h
}

fn bench_configs(flags: &SolveFlags) -> Vec<SolverConfig> {
    let mut cfgs = vec![SolveFlags { algo: Algo::Padmm, ..flags.clone() }.config()];
    for a in BENCH_ALPHAS {
        cfgs.push(SolveFlags { algo: Algo::Acc, alpha: a, ..flags.clone() }.config());
    }
    cfgs
}

pub fn bench_problem(path: &Path, flags: &SolveFlags) -> BenchRow {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut row = BenchRow { problem: name, m: 0, n: 0, runs: Vec::new(), error: None };
    let p = match load_problem(path, ConvertOptions::default()) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e);
            return row;
        }
    };
    row.problem = p.name.clone();
    row.m = p.m();
    row.n = p.n();
    for cfg in bench_configs(flags) {
        match run_solver(&p, &cfg) {
            Ok(r) => row.runs.push(BenchRun {
                iterations: r.iterations,
                time_s: r.time_s,
                kkt_res: r.kkt.kkt_res,
                solved: r.status == SolveStatus::Solved,
            }),
            Err(e) => {
                row.runs.clear();
                row.error = Some(e.to_string());
                return row;
            }
        }
    }
    row
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Mean, median, min and max of each numeric bench column over rows without errors.
pub fn bench_summary(rows: &[BenchRow]) -> Vec<(String, Vec<f64>)> {
    let ok: Vec<&BenchRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    if ok.is_empty() {
        return Vec::new();
    }
    let cols = 3 * BENCH_CONFIGS.len();
    let column = |c: usize| -> Vec<f64> {
        ok.iter()
            .map(|r| {
                let run = &r.runs[c / 3];
                match c % 3 {
                    0 => run.iterations as f64,
                    1 => run.time_s,
                    _ => run.kkt_res,
                }
            })
            .collect()
    };
    let mut stats = vec![Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for c in 0..cols {
        let mut v = column(c);
        stats[0].push(v.iter().sum::<f64>() / v.len() as f64);
        stats[1].push(median(&mut v));
        stats[2].push(v.iter().cloned().fold(f64::INFINITY, f64::min));
        stats[3].push(v.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
    ["mean", "median", "min", "max"].iter().map(|s| s.to_string()).zip(stats).collect()
}

/// Mean over problems of `1 − iter(acc, α=15) / iter(pADMM)`.
pub fn mean_reduction(rows: &[BenchRow]) -> Option<f64> {
    let r: Vec<f64> = rows
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| 1.0 - r.runs[2].iterations as f64 / r.runs[0].iterations as f64)
        .collect();
    (!r.is_empty()).then(|| r.iter().sum::<f64>() / r.len() as f64)
}

pub fn write_bench_csv<W: Write>(out: W, rows: &[BenchRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(bench_header())?;
    for r in rows {
        let mut rec = vec![r.problem.clone(), r.m.to_string(), r.n.to_string()];
        if r.error.is_some() {
            rec.extend(std::iter::repeat_n(String::new(), 3 * BENCH_CONFIGS.len()));
        } else {
            for run in &r.runs {
                rec.push(run.iterations.to_string());
                rec.push(format!("{:.6}", run.time_s));
                rec.push(format!("{:e}", run.kkt_res));
            }
        }
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec)?;
    }
    for (label, vals) in bench_summary(rows) {
        let mut rec = vec![label, String::new(), String::new()];
        rec.extend(vals.iter().map(|v| format!("{v:e}")));
        rec.push(String::new());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// QPS files in `dir`, sorted by name.
pub fn qps_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("qps") || x.eq_ignore_ascii_case("mps")))
        .collect();
    files.sort();
    Ok(files)
}

pub fn cmd_bench(dir: &Path, out: &Option<PathBuf>, flags: &SolveFlags, stdout: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let files = match qps_files(dir) {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", dir.display());
            return EXIT_INPUT;
        }
    };
    let rows: Vec<BenchRow> = files
        .iter()
        .map(|f| {
            let row = bench_problem(f, flags);
            let _ = writeln!(err, "{}: {}", row.problem, row.error.as_deref().unwrap_or("done"));
            row
        })
        .collect();
    let written = match out {
        Some(p) => fs::File::create(p).map_err(csv::Error::from).and_then(|f| write_bench_csv(f, &rows)),
        None => {
            let mut buf = Vec::new();
            let r = write_bench_csv(&mut buf, &rows);
            let _ = stdout.write_all(&buf);
            r
        }
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    if let Some(red) = mean_reduction(&rows) {
        let _ = writeln!(err, "mean iteration reduction of acc (alpha=15) vs padmm: {:.1}%", 100.0 * red);
    }
    EXIT_SOLVED
}

/// One line of the rate log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub k: usize,
    pub seminorm_res: f64,
    pub kkt_res: f64,
    pub abs_h: f64,
}

pub fn rate_config(alpha: f64, sigma: f64, max_iter: usize) -> SolverConfig {
    SolverConfig { sigma0: sigma, max_iter, tol: f64::MIN_POSITIVE, ..SolverConfig::rate(alpha) }
}

/// Dual objective at high accuracy, for `|h|` when no reference is given.
pub fn reference_dual_objective(p: &QpProblem) -> Result<f64, QpError> {
    let cfg = SolverConfig { tol: 1e-9, max_iter: 100_000, ..SolverConfig::acc(2.0) };
    let r = run_solver(p, &cfg)?;
    let w = &r.iterate;
    Ok(p.dual_objective(&w.y, &w.qy, &w.z1, &w.z2))
}

/// Runs the rate protocol and returns one point per iteration.
pub fn rate_points(p: &QpProblem, alpha: f64, sigma: f64, max_iter: usize, reference: f64) -> Result<Vec<RatePoint>, QpError> {
    let scale = if reference == 0.0 { 1.0 } else { reference.abs() };
    let r = run_solver_with(p, &rate_config(alpha, sigma, max_iter), None, |_| {})?;
    Ok(r.records
        .iter()
        .map(|rec| RatePoint {
            k: rec.k,
            seminorm_res: rec.seminorm_res,
            kkt_res: rec.kkt_res,
            abs_h: (rec.dual_obj - reference).abs() / scale,
        })
        .collect())
}

pub fn write_rate_csv<W: Write>(out: W, points: &[RatePoint]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "seminorm_res", "kkt_res", "abs_h"])?;
    for pt in points {
        w.write_record([pt.k.to_string(), format!("{:e}", pt.seminorm_res), format!("{:e}", pt.kkt_res), format!("{:e}", pt.abs_h)])?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_rate(
    path: &Path,
    alpha: f64,
    sigma: f64,
    max_iter: usize,
    reference: Option<f64>,
    out: &Option<PathBuf>,
    seed: u64,
    stdout: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let p = match load_problem(path, ConvertOptions::default()) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let reference = match reference {
        Some(r) => r,
        None => match reference_dual_objective(&p) {
            Ok(r) => r,
            Err(e) => {
                let _ = writeln!(err, "error: reference solve: {e}");
                return error_code(&e);
            }
        },
    };
    let points = match rate_points(&p, alpha, sigma, max_iter, reference) {
        Ok(pts) => pts,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return error_code(&e);
        }
    };
    if let Ok(f) = QpFactors::new(&p, sigma) {
        let norms = estimate_bound_norms(&QpTwoBlock::new(&p, &f), sigma, seed);
        let c = (sigma * norms.b1_adj + 1.0) / sigma.sqrt() + norms.sqrt_t2 + norms.sqrt_t1;
        let _ = writeln!(err, "reference dual objective {reference:e}; bound constant {c:e}");
    }
    let written = match out {
        Some(path) => fs::File::create(path).map_err(csv::Error::from).and_then(|f| write_rate_csv(f, &points)),
        None => {
            let mut buf = Vec::new();
            let r = write_rate_csv(&mut buf, &points);
            let _ = stdout.write_all(&buf);
            r
        }
    };
    match written {
        Ok(()) => EXIT_SOLVED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn cmd_dump(path: &Path, out: &Option<PathBuf>, plain: bool, stdout: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let opts = if plain { ConvertOptions::plain() } else { ConvertOptions::default() };
    let p = match load_problem(path, opts) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let text = dump_problem(&p);
    let written = match out {
        Some(path) => fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => EXIT_SOLVED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Solve { path, flags } => cmd_solve(&path, &flags, stdout, stderr),
        Command::Bench { dir, out, flags } => cmd_bench(&dir, &out, &flags, stdout, stderr),
        Command::Rate { path, alpha, sigma, max_iter, reference, out, seed } => {
            cmd_rate(&path, alpha, sigma, max_iter, reference, &out, seed, stdout, stderr)
        }
        Command::Dump { path, out, plain } => cmd_dump(&path, &out, plain, stdout, stderr),
    }
}
