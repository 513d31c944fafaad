use std::collections::BTreeMap;

use super::{BoundType, QpsError, QpsFile, RowType, INFINITY_THRESHOLD};
use crate::linalg::SparseMatrix;
use crate::qp::QpProblem;

/// Structural reductions applied before slacks are added. Each removes rows
/// or columns without changing the optimal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reductions {
    /// Rows without entries.
    pub empty_rows: bool,
    /// One-entry rows become column bounds.
    pub singleton_rows: bool,
    /// Columns with `l = u` are substituted out.
    pub fixed_columns: bool,
    /// Columns outside `A` whose `Q` part is at most a diagonal entry are
    /// fixed at their one-dimensional minimizer.
    pub empty_columns: bool,
    /// A free column with no quadratic term appearing only in one equality
    /// row is eliminated together with that row.
    pub free_column_singletons: bool,
    /// Equality rows with two entries eliminate one column (without
    /// quadratic terms), moving its bounds onto the other.
    pub doubleton_equations: bool,
}

impl Reductions {
    pub fn all() -> Self {
        Self {
            empty_rows: true,
            singleton_rows: true,
            fixed_columns: true,
            empty_columns: true,
            free_column_singletons: true,
            doubleton_equations: true,
        }
    }

    pub fn none() -> Self {
        Self {
            empty_rows: false,
            singleton_rows: false,
            fixed_columns: false,
            empty_columns: false,
            free_column_singletons: false,
            doubleton_equations: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvertOptions {
    pub reductions: Reductions,
    /// Ranged rows become two one-sided rows with a slack each, instead of
    /// one row with a doubly bounded slack.
    pub split_ranges: bool,
}

impl Default for ConvertOptions {
    fn default() -> Self {
        Self { reductions: Reductions::all(), split_ranges: true }
    }
}

impl ConvertOptions {
    /// Row-by-row conversion: one slack per inequality or ranged row, nothing removed.
    pub fn plain() -> Self {
        Self { reductions: Reductions::none(), split_ranges: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReductionCounts {
    pub empty_rows: usize,
    pub singleton_rows: usize,
    pub fixed_columns: usize,
    pub empty_columns: usize,
    pub free_column_singletons: usize,
    pub doubleton_equations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConversionReport {
    pub original_eq: usize,
    pub original_ineq: usize,
    pub original_n: usize,
    pub ranged_rows: usize,
    pub rows_removed: usize,
    pub cols_removed: usize,
    /// Extra rows created by splitting ranged rows.
    pub rows_split: usize,
    pub slacks: usize,
    /// BOUNDS records applied to columns.
    pub bound_translations: usize,
    pub reductions: ReductionCounts,
    pub obj_const: f64,
    pub m: usize,
    pub n: usize,
    pub warnings: Vec<String>,
}

pub fn to_standard_form(file: &QpsFile) -> Result<(QpProblem, ConversionReport), QpsError> {
    to_standard_form_with(file, ConvertOptions::default())
}

fn finite_or_inf(v: f64) -> f64 {
    if v >= INFINITY_THRESHOLD {
        f64::INFINITY
    } else if v <= -INFINITY_THRESHOLD {
        f64::NEG_INFINITY
    } else {
        v
    }
}

pub fn to_standard_form_with(
    file: &QpsFile,
    opts: ConvertOptions,
) -> Result<(QpProblem, ConversionReport), QpsError> {
    let m0 = file.rows.len();
    let n0 = file.columns.len();
    let mut report = ConversionReport {
        original_n: n0,
        original_eq: file.rows.iter().filter(|r| r.0 == RowType::E).count(),
        ..Default::default()
    };
    report.original_ineq = m0 - report.original_eq;
    report.warnings = file.warnings.clone();

    // row intervals
    let mut rhs = vec![0.0; m0];
    for &(r, v) in &file.rhs {
        rhs[r] = v;
    }
    let mut range: Vec<Option<f64>> = vec![None; m0];
    for &(r, v) in &file.ranges {
        range[r] = Some(finite_or_inf(v));
    }
    let mut rl = vec![0.0; m0];
    let mut ru = vec![0.0; m0];
    for (i, (ty, _)) in file.rows.iter().enumerate() {
        let b = rhs[i];
        let (lo, hi) = match (ty, range[i]) {
            (RowType::E, None) => (b, b),
            (RowType::E, Some(r)) if r >= 0.0 => (b, b + r),
            (RowType::E, Some(r)) => (b + r, b),
            (RowType::L, None) => (f64::NEG_INFINITY, b),
            (RowType::L, Some(r)) => (b - r.abs(), b),
            (RowType::G, None) => (b, f64::INFINITY),
            (RowType::G, Some(r)) => (b, b + r.abs()),
            (RowType::N, _) => unreachable!("objective rows are not stored"),
        };
        rl[i] = lo;
        ru[i] = hi;
        if range[i].is_some() && lo != hi {
            report.ranged_rows += 1;
        }
    }

    // column bounds, MPS defaults [0, ∞)
    let mut lb = vec![0.0; n0];
    let mut ub = vec![f64::INFINITY; n0];
    let mut lower_set = vec![false; n0];
    for &(ty, j, v) in &file.bounds {
        let v = finite_or_inf(v);
        match ty {
            BoundType::Up => {
                ub[j] = v;
                if v < 0.0 && !lower_set[j] && lb[j] == 0.0 {
                    lb[j] = f64::NEG_INFINITY;
                    report.warnings.push(format!(
                        "negative upper bound on {} with default lower bound; lower set to -inf",
                        file.columns[j]
                    ));
                }
            }
            BoundType::Lo => {
                lb[j] = v;
                lower_set[j] = true;
            }
            BoundType::Fx => {
                lb[j] = v;
                ub[j] = v;
                lower_set[j] = true;
            }
            BoundType::Fr => {
                lb[j] = f64::NEG_INFINITY;
                ub[j] = f64::INFINITY;
                lower_set[j] = true;
            }
            BoundType::Mi => {
                lb[j] = f64::NEG_INFINITY;
                lower_set[j] = true;
            }
            BoundType::Pl => ub[j] = f64::INFINITY,
        }
        report.bound_translations += 1;
    }
    for j in 0..n0 {
        if lb[j] > ub[j] {
            return Err(QpsError::InfeasibleBounds { column: file.columns[j].clone(), lower: lb[j], upper: ub[j] });
        }
    }

    let mut c = vec![0.0; n0];
    for &(j, v) in &file.objective {
        c[j] += v;
    }

    let mut w = Work::new(file, m0, n0, c, rl, ru, lb, ub);
    // 0 − v keeps a zero constant positive
    w.obj_const = 0.0 - file.objective_rhs;
    w.reduce(opts.reductions, &mut report.reductions)?;
    w.emit(file, opts, report)
}

struct Work {
    rows: Vec<Option<BTreeMap<usize, f64>>>,
    cols: Vec<Option<BTreeMap<usize, f64>>>,
    q: Vec<BTreeMap<usize, f64>>,
    c: Vec<f64>,
    rl: Vec<f64>,
    ru: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    obj_const: f64,
    names: Vec<String>,
}

impl Work {
    #[allow(clippy::too_many_arguments)]
    fn new(
        file: &QpsFile,
        m0: usize,
        n0: usize,
        c: Vec<f64>,
        rl: Vec<f64>,
        ru: Vec<f64>,
        lb: Vec<f64>,
        ub: Vec<f64>,
    ) -> Self {
        let mut rows = vec![BTreeMap::new(); m0];
        let mut cols = vec![BTreeMap::new(); n0];
        for &(i, j, v) in &file.entries {
            if v != 0.0 {
                rows[i].insert(j, v);
                cols[j].insert(i, v);
            }
        }
        // lower triangle listed once, mirrored; a diagonal entry counts once
        let mut q = vec![BTreeMap::new(); n0];
        for &(a, b, v) in &file.quadobj {
            *q[a].entry(b).or_insert(0.0) += v;
            if a != b {
                *q[b].entry(a).or_insert(0.0) += v;
            }
        }
        for col in q.iter_mut() {
            col.retain(|_, v| *v != 0.0);
        }
        Self {
            rows: rows.into_iter().map(Some).collect(),
            cols: cols.into_iter().map(Some).collect(),
            q,
            c,
            rl,
            ru,
            lb,
            ub,
            obj_const: 0.0,
            names: file.columns.clone(),
        }
    }

    fn remove_row(&mut self, i: usize) {
        if let Some(r) = self.rows[i].take() {
            for j in r.keys() {
                if let Some(col) = self.cols[*j].as_mut() {
                    col.remove(&i);
                }
            }
        }
    }

    /// Substitutes `x_j = val` everywhere.
    fn remove_col(&mut self, j: usize, val: f64) {
        let col = self.cols[j].take().unwrap_or_default();
        for (&i, &a) in &col {
            if let Some(r) = self.rows[i].as_mut() {
                r.remove(&j);
            }
            self.rl[i] -= a * val;
            self.ru[i] -= a * val;
        }
        let qj = std::mem::take(&mut self.q[j]);
        for (&k, &v) in &qj {
            if k == j {
                self.obj_const += 0.5 * v * val * val;
            } else {
                self.c[k] += v * val;
                self.q[k].remove(&j);
            }
        }
        self.obj_const += self.c[j] * val;
    }

    fn tighten(&mut self, j: usize, lo: f64, hi: f64) -> Result<(), QpsError> {
        self.lb[j] = self.lb[j].max(lo);
        self.ub[j] = self.ub[j].min(hi);
        if self.lb[j] > self.ub[j] {
            if self.lb[j] - self.ub[j] > 1e-9 * (1.0 + self.ub[j].abs()) {
                return Err(QpsError::InfeasibleBounds {
                    column: self.names[j].clone(),
                    lower: self.lb[j],
                    upper: self.ub[j],
                });
            }
            self.lb[j] = self.ub[j];
        }
        Ok(())
    }

    fn reduce(&mut self, red: Reductions, counts: &mut ReductionCounts) -> Result<(), QpsError> {
        let (m0, n0) = (self.rows.len(), self.cols.len());
        let mut changed = true;
        while changed {
            changed = false;

            for i in 0..m0 {
                let Some(r) = &self.rows[i] else { continue };
                if r.is_empty() && red.empty_rows {
                    if self.rl[i] > 1e-9 || self.ru[i] < -1e-9 {
                        return Err(QpsError::InfeasibleRow { row: format!("#{i}"), lower: self.rl[i], upper: self.ru[i] });
                    }
                    self.remove_row(i);
                    counts.empty_rows += 1;
                    changed = true;
                } else if r.len() == 1 && red.singleton_rows {
                    let (&j, &a) = r.iter().next().unwrap();
                    let (mut lo, mut hi) = (self.rl[i] / a, self.ru[i] / a);
                    if a < 0.0 {
                        std::mem::swap(&mut lo, &mut hi);
                    }
                    self.tighten(j, lo, hi)?;
                    self.remove_row(i);
                    counts.singleton_rows += 1;
                    changed = true;
                }
            }

            for j in 0..n0 {
                let Some(col) = &self.cols[j] else { continue };
                if red.fixed_columns && self.lb[j] == self.ub[j] {
                    let v = self.lb[j];
                    self.remove_col(j, v);
                    counts.fixed_columns += 1;
                    changed = true;
                    continue;
                }
                let qj = &self.q[j];
                if col.is_empty() && red.empty_columns && qj.keys().all(|&k| k == j) {
                    let v = self.empty_column_value(j)?;
                    self.remove_col(j, v);
                    counts.empty_columns += 1;
                    changed = true;
                    continue;
                }
                if col.len() == 1 && qj.is_empty() && red.free_column_singletons {
                    let (&i, &a) = col.iter().next().unwrap();
                    let free = self.lb[j] == f64::NEG_INFINITY && self.ub[j] == f64::INFINITY;
                    if free && self.rl[i] == self.ru[i] {
                        // x_j = (rhs − Σ b_k x_k)/a
                        let cj = self.c[j] / a;
                        self.obj_const += cj * self.rl[i];
                        let row = self.rows[i].clone().unwrap_or_default();
                        for (&k, &b) in &row {
                            if k != j {
                                self.c[k] -= cj * b;
                            }
                        }
                        self.remove_row(i);
                        self.cols[j] = None;
                        counts.free_column_singletons += 1;
                        changed = true;
                    }
                }
            }

            if red.doubleton_equations {
                for i in 0..m0 {
                    let Some(r) = &self.rows[i] else { continue };
                    if r.len() != 2 || self.rl[i] != self.ru[i] {
                        continue;
                    }
                    let mut it = r.iter();
                    let (&j1, &a1) = it.next().unwrap();
                    let (&j2, &a2) = it.next().unwrap();
                    let pick = [(j2, a2, j1, a1), (j1, a1, j2, a2)].into_iter().find(|&(j, ..)| self.q[j].is_empty());
                    let Some((j, a, k, b)) = pick else { continue };
                    self.eliminate_doubleton(i, j, a, k, b)?;
                    counts.doubleton_equations += 1;
                    changed = true;
                }
            }
        }
        Ok(())
    }

    fn empty_column_value(&self, j: usize) -> Result<f64, QpsError> {
        let (lo, hi, cj) = (self.lb[j], self.ub[j], self.c[j]);
        let qjj = self.q[j].get(&j).copied().unwrap_or(0.0);
        let v = if qjj > 0.0 {
            (-cj / qjj).clamp(lo, hi)
        } else if cj > 0.0 {
            lo
        } else if cj < 0.0 {
            hi
        } else if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        };
        if !v.is_finite() {
            return Err(QpsError::Unbounded { column: self.names[j].clone() });
        }
        Ok(v)
    }

    /// Row `i`: `a x_j + b x_k = rhs`. Replaces `x_j = (rhs − b x_k)/a`.
    fn eliminate_doubleton(&mut self, i: usize, j: usize, a: f64, k: usize, b: f64) -> Result<(), QpsError> {
        let rhs = self.rl[i];
        let v1 = (rhs - a * self.lb[j]) / b;
        let v2 = (rhs - a * self.ub[j]) / b;
        let nl = if v1.is_nan() || v2.is_nan() { f64::NEG_INFINITY } else { v1.min(v2) };
        let nu = if v1.is_nan() || v2.is_nan() { f64::INFINITY } else { v1.max(v2) };
        self.tighten(k, nl, nu)?;

        self.obj_const += self.c[j] * rhs / a;
        self.c[k] -= self.c[j] * b / a;
        let col = self.cols[j].clone().unwrap_or_default();
        for (&ii, &aa) in &col {
            if ii == i {
                continue;
            }
            self.rl[ii] -= aa * rhs / a;
            self.ru[ii] -= aa * rhs / a;
            let row = self.rows[ii].as_mut().expect("live row");
            let nv = row.get(&k).copied().unwrap_or(0.0) - aa * b / a;
            if nv.abs() < 1e-15 {
                row.remove(&k);
                self.cols[k].as_mut().expect("live column").remove(&ii);
            } else {
                row.insert(k, nv);
                self.cols[k].as_mut().expect("live column").insert(ii, nv);
            }
            row.remove(&j);
        }
        self.cols[j] = Some(BTreeMap::from([(i, a)]));
        self.remove_row(i);
        self.cols[j] = None;
        Ok(())
    }

    fn emit(
        self,
        file: &QpsFile,
        opts: ConvertOptions,
        mut report: ConversionReport,
    ) -> Result<(QpProblem, ConversionReport), QpsError> {
        let kept: Vec<usize> = (0..self.cols.len()).filter(|&j| self.cols[j].is_some()).collect();
        let mut new_col = vec![usize::MAX; self.cols.len()];
        for (p, &j) in kept.iter().enumerate() {
            new_col[j] = p;
        }
        let mut lb: Vec<f64> = kept.iter().map(|&j| self.lb[j]).collect();
        let mut ub: Vec<f64> = kept.iter().map(|&j| self.ub[j]).collect();
        let mut c: Vec<f64> = kept.iter().map(|&j| self.c[j]).collect();

        let mut trip = Vec::new();
        let mut b = Vec::new();
        let mut add_slack = |row: usize, coef: f64, lo: f64, hi: f64, lb: &mut Vec<f64>, ub: &mut Vec<f64>, c: &mut Vec<f64>| {
            let col = lb.len();
            lb.push(lo);
            ub.push(hi);
            c.push(0.0);
            trip.push((row, col, coef));
        };
        let mut row_entries: Vec<(usize, usize, f64)> = Vec::new();
        let mut m = 0;
        for (i, r) in self.rows.iter().enumerate() {
            let Some(r) = r else {
                report.rows_removed += 1;
                continue;
            };
            let (lo, hi) = (self.rl[i], self.ru[i]);
            if lo > hi {
                return Err(QpsError::InfeasibleRow { row: file.rows[i].1.clone(), lower: lo, upper: hi });
            }
            let mut push_row = |m: usize| {
                for (&j, &v) in r {
                    row_entries.push((m, new_col[j], v));
                }
            };
            if lo == hi {
                push_row(m);
                b.push(lo);
                m += 1;
            } else if lo.is_finite() && hi.is_finite() {
                if opts.split_ranges {
                    push_row(m);
                    b.push(hi);
                    add_slack(m, 1.0, 0.0, f64::INFINITY, &mut lb, &mut ub, &mut c);
                    push_row(m + 1);
                    b.push(lo);
                    add_slack(m + 1, -1.0, 0.0, f64::INFINITY, &mut lb, &mut ub, &mut c);
                    m += 2;
                    report.rows_split += 1;
                    report.slacks += 2;
                } else {
                    push_row(m);
                    b.push(hi);
                    add_slack(m, 1.0, 0.0, hi - lo, &mut lb, &mut ub, &mut c);
                    m += 1;
                    report.slacks += 1;
                }
            } else if hi.is_finite() {
                push_row(m);
                b.push(hi);
                add_slack(m, 1.0, 0.0, f64::INFINITY, &mut lb, &mut ub, &mut c);
                m += 1;
                report.slacks += 1;
            } else if lo.is_finite() {
                push_row(m);
                b.push(lo);
                add_slack(m, -1.0, 0.0, f64::INFINITY, &mut lb, &mut ub, &mut c);
                m += 1;
                report.slacks += 1;
            } else {
                report.rows_removed += 1;
                report.warnings.push(format!("free row {} dropped", file.rows[i].1));
            }
        }
        trip.extend(row_entries);
        let n = lb.len();
        let a = SparseMatrix::from_triplets(m, n, &trip).map_err(|e| QpsError::Invalid(e.to_string()))?;

        let mut qt = Vec::new();
        for &j in &kept {
            for (&k, &v) in &self.q[j] {
                qt.push((new_col[k], new_col[j], v));
            }
        }
        let q = SparseMatrix::from_triplets(n, n, &qt).map_err(|e| QpsError::Invalid(e.to_string()))?;

        report.cols_removed = self.cols.len() - kept.len();
        report.obj_const = self.obj_const;
        report.m = m;
        report.n = n;
        let name = if file.name.is_empty() { "UNNAMED".to_string() } else { file.name.clone() };
        let p = QpProblem::new(name, q, a, b, c, lb, ub, self.obj_const)
            .map_err(|e| QpsError::Invalid(e.to_string()))?;
        Ok((p, report))
    }
}
