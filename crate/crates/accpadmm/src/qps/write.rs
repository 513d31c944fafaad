use std::fmt::Write as _;

use super::QpsFile;
use crate::qp::QpProblem;

/// Serializes a [`QpsFile`] in free format. Reading the output back gives
/// the same `QpsFile` (warnings aside).
pub fn write_qps(f: &QpsFile) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "NAME {}", f.name);
    s.push_str("ROWS\n");
    let obj = if f.objective_name.is_empty() { "OBJ" } else { &f.objective_name };
    let _ = writeln!(s, " N {obj}");
    for (ty, name) in &f.rows {
        let _ = writeln!(s, " {} {name}", ty.as_str());
    }
    s.push_str("COLUMNS\n");
    let mut by_col: Vec<Vec<(&str, f64)>> = vec![Vec::new(); f.columns.len()];
    for &(j, v) in &f.objective {
        by_col[j].push((obj, v));
    }
    for &(i, j, v) in &f.entries {
        by_col[j].push((&f.rows[i].1, v));
    }
    for (j, col) in by_col.iter().enumerate() {
        if col.is_empty() {
            // keeps the column declared
            let _ = writeln!(s, " {} {obj} 0e0", f.columns[j]);
        }
        for (row, v) in col {
            let _ = writeln!(s, " {} {row} {v:e}", f.columns[j]);
        }
    }
    s.push_str("RHS\n");
    if f.objective_rhs != 0.0 {
        let _ = writeln!(s, " RHS {obj} {:e}", f.objective_rhs);
    }
    for &(i, v) in &f.rhs {
        let _ = writeln!(s, " RHS {} {v:e}", f.rows[i].1);
    }
    if !f.ranges.is_empty() {
        s.push_str("RANGES\n");
        for &(i, v) in &f.ranges {
            let _ = writeln!(s, " RNG {} {v:e}", f.rows[i].1);
        }
    }
    if !f.bounds.is_empty() {
        s.push_str("BOUNDS\n");
        for &(ty, j, v) in &f.bounds {
            if ty.has_value() {
                let _ = writeln!(s, " {} BND {} {v:e}", ty.as_str(), f.columns[j]);
            } else {
                let _ = writeln!(s, " {} BND {}", ty.as_str(), f.columns[j]);
            }
        }
    }
    if !f.quadobj.is_empty() {
        s.push_str("QUADOBJ\n");
        for &(a, b, v) in &f.quadobj {
            let _ = writeln!(s, " {} {} {v:e}", f.columns[a], f.columns[b]);
        }
    }
    s.push_str("ENDATA\n");
    s
}

/// Plain-text dump of a converted problem, stable for diffing:
///
/// ```text
/// NAME <name>
/// DIMS <m> <n>
/// OBJCONST <v>
/// C            one "<j> <c_j>" line per column
/// B            one "<i> <b_i>" line per row
/// BOUNDS       one "<j> <l_j> <u_j>" line per column
/// A            "<i> <j> <a_ij>" per stored entry, column-major
/// Q            "<i> <j> <q_ij>" for i ≥ j, column-major
/// END
/// ```
///
/// Floats use Rust's shortest round-trip `{:e}` form.
pub fn dump_problem(p: &QpProblem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "NAME {}", p.name);
    let _ = writeln!(s, "DIMS {} {}", p.m(), p.n());
    let _ = writeln!(s, "OBJCONST {:e}", p.obj_const);
    s.push_str("C\n");
    for (j, v) in p.c.iter().enumerate() {
        let _ = writeln!(s, "{j} {v:e}");
    }
    s.push_str("B\n");
    for (i, v) in p.b.iter().enumerate() {
        let _ = writeln!(s, "{i} {v:e}");
    }
    s.push_str("BOUNDS\n");
    for j in 0..p.n() {
        let _ = writeln!(s, "{j} {:e} {:e}", p.l[j], p.u[j]);
    }
    s.push_str("A\n");
    for (i, j, v) in p.a.triplets() {
        let _ = writeln!(s, "{i} {j} {v:e}");
    }
    s.push_str("Q\n");
    for (i, j, v) in p.q.triplets() {
        if i >= j {
            let _ = writeln!(s, "{i} {j} {v:e}");
        }
    }
    s.push_str("END\n");
    s
}
