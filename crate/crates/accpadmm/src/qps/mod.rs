//! QPS (MPS + `QUADOBJ`) input and output.
//!
//! [`parse_qps`] reads the file into a [`QpsFile`] that mirrors the sections
//! one-to-one. [`to_standard_form`] turns it into a [`QpProblem`] with only
//! equality rows and bounded columns.

mod convert;
mod parse;
mod write;

pub use convert::{to_standard_form, to_standard_form_with, ConversionReport, ConvertOptions, Reductions};
pub use parse::{parse_qps, parse_qps_with, ParseOptions};
pub use write::{dump_problem, write_qps};

#[cfg(doc)]
use crate::qp::QpProblem;

/// Magnitudes at or beyond this are read as infinite bounds or ranges.
pub const INFINITY_THRESHOLD: f64 = 1e20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowType {
    N,
    E,
    L,
    G,
}

impl RowType {
    pub fn as_str(self) -> &'static str {
        match self {
            RowType::N => "N",
            RowType::E => "E",
            RowType::L => "L",
            RowType::G => "G",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundType {
    Up,
    Lo,
    Fx,
    Fr,
    Mi,
    Pl,
}

impl BoundType {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundType::Up => "UP",
            BoundType::Lo => "LO",
            BoundType::Fx => "FX",
            BoundType::Fr => "FR",
            BoundType::Mi => "MI",
            BoundType::Pl => "PL",
        }
    }

    pub fn has_value(self) -> bool {
        matches!(self, BoundType::Up | BoundType::Lo | BoundType::Fx)
    }
}

/// Parsed QPS content.
///
/// Row indices refer to `rows`, column indices to `columns`. The objective
/// row is kept out of `rows`; its coefficients live in `objective` and its
/// right-hand side in `objective_rhs`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QpsFile {
    pub name: String,
    pub objective_name: String,
    pub rows: Vec<(RowType, String)>,
    pub columns: Vec<String>,
    /// `(row, col, value)`, duplicates already summed.
    pub entries: Vec<(usize, usize, f64)>,
    /// `(col, value)`
    pub objective: Vec<(usize, f64)>,
    pub objective_rhs: f64,
    pub rhs: Vec<(usize, f64)>,
    pub ranges: Vec<(usize, f64)>,
    pub bounds: Vec<(BoundType, usize, f64)>,
    /// `(col1, col2, value)` as written, lower triangle when `col1 ≤ col2`.
    pub quadobj: Vec<(usize, usize, f64)>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QpsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("infeasible bounds on column {column}: lower {lower} > upper {upper}")]
    InfeasibleBounds { column: String, lower: f64, upper: f64 },
    #[error("infeasible row {row}: lower {lower} > upper {upper}")]
    InfeasibleRow { row: String, lower: f64, upper: f64 },
    #[error("column {column} is unbounded in the objective direction")]
    Unbounded { column: String },
    #[error("converted problem is invalid: {0}")]
    Invalid(String),
}
