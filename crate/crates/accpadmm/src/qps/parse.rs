use std::collections::HashMap;

use super::{BoundType, QpsError, QpsFile, RowType};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject `QUADOBJ` entries whose first column comes after the second.
    pub strict_lower_triangle: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    QuadObj,
    End,
}

pub fn parse_qps(text: &str) -> Result<QpsFile, QpsError> {
    parse_qps_with(text, ParseOptions::default())
}

pub fn parse_qps_with(text: &str, opts: ParseOptions) -> Result<QpsFile, QpsError> {
    Parser::default().run(text, opts)
}

#[derive(Default)]
struct Parser {
    f: QpsFile,
    row_index: HashMap<String, usize>,
    col_index: HashMap<String, usize>,
    // extra N rows: their entries are dropped
    ignored_rows: HashMap<String, ()>,
    entry_slot: HashMap<(usize, usize), usize>,
    rhs_set: Option<String>,
    range_set: Option<String>,
    bound_set: Option<String>,
}

enum RowRef {
    Objective,
    Ignored,
    Row(usize),
}

fn err(line: usize, message: impl Into<String>) -> QpsError {
    QpsError::Parse { line, message: message.into() }
}

fn number(tok: &str, line: usize) -> Result<f64, QpsError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("malformed number '{tok}'")))?;
    if v.is_nan() {
        return Err(err(line, format!("malformed number '{tok}'")));
    }
    Ok(v)
}

impl Parser {
    fn run(mut self, text: &str, opts: ParseOptions) -> Result<QpsFile, QpsError> {
        let mut section = Section::None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed_end = raw.trim_end();
            if trimmed_end.trim().is_empty() || trimmed_end.starts_with('*') {
                continue;
            }
            let toks: Vec<&str> = trimmed_end.split_whitespace().collect();
            if !raw.starts_with(|c: char| c.is_whitespace()) {
                section = match toks[0] {
                    "NAME" => {
                        self.f.name = toks[1..].join(" ");
                        Section::None
                    }
                    "ROWS" => Section::Rows,
                    "COLUMNS" => Section::Columns,
                    "RHS" => Section::Rhs,
                    "RANGES" => Section::Ranges,
                    "BOUNDS" => Section::Bounds,
                    "QUADOBJ" => Section::QuadObj,
                    "ENDATA" => Section::End,
                    other => return Err(err(line, format!("unknown section '{other}'"))),
                };
                if toks.len() > 1 && toks[0] != "NAME" {
                    return Err(err(line, "unexpected tokens after section keyword"));
                }
                continue;
            }
            match section {
                Section::None => return Err(err(line, "data line outside of a section")),
                Section::End => return Err(err(line, "data after ENDATA")),
                Section::Rows => self.row(&toks, line)?,
                Section::Columns => self.column(&toks, line)?,
                Section::Rhs => self.rhs(&toks, line)?,
                Section::Ranges => self.range(&toks, line)?,
                Section::Bounds => self.bound(&toks, line)?,
                Section::QuadObj => self.quad(&toks, line, opts)?,
            }
        }
        if self.f.objective_name.is_empty() {
            self.f.warnings.push("no objective row; objective is zero".into());
        }
        Ok(self.f)
    }

    fn row(&mut self, t: &[&str], line: usize) -> Result<(), QpsError> {
        if t.len() != 2 {
            return Err(err(line, "ROWS line needs a type and a name"));
        }
        let ty = match t[0] {
            "N" => RowType::N,
            "E" => RowType::E,
            "L" => RowType::L,
            "G" => RowType::G,
            other => return Err(err(line, format!("unknown row type '{other}'"))),
        };
        let name = t[1].to_string();
        if self.row_index.contains_key(&name) || self.ignored_rows.contains_key(&name) || name == self.f.objective_name {
            return Err(err(line, format!("duplicate row '{name}'")));
        }
        if ty == RowType::N {
            if self.f.objective_name.is_empty() {
                self.f.objective_name = name;
            } else {
                self.f.warnings.push(format!("line {line}: extra objective row '{name}' ignored"));
                self.ignored_rows.insert(name, ());
            }
            return Ok(());
        }
        self.row_index.insert(name.clone(), self.f.rows.len());
        self.f.rows.push((ty, name));
        Ok(())
    }

    fn lookup_row(&self, name: &str, line: usize) -> Result<RowRef, QpsError> {
        if !self.f.objective_name.is_empty() && name == self.f.objective_name {
            return Ok(RowRef::Objective);
        }
        if self.ignored_rows.contains_key(name) {
            return Ok(RowRef::Ignored);
        }
        self.row_index
            .get(name)
            .map(|&r| RowRef::Row(r))
            .ok_or_else(|| err(line, format!("unresolved row '{name}'")))
    }

    fn lookup_col(&self, name: &str, line: usize) -> Result<usize, QpsError> {
        self.col_index
            .get(name)
            .copied()
            .ok_or_else(|| err(line, format!("unresolved column '{name}'")))
    }

    fn column(&mut self, t: &[&str], line: usize) -> Result<(), QpsError> {
        if t.iter().any(|s| s.contains("MARKER")) {
            return Err(err(line, "integer markers are not supported"));
        }
        if t.len() != 3 && t.len() != 5 {
            return Err(err(line, "COLUMNS line needs a column and one or two (row, value) pairs"));
        }
        let col = match self.col_index.get(t[0]) {
            Some(&c) => c,
            None => {
                let c = self.f.columns.len();
                self.col_index.insert(t[0].to_string(), c);
                self.f.columns.push(t[0].to_string());
                c
            }
        };
        for pair in t[1..].chunks(2) {
            let v = number(pair[1], line)?;
            match self.lookup_row(pair[0], line)? {
                RowRef::Objective => self.f.objective.push((col, v)),
                RowRef::Ignored => {}
                RowRef::Row(r) => match self.entry_slot.get(&(r, col)) {
                    Some(&slot) => self.f.entries[slot].2 += v,
                    None => {
                        self.entry_slot.insert((r, col), self.f.entries.len());
                        self.f.entries.push((r, col, v));
                    }
                },
            }
        }
        Ok(())
    }

    /// `[set] row value [row value]`; returns the pairs if the set is the first one seen.
    fn set_pairs<'t>(
        set: &mut Option<String>,
        warnings: &mut Vec<String>,
        t: &'t [&'t str],
        line: usize,
        what: &str,
    ) -> Result<Option<&'t [&'t str]>, QpsError> {
        let (name, pairs) = match t.len() {
            2 | 4 => ("", t),
            3 | 5 => (t[0], &t[1..]),
            _ => return Err(err(line, format!("{what} line needs one or two (row, value) pairs"))),
        };
        match set {
            None => *set = Some(name.to_string()),
            Some(s) if s != name => {
                warnings.push(format!("line {line}: {what} set '{name}' ignored"));
                return Ok(None);
            }
            _ => {}
        }
        Ok(Some(pairs))
    }

    fn rhs(&mut self, t: &[&str], line: usize) -> Result<(), QpsError> {
        let Some(pairs) = Self::set_pairs(&mut self.rhs_set, &mut self.f.warnings, t, line, "RHS")? else {
            return Ok(());
        };
        for pair in pairs.chunks(2) {
            let v = number(pair[1], line)?;
            match self.lookup_row(pair[0], line)? {
                RowRef::Objective => self.f.objective_rhs += v,
                RowRef::Ignored => {}
                RowRef::Row(r) => self.f.rhs.push((r, v)),
            }
        }
        Ok(())
    }

    fn range(&mut self, t: &[&str], line: usize) -> Result<(), QpsError> {
        let Some(pairs) = Self::set_pairs(&mut self.range_set, &mut self.f.warnings, t, line, "RANGES")? else {
            return Ok(());
        };
        for pair in pairs.chunks(2) {
            let v = number(pair[1], line)?;
            match self.lookup_row(pair[0], line)? {
                RowRef::Row(r) => self.f.ranges.push((r, v)),
                _ => return Err(err(line, format!("range on objective row '{}'", pair[0]))),
            }
        }
        Ok(())
    }

    fn bound(&mut self, t: &[&str], line: usize) -> Result<(), QpsError> {
        let ty = match t[0] {
            "UP" => BoundType::Up,
            "LO" => BoundType::Lo,
            "FX" => BoundType::Fx,
            "FR" => BoundType::Fr,
            "MI" => BoundType::Mi,
            "PL" => BoundType::Pl,
            "BV" | "LI" | "UI" | "SC" => {
                return Err(err(line, format!("integer bound type '{}' is not supported", t[0])))
            }
            other => return Err(err(line, format!("unknown bound type '{other}'"))),
        };
        let rest = &t[1..];
        let need = if ty.has_value() { 2 } else { 1 };
        let (set, fields) = if rest.len() == need + 1 {
            (rest[0], &rest[1..])
        } else if rest.len() == need {
            ("", rest)
        } else {
            return Err(err(line, format!("malformed {} bound", ty.as_str())));
        };
        match &self.bound_set {
            None => self.bound_set = Some(set.to_string()),
            Some(s) if s != set => {
                self.f.warnings.push(format!("line {line}: BOUNDS set '{set}' ignored"));
                return Ok(());
            }
            _ => {}
        }
        let col = self.lookup_col(fields[0], line)?;
        let v = if ty.has_value() { number(fields[1], line)? } else { 0.0 };
        self.f.bounds.push((ty, col, v));
        Ok(())
    }

    fn quad(&mut self, t: &[&str], line: usize, opts: ParseOptions) -> Result<(), QpsError> {
        if t.len() != 3 {
            return Err(err(line, "QUADOBJ line needs two columns and a value"));
        }
        let c1 = self.lookup_col(t[0], line)?;
        let c2 = self.lookup_col(t[1], line)?;
        if opts.strict_lower_triangle && c1 > c2 {
            return Err(err(line, format!("upper-triangle QUADOBJ entry ({}, {})", t[0], t[1])));
        }
        self.f.quadobj.push((c1, c2, number(t[2], line)?));
        Ok(())
    }
}
