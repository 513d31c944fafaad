use super::LinalgError;

/// Real matrix in compressed sparse column layout.
///
/// Row indices are strictly increasing inside every column. Explicit zeros
/// may be stored; they never change the result of an operation.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    colptr: Vec<usize>,
    rowind: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSC arrays, checking every layout invariant.
    pub fn new(
        nrows: usize,
        ncols: usize,
        colptr: Vec<usize>,
        rowind: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        if colptr.len() != ncols + 1 {
            return Err(LinalgError::InvalidStructure(format!(
                "column pointer length {} != ncols + 1 = {}",
                colptr.len(),
                ncols + 1
            )));
        }
        if colptr[0] != 0 || colptr[ncols] != rowind.len() || rowind.len() != values.len() {
            return Err(LinalgError::InvalidStructure(
                "column pointers do not span the stored values".into(),
            ));
        }
        for j in 0..ncols {
            if colptr[j] > colptr[j + 1] {
                return Err(LinalgError::InvalidStructure(format!(
                    "column pointers decrease at column {j}"
                )));
            }
            let col = &rowind[colptr[j]..colptr[j + 1]];
            for (p, &i) in col.iter().enumerate() {
                if i >= nrows {
                    return Err(LinalgError::InvalidStructure(format!(
                        "row index {i} out of range in column {j}"
                    )));
                }
                if p > 0 && col[p - 1] >= i {
                    return Err(LinalgError::InvalidStructure(format!(
                        "row indices not strictly increasing in column {j}"
                    )));
                }
            }
        }
        Ok(Self { nrows, ncols, colptr, rowind, values })
    }

    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, LinalgError> {
        let mut counts = vec![0usize; ncols + 1];
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(LinalgError::InvalidStructure(format!(
                    "triplet ({i}, {j}) outside {nrows}x{ncols}"
                )));
            }
            counts[j + 1] += 1;
        }
        for j in 0..ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut rows = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            rows[next[j]] = i;
            vals[next[j]] = v;
            next[j] += 1;
        }

        let mut colptr = Vec::with_capacity(ncols + 1);
        let mut rowind = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        colptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for j in 0..ncols {
            scratch.clear();
            scratch.extend((counts[j]..counts[j + 1]).map(|p| (rows[p], vals[p])));
            scratch.sort_by_key(|e| e.0);
            for &(i, v) in &scratch {
                if rowind.len() > colptr[j] && *rowind.last().unwrap() == i {
                    *values.last_mut().unwrap() += v;
                } else {
                    rowind.push(i);
                    values.push(v);
                }
            }
            colptr.push(rowind.len());
        }
        Ok(Self { nrows, ncols, colptr, rowind, values })
    }

    /// Row-major dense input, mostly for tests and small examples.
    pub fn from_dense(nrows: usize, ncols: usize, data: &[f64]) -> Result<Self, LinalgError> {
        if data.len() != nrows * ncols {
            return Err(LinalgError::DimensionMismatch {
                expected: nrows * ncols,
                found: data.len(),
            });
        }
        let mut t = Vec::new();
        for i in 0..nrows {
            for j in 0..ncols {
                let v = data[i * ncols + j];
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &t)
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            colptr: vec![0; ncols + 1],
            rowind: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            nrows: n,
            ncols: n,
            colptr: (0..=n).collect(),
            rowind: (0..n).collect(),
            values: d.to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn colptr(&self) -> &[usize] {
        &self.colptr
    }

    pub fn rowind(&self) -> &[usize] {
        &self.rowind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values of column `j`.
    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.colptr[j]..self.colptr[j + 1];
        (&self.rowind[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (rows, vals) = self.col(j);
        match rows.binary_search(&i) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols).flat_map(move |j| {
            let (rows, vals) = self.col(j);
            rows.iter().zip(vals).map(move |(&i, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] += v;
        }
        d
    }

    /// `M v`.
    pub fn spmv(&self, v: &[f64]) -> Result<Vec<f64>, LinalgError> {
        check_len(self.ncols, v.len())?;
        let mut out = vec![0.0; self.nrows];
        self.spmv_into(v, &mut out);
        Ok(out)
    }

    /// `out = M v` without allocation. Lengths are the caller's problem.
    pub fn spmv_into(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &vj) in v.iter().enumerate().take(self.ncols) {
            if vj == 0.0 {
                continue;
            }
            for p in self.colptr[j]..self.colptr[j + 1] {
                out[self.rowind[p]] += self.values[p] * vj;
            }
        }
    }

    /// `Mᵀ v`.
    pub fn spmv_transpose(&self, v: &[f64]) -> Result<Vec<f64>, LinalgError> {
        check_len(self.nrows, v.len())?;
        let mut out = vec![0.0; self.ncols];
        self.spmv_transpose_into(v, &mut out);
        Ok(out)
    }

    pub fn spmv_transpose_into(&self, v: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate().take(self.ncols) {
            let mut s = 0.0;
            for p in self.colptr[j]..self.colptr[j + 1] {
                s += self.values[p] * v[self.rowind[p]];
            }
            *o = s;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.nrows + 1];
        for &i in &self.rowind {
            counts[i + 1] += 1;
        }
        for i in 0..self.nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut rowind = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // visiting columns in order keeps the new row indices sorted
        for j in 0..self.ncols {
            for p in self.colptr[j]..self.colptr[j + 1] {
                let i = self.rowind[p];
                rowind[next[i]] = j;
                values[next[i]] = self.values[p];
                next[i] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            colptr: counts,
            rowind,
            values,
        }
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<Self, LinalgError> {
        check_len(self.ncols, other.nrows)?;
        let mut colptr = vec![0usize];
        let mut rowind = Vec::new();
        let mut values = Vec::new();
        let mut acc = vec![0.0; self.nrows];
        let mut mark = vec![usize::MAX; self.nrows];
        let mut pattern = Vec::new();
        for j in 0..other.ncols {
            pattern.clear();
            let (brows, bvals) = other.col(j);
            for (&k, &bkj) in brows.iter().zip(bvals) {
                let (arows, avals) = self.col(k);
                for (&i, &aik) in arows.iter().zip(avals) {
                    if mark[i] != j {
                        mark[i] = j;
                        acc[i] = 0.0;
                        pattern.push(i);
                    }
                    acc[i] += aik * bkj;
                }
            }
            pattern.sort_unstable();
            for &i in &pattern {
                rowind.push(i);
                values.push(acc[i]);
            }
            colptr.push(rowind.len());
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: other.ncols,
            colptr,
            rowind,
            values,
        })
    }

    /// `M Mᵀ`.
    pub fn gram_rows(&self) -> Self {
        self.matmul(&self.transpose()).expect("shapes agree")
    }

    /// `a·self + b·other`.
    pub fn add(&self, other: &SparseMatrix, a: f64, b: f64) -> Result<Self, LinalgError> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.nrows * self.ncols,
                found: other.nrows * other.ncols,
            });
        }
        let mut t: Vec<(usize, usize, f64)> = self.triplets().map(|(i, j, v)| (i, j, a * v)).collect();
        t.extend(other.triplets().map(|(i, j, v)| (i, j, b * v)));
        Self::from_triplets(self.nrows, self.ncols, &t)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `½(M + Mᵀ)`.
    pub fn symmetrize(&self) -> Result<Self, LinalgError> {
        self.add(&self.transpose(), 0.5, 0.5)
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0f64; self.nrows];
        for (i, _, v) in self.triplets() {
            rows[i] += v.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.triplets().all(|(i, j, v)| self.get(j, i) == v)
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i).abs())
            .fold(0.0, f64::max)
    }
}

fn check_len(expected: usize, found: usize) -> Result<(), LinalgError> {
    if expected == found {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, found })
    }
}
