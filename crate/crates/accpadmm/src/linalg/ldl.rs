use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use super::{LinalgError, SparseMatrix};

const NONE: usize = usize::MAX;

/// `P M Pᵀ = L D Lᵀ` for a symmetric positive (semi)definite `M`.
///
/// `L` is unit lower triangular with the unit diagonal left implicit. The
/// permutation comes from approximate minimum degree. Once built the object
/// is never mutated, so concurrent solves are fine.
#[derive(Debug, Clone)]
pub struct SymmetricFactorization {
    n: usize,
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
    fingerprint: u64,
    regularized: usize,
}

impl SymmetricFactorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `perm[k]` is the original index placed at position `k`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.d
    }

    pub fn factor_nnz(&self) -> usize {
        self.li.len()
    }

    /// Hash of the factorized matrix, pattern and bit-exact values.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Number of pivots lifted to the regularization floor.
    pub fn regularized_pivots(&self) -> usize {
        self.regularized
    }

    pub fn solve(&self, r: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if r.len() != self.n {
            return Err(LinalgError::DimensionMismatch { expected: self.n, found: r.len() });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| r[p]).collect();
        for j in 0..self.n {
            let xj = x[j];
            if xj != 0.0 {
                for p in self.lp[j]..self.lp[j + 1] {
                    x[self.li[p]] -= self.lx[p] * xj;
                }
            }
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for j in (0..self.n).rev() {
            let mut s = x[j];
            for p in self.lp[j]..self.lp[j + 1] {
                s -= self.lx[p] * x[self.li[p]];
            }
            x[j] = s;
        }
        let mut out = vec![0.0; self.n];
        for (k, &p) in self.perm.iter().enumerate() {
            out[p] = x[k];
        }
        Ok(out)
    }
}

pub fn fingerprint(m: &SparseMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    m.nrows().hash(&mut h);
    m.ncols().hash(&mut h);
    m.colptr().hash(&mut h);
    m.rowind().hash(&mut h);
    for v in m.values() {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Factorizes a symmetric matrix. Only the upper triangle is read.
///
/// Pivots with `|d| < δ`, `δ = 1e-12·(1 + max|diag|)`, are shifted by `δ`
/// (tiny positive or roundoff-negative pivots of a semidefinite matrix).
/// A pivot still below the floor after the shift, i.e. `d ≤ -δ`, is an
/// `IndefiniteMatrix` error carrying the original row index.
pub fn factorize_spd(m: &SparseMatrix) -> Result<SymmetricFactorization, LinalgError> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(LinalgError::NotSquare { nrows: n, ncols: m.ncols() });
    }
    let delta = 1e-12 * (1.0 + m.max_abs_diagonal());

    let perm = ordering(m)?;
    let mut pinv = vec![0usize; n];
    for (k, &p) in perm.iter().enumerate() {
        pinv[p] = k;
    }

    // upper triangle of P M Pᵀ
    let mut t = Vec::with_capacity(m.nnz());
    for (i, j, v) in m.triplets() {
        if i <= j {
            let (a, b) = (pinv[i], pinv[j]);
            t.push((a.min(b), a.max(b), v));
        }
    }
    let c = SparseMatrix::from_triplets(n, n, &t)?;
    let (ap, ai, ax) = (c.colptr(), c.rowind(), c.values());

    // elimination tree and column counts of L
    let mut parent = vec![NONE; n];
    let mut lnz = vec![0usize; n];
    let mut work = vec![NONE; n];
    for j in 0..n {
        work[j] = j;
        for &row in &ai[ap[j]..ap[j + 1]] {
            let mut i = row;
            if i >= j {
                continue;
            }
            while work[i] != j {
                if parent[i] == NONE {
                    parent[i] = j;
                }
                lnz[i] += 1;
                work[i] = j;
                i = parent[i];
            }
        }
    }
    let mut lp = vec![0usize; n + 1];
    for j in 0..n {
        lp[j + 1] = lp[j] + lnz[j];
    }
    let total = lp[n];
    let mut li = vec![0usize; total];
    let mut lx = vec![0.0; total];
    let mut d = vec![0.0; n];
    let mut dinv = vec![0.0; n];

    // up-looking numeric phase; row k of L is the reach of column k in the etree
    let mut marked = vec![false; n];
    let mut yidx = vec![0usize; n];
    let mut yvals = vec![0.0; n];
    let mut stack = vec![0usize; n];
    let mut next_free: Vec<usize> = lp[..n].to_vec();
    let mut regularized = 0;

    for k in 0..n {
        let mut ny = 0;
        for p in ap[k]..ap[k + 1] {
            let b = ai[p];
            if b == k {
                d[k] = ax[p];
                continue;
            }
            yvals[b] = ax[p];
            if marked[b] {
                continue;
            }
            marked[b] = true;
            stack[0] = b;
            let mut ns = 1;
            let mut nxt = parent[b];
            while nxt != NONE && nxt < k {
                if marked[nxt] {
                    break;
                }
                marked[nxt] = true;
                stack[ns] = nxt;
                ns += 1;
                nxt = parent[nxt];
            }
            while ns > 0 {
                ns -= 1;
                yidx[ny] = stack[ns];
                ny += 1;
            }
        }
        for t in (0..ny).rev() {
            let cidx = yidx[t];
            let slot = next_free[cidx];
            let yc = yvals[cidx];
            for q in lp[cidx]..slot {
                yvals[li[q]] -= lx[q] * yc;
            }
            li[slot] = k;
            lx[slot] = yc * dinv[cidx];
            d[k] -= yc * lx[slot];
            next_free[cidx] += 1;
            yvals[cidx] = 0.0;
            marked[cidx] = false;
        }
        if d[k] < delta {
            d[k] += delta;
            regularized += 1;
            if d[k] <= 0.0 {
                return Err(LinalgError::IndefiniteMatrix { pivot: perm[k] });
            }
            if d[k] < delta {
                d[k] = delta;
            }
        }
        dinv[k] = 1.0 / d[k];
    }

    Ok(SymmetricFactorization {
        n,
        perm,
        lp,
        li,
        lx,
        d,
        fingerprint: fingerprint(m),
        regularized,
    })
}

pub fn solve_factored(f: &SymmetricFactorization, r: &[f64]) -> Result<Vec<f64>, LinalgError> {
    f.solve(r)
}

fn ordering(m: &SparseMatrix) -> Result<Vec<usize>, LinalgError> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (p, _, _) = amd::order::<usize>(n, m.colptr(), m.rowind(), &amd::Control::default())
        .map_err(|s| LinalgError::Ordering(format!("{s:?}")))?;
    Ok(p)
}
