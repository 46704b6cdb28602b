//! Up-looking sparse Cholesky factorization on an AMD-permuted pattern.

use super::SolverError;
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug)]
pub struct SparseCholesky {
    n: usize,
    /// `perm[k]` is the original index placed at position `k`.
    perm: Vec<usize>,
    /// Column-compressed lower factor, diagonal first in each column.
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    pub min_pivot: f64,
}

impl SparseCholesky {
    /// Factors a symmetric matrix; only the pattern of `a` is assumed symmetric,
    /// the upper triangle (after permutation) supplies the values.
    pub fn factor(a: &CsrMatrix) -> Result<Self, SolverError> {
        let n = a.n;
        let perm = if n == 0 {
            Vec::new()
        } else {
            amd::order(n, &a.row_ptr, &a.col_idx, &amd::Control::default())
                .map_err(|s| SolverError::Ordering(format!("{s:?}")))?
                .0
        };
        let mut pinv = vec![0; n];
        for (k, &p) in perm.iter().enumerate() {
            pinv[p] = k;
        }
        // C = P A Pᵀ, upper triangle, stored by column
        let mut counts = vec![0usize; n + 1];
        for i in 0..n {
            for (j, _) in a.row(i) {
                let (r, c) = (pinv[i], pinv[j]);
                if r <= c {
                    counts[c + 1] += 1;
                }
            }
        }
        for k in 0..n {
            counts[k + 1] += counts[k];
        }
        let cp = counts.clone();
        let mut next = counts;
        let mut ci = vec![0; cp[n]];
        let mut cx = vec![0.0; cp[n]];
        for i in 0..n {
            for (j, v) in a.row(i) {
                let (r, c) = (pinv[i], pinv[j]);
                if r <= c {
                    ci[next[c]] = r;
                    cx[next[c]] = v;
                    next[c] += 1;
                }
            }
        }

        let parent = etree(n, &cp, &ci);
        // column counts of L from the row patterns
        let mut flag = vec![usize::MAX; n];
        let mut stack = vec![0; n];
        let mut colcount = vec![1usize; n];
        for k in 0..n {
            let top = ereach(k, &cp, &ci, &parent, &mut flag, &mut stack);
            for &j in &stack[top..] {
                colcount[j] += 1;
            }
        }
        let mut lp = vec![0; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + colcount[k];
        }
        let mut li = vec![0; lp[n]];
        let mut lx = vec![0.0; lp[n]];
        let mut fill: Vec<usize> = lp[..n].to_vec();
        let mut x = vec![0.0; n];
        flag.fill(usize::MAX);
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let top = ereach(k, &cp, &ci, &parent, &mut flag, &mut stack);
            for p in cp[k]..cp[k + 1] {
                x[ci[p]] = cx[p];
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &i in &stack[top..] {
                let lki = x[i] / lx[lp[i]];
                x[i] = 0.0;
                for p in lp[i] + 1..fill[i] {
                    x[li[p]] -= lx[p] * lki;
                }
                d -= lki * lki;
                let p = fill[i];
                fill[i] += 1;
                li[p] = k;
                lx[p] = lki;
            }
            min_pivot = min_pivot.min(d);
            if !(d > 0.0) {
                return Err(SolverError::NotPositiveDefinite { column: perm[k], pivot: d });
            }
            let p = fill[k];
            fill[k] += 1;
            li[p] = k;
            lx[p] = d.sqrt();
        }
        Ok(Self { n, perm, lp, li, lx, min_pivot })
    }

    pub fn nnz(&self) -> usize {
        self.lx.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            y[j] /= self.lx[self.lp[j]];
            let yj = y[j];
            for p in self.lp[j] + 1..self.lp[j + 1] {
                y[self.li[p]] -= self.lx[p] * yj;
            }
        }
        for j in (0..n).rev() {
            let mut s = y[j];
            for p in self.lp[j] + 1..self.lp[j + 1] {
                s -= self.lx[p] * y[self.li[p]];
            }
            y[j] = s / self.lx[self.lp[j]];
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}

/// Elimination tree of an upper-triangular column pattern.
fn etree(n: usize, cp: &[usize], ci: &[usize]) -> Vec<usize> {
    let mut parent = vec![usize::MAX; n];
    let mut ancestor = vec![usize::MAX; n];
    for k in 0..n {
        for &row in &ci[cp[k]..cp[k + 1]] {
            let mut i = row;
            while i != usize::MAX && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == usize::MAX {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}

/// Pattern of row `k` of L (excluding the diagonal) in topological order, written to
/// `stack[top..]`.
fn ereach(k: usize, cp: &[usize], ci: &[usize], parent: &[usize], flag: &mut [usize], stack: &mut [usize]) -> usize {
    let n = parent.len();
    let mut top = n;
    flag[k] = k;
    let mut path = Vec::new();
    for &row in &ci[cp[k]..cp[k + 1]] {
        let mut i = row;
        if i > k {
            continue;
        }
        while flag[i] != k {
            path.push(i);
            flag[i] = k;
            i = parent[i];
        }
        while let Some(j) = path.pop() {
            top -= 1;
            stack[top] = j;
        }
    }
    top
}
