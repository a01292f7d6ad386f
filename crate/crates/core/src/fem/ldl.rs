//! Sparse `L D Lᵀ` factorization of complex-symmetric matrices.
//!
//! Elimination tree and up-looking row-by-row numeric factorization in the
//! style of Davis' LDL, without pivoting and without conjugation. For the
//! eddy-current systems assembled here `A = K + iωS` with `K` and `S`
//! real symmetric positive semi-definite and `K + ωS` definite, so
//! `xᴴAx ≠ 0` for every `x ≠ 0` and every leading principal submatrix is
//! nonsingular: the factorization exists in any symmetric ordering.
//!
//! Fill is reduced by geometric nested dissection on the DOF coordinates.

use num_complex::Complex64;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::mesh::Point;

const NONE: usize = usize::MAX;
const LEAF_SIZE: usize = 48;

/// Fill-reducing ordering (`order[new] = old`). Unknowns without coordinates
/// are eliminated last.
pub fn nested_dissection(a: &CsrMatrix, coords: &[Option<Point>]) -> Vec<usize> {
    assert_eq!(a.n(), coords.len());
    let mut label = vec![0u32; a.n()];
    let mut next = 1u32;
    let mut out = Vec::with_capacity(a.n());
    let located: Vec<usize> = (0..a.n()).filter(|i| coords[*i].is_some()).collect();
    dissect(a, coords, located, &mut label, &mut next, &mut out);
    out.extend((0..a.n()).filter(|i| coords[*i].is_none()));
    out
}

fn dissect(
    a: &CsrMatrix,
    coords: &[Option<Point>],
    set: Vec<usize>,
    label: &mut [u32],
    next: &mut u32,
    out: &mut Vec<usize>,
) {
    if set.len() <= LEAF_SIZE {
        out.extend(set);
        return;
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &i in &set {
        let p = coords[i].unwrap();
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let axis = (0..3)
        .max_by(|x, y| (hi[*x] - lo[*x]).total_cmp(&(hi[*y] - lo[*y])))
        .unwrap();
    if hi[axis] - lo[axis] <= 0.0 {
        out.extend(set);
        return;
    }
    let mut keyed: Vec<(f64, usize)> = set.iter().map(|&i| (coords[i].unwrap()[axis], i)).collect();
    let mid = keyed.len() / 2;
    keyed.select_nth_unstable_by(mid, |x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let left_label = *next;
    let right_label = *next + 1;
    *next += 2;
    for (k, (_, i)) in keyed.iter().enumerate() {
        label[*i] = if k < mid { left_label } else { right_label };
    }
    let mut left = Vec::with_capacity(mid);
    let mut sep = Vec::new();
    for &(_, u) in &keyed[..mid] {
        let (cols, _) = a.row(u);
        if cols.iter().any(|w| label[*w] == right_label) {
            sep.push(u);
        } else {
            left.push(u);
        }
    }
    let right: Vec<usize> = keyed[mid..].iter().map(|(_, i)| *i).collect();
    sep.sort_unstable();
    left.sort_unstable();
    dissect(a, coords, left, label, next, out);
    dissect(a, coords, right, label, next, out);
    out.extend(sep);
}

#[derive(Debug, Clone)]
pub struct LdlFactor {
    order: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<u32>,
    lx: Vec<Complex64>,
    d: Vec<Complex64>,
}

impl LdlFactor {
    /// Factorizes `P A Pᵀ = L D Lᵀ` with `P` given by `order` (`order[new] = old`).
    pub fn factorize(a: &CsrMatrix, order: Vec<usize>) -> Result<Self> {
        let n = a.n();
        assert_eq!(order.len(), n);
        let mut pinv = vec![NONE; n];
        for (new, &old) in order.iter().enumerate() {
            pinv[old] = new;
        }

        // symbolic: elimination tree and column counts
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            let (cols, _) = a.row(order[k]);
            for c in cols {
                let mut i = pinv[*c];
                if i >= k {
                    continue;
                }
                while flag[i] != k {
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        let nnz = lp[n];
        if nnz > u32::MAX as usize || n > u32::MAX as usize {
            return Err(Error::Solve {
                reason: format!("factor too large ({nnz} entries)"),
                iterations: 0,
                residual: f64::NAN,
            });
        }

        // numeric
        let zero = Complex64::new(0.0, 0.0);
        let mut li = vec![0u32; nnz];
        let mut lx = vec![zero; nnz];
        let mut d = vec![zero; n];
        let mut y = vec![zero; n];
        let mut pattern = vec![0usize; n];
        flag.fill(NONE);
        lnz.fill(0);
        let mut scale: f64 = 0.0;
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            let (cols, vals) = a.row(order[k]);
            for (c, v) in cols.iter().zip(vals) {
                let mut i = pinv[*c];
                if i > k {
                    continue;
                }
                y[i] += v;
                let mut len = 0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            let mut dk = y[k];
            scale = scale.max(dk.norm());
            y[k] = zero;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = zero;
                let start = lp[i];
                let end = start + lnz[i];
                for p in start..end {
                    y[li[p] as usize] -= lx[p] * yi;
                }
                let l_ki = yi / d[i];
                dk -= l_ki * yi;
                li[end] = k as u32;
                lx[end] = l_ki;
                lnz[i] += 1;
            }
            if !(dk.norm() > f64::EPSILON * 1e-6 * scale) || !dk.is_finite() {
                return Err(Error::Solve {
                    reason: format!("zero pivot at elimination step {k} of {n}"),
                    iterations: 0,
                    residual: f64::NAN,
                });
            }
            d[k] = dk;
        }
        Ok(Self { order, lp, li, lx, d })
    }

    pub fn nnz(&self) -> usize {
        self.lx.len()
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.d.len();
        let mut x: Vec<Complex64> = self.order.iter().map(|&o| b[o]).collect();
        for j in 0..n {
            let xj = x[j];
            if xj != Complex64::new(0.0, 0.0) {
                for p in self.lp[j]..self.lp[j + 1] {
                    x[self.li[p] as usize] -= self.lx[p] * xj;
                }
            }
        }
        for j in 0..n {
            x[j] /= self.d[j];
        }
        for j in (0..n).rev() {
            let mut s = x[j];
            for p in self.lp[j]..self.lp[j + 1] {
                s -= self.lx[p] * x[self.li[p] as usize];
            }
            x[j] = s;
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (new, &old) in self.order.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}
