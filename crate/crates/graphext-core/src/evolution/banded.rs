//! Banded LU factorization with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;

use super::sparse::SparseMatrix;
use crate::{Error, Result, C64};

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    /// Row `i` holds columns `i - kl ..= i + kl + ku`.
    data: Vec<C64>,
    pivots: Vec<usize>,
}

/// Lower and upper bandwidths of a square sparse matrix.
pub fn bandwidths(m: &SparseMatrix) -> (usize, usize) {
    let (mut kl, mut ku) = (0, 0);
    for (i, row) in m.rows.iter().enumerate() {
        for &(j, _) in row {
            if j < i {
                kl = kl.max(i - j);
            } else {
                ku = ku.max(j - i);
            }
        }
    }
    (kl, ku)
}

impl BandedLu {
    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn factor(m: &SparseMatrix) -> Result<Self> {
        let n = m.nrows;
        let (kl, ku) = bandwidths(m);
        let width = 2 * kl + ku + 1;
        let mut lu = Self { n, kl, ku, width, data: vec![C64::new(0.0, 0.0); n * width], pivots: vec![0; n] };
        for (i, row) in m.rows.iter().enumerate() {
            for &(j, v) in row {
                let s = lu.slot(i, j);
                lu.data[s] = v;
            }
        }
        let (mut big, mut small) = (0.0f64, f64::INFINITY);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.slot(k, k)].norm();
            for i in k + 1..=last_row {
                let v = lu.data[lu.slot(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            lu.pivots[k] = p;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SolveFailure { condition: f64::INFINITY });
            }
            big = big.max(best);
            small = small.min(best);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (lu.slot(k, j), lu.slot(p, j));
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.data[lu.slot(k, k)];
            for i in k + 1..=last_row {
                let s = lu.slot(i, k);
                let l = lu.data[s] / pivot;
                lu.data[s] = l;
                if l == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..=last_col {
                    let u = lu.data[lu.slot(k, j)];
                    let t = lu.slot(i, j);
                    lu.data[t] -= l * u;
                }
            }
        }
        if small / big < 1e-14 {
            return Err(Error::SolveFailure { condition: big / small });
        }
        Ok(lu)
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                b[i] -= self.data[self.slot(i, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..=(k + self.kl + self.ku).min(n - 1) {
                acc -= self.data[self.slot(k, j)] * b[j];
            }
            b[k] = acc / self.data[self.slot(k, k)];
        }
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }
}

#[cfg(test)]
mod tests {
    use super::super::sparse::Builder;
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn solves_against_dense_oracle() {
        // Tridiagonal with a zero diagonal entry forces pivoting.
        let n = 7;
        let mut b = Builder::new(n, n);
        for i in 0..n {
            b.add(i, i, c(if i == 2 { 0.0 } else { 2.0 + i as f64 }));
            if i + 1 < n {
                b.add(i, i + 1, c(1.0));
                b.add(i + 1, i, C64::new(-1.5, 0.5));
            }
        }
        let m = b.build();
        let lu = BandedLu::factor(&m).unwrap();
        let x: Vec<C64> = (0..n).map(|i| C64::new(i as f64 - 3.0, 0.25 * i as f64)).collect();
        let mut rhs = m.mul_vec(&x);
        lu.solve_in_place(&mut rhs);
        for (a, b) in rhs.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_fails() {
        let mut b = Builder::new(2, 2);
        b.add(0, 0, c(1.0));
        b.add(1, 0, c(1.0));
        assert!(matches!(BandedLu::factor(&b.build()), Err(Error::SolveFailure { .. })));
    }
}
