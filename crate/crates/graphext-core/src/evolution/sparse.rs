//! Row-compressed complex sparse matrices.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    /// Sorted `(column, value)` pairs per row.
    pub rows: Vec<Vec<(usize, C64)>>,
}

/// Accumulates entries before freezing into a [`SparseMatrix`].
#[derive(Debug, Clone)]
pub struct Builder {
    nrows: usize,
    ncols: usize,
    rows: Vec<BTreeMap<usize, C64>>,
}

impl Builder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, rows: vec![BTreeMap::new(); nrows] }
    }

    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        *self.rows[i].entry(j).or_insert(C64::new(0.0, 0.0)) += v;
    }

    pub fn add_matrix(&mut self, m: &SparseMatrix, scale: C64) {
        for (i, row) in m.rows.iter().enumerate() {
            for &(j, v) in row {
                self.add(i, j, v * scale);
            }
        }
    }

    pub fn build(self) -> SparseMatrix {
        let rows = self
            .rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect())
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }
}

impl SparseMatrix {
    pub fn identity(n: usize) -> Self {
        Self { nrows: n, ncols: n, rows: (0..n).map(|i| vec![(i, C64::new(1.0, 0.0))]).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        self.rows.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut b = Builder::new(self.nrows, other.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                for &(j, w) in &other.rows[k] {
                    b.add(i, j, v * w);
                }
            }
        }
        b.build()
    }

    pub fn scale(&self, s: C64) -> SparseMatrix {
        let rows = self.rows.iter().map(|r| r.iter().map(|&(j, v)| (j, v * s)).collect()).collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn product_and_matvec() {
        let mut b = Builder::new(2, 2);
        b.add(0, 1, c(2.0));
        b.add(1, 0, c(3.0));
        b.add(1, 0, c(1.0));
        let m = b.build();
        assert_eq!(m.get(1, 0), c(4.0));
        let sq = m.mul(&m);
        assert_eq!(sq.get(0, 0), c(8.0));
        assert_eq!(sq.get(0, 1), c(0.0));
        assert_eq!(m.mul_vec(&[c(1.0), c(1.0)]), vec![c(2.0), c(4.0)]);
        assert_eq!(SparseMatrix::identity(3).nnz(), 3);
    }
}
