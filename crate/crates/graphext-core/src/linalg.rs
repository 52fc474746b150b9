//! Dense helpers over nalgebra for the small boundary matrices.

use alloc::vec::Vec;
use nalgebra::{DVector, SymmetricEigen};

use crate::{CMat, RMat, C64};

/// Relative singular-value cutoff used for ranks and null spaces.
pub const RANK_RTOL: f64 = 1e-10;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn complexify(m: &RMat) -> CMat {
    m.map(c)
}

/// Real matrix from row slices.
pub fn from_rows(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = if n == 0 { 0 } else { rows[0].len() };
    CMat::from_fn(n, m, |i, j| c(rows[i][j]))
}

pub fn from_row_vecs(rows: &[Vec<f64>]) -> CMat {
    let n = rows.len();
    let m = if n == 0 { 0 } else { rows[0].len() };
    CMat::from_fn(n, m, |i, j| c(rows[i][j]))
}

pub fn real_diag(d: &[f64]) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|&x| c(x))))
}

pub fn frobenius(m: &CMat) -> f64 {
    sqrt(m.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

pub fn smallest_singular_value(m: &CMat) -> f64 {
    singular_values(m).into_iter().fold(f64::INFINITY, f64::min)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5)
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(f64::NEG_INFINITY)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

/// Counts of positive and negative eigenvalues of the Hermitian part.
pub fn inertia(m: &CMat) -> (usize, usize) {
    let ev = hermitian_eigenvalues(m);
    let scale = ev.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let pos = ev.iter().filter(|&&x| x > RANK_RTOL * scale).count();
    let neg = ev.iter().filter(|&&x| x < -RANK_RTOL * scale).count();
    (pos, neg)
}

pub fn rank(m: &CMat) -> usize {
    rank_with(m, RANK_RTOL)
}

pub fn rank_with(m: &CMat, rtol: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rtol * top).count()
}

/// Orthonormal basis (columns) of the kernel of `m`.
pub fn null_space(m: &CMat) -> CMat {
    let n = m.ncols();
    if m.nrows() == 0 {
        return CMat::identity(n, n);
    }
    let padded = if m.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.rows_mut(0, m.nrows()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = RANK_RTOL * top;
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top == 0.0 || svd.singular_values[i] <= cut)
        .collect();
    let mut out = CMat::zeros(n, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        for r in 0..n {
            out[(r, k)] = v_t[(i, r)].conj();
        }
    }
    out
}

/// Orthonormal basis (columns) of the column space of `m`.
pub fn range_basis(m: &CMat) -> CMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested u");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > RANK_RTOL * top)
        .collect();
    let mut out = CMat::zeros(m.nrows(), keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the column space.
pub fn complement_basis(m: &CMat) -> CMat {
    null_space(&m.adjoint())
}

pub fn block_diag(blocks: &[CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r, mut k) = (0, 0);
    for b in blocks {
        out.view_mut((r, k), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        k += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[CMat]) -> CMat {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), (b.nrows(), cols)).copy_from(b);
        r += b.nrows();
    }
    out
}

pub fn hstack(blocks: &[CMat]) -> CMat {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut k = 0;
    for b in blocks {
        out.view_mut((0, k), (rows, b.ncols())).copy_from(b);
        k += b.ncols();
    }
    out
}

pub fn solve(a: &CMat, b: &CMat) -> Option<CMat> {
    a.clone().lu().solve(b)
}

pub fn inverse(a: &CMat) -> Option<CMat> {
    a.clone().try_inverse()
}

/// Eigenvalues of a real polynomial given by coefficients, highest degree first.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<C64> {
    let lead = coeffs[0];
    let deg = coeffs.len() - 1;
    let mut comp = RMat::zeros(deg, deg);
    for j in 0..deg {
        comp[(0, j)] = -coeffs[j + 1] / lead;
    }
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

pub fn sqrt(x: f64) -> f64 {
    num_traits::Float::sqrt(x)
}

pub fn exp(x: f64) -> f64 {
    num_traits::Float::exp(x)
}

pub fn round(x: f64) -> f64 {
    num_traits::Float::round(x)
}

pub fn ceil(x: f64) -> f64 {
    num_traits::Float::ceil(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        let m = from_rows(&[&[1.0, 1.0, 0.0]]);
        let ns = null_space(&m);
        assert_eq!(ns.ncols(), 2);
        assert!(frobenius(&(&m * &ns)) < 1e-14);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn complement_and_range_split_space() {
        let y = from_rows(&[&[1.0], &[1.0], &[1.0]]);
        let r = range_basis(&y);
        let p = complement_basis(&y);
        assert_eq!((r.ncols(), p.ncols()), (1, 2));
        assert!(frobenius(&(p.adjoint() * &y)) < 1e-14);
    }

    #[test]
    fn cubic_roots_of_unity() {
        let roots = polynomial_roots(&[1.0, 0.0, 0.0, -1.0]);
        let neg = roots.iter().filter(|z| z.re < 0.0).count();
        assert_eq!(neg, 2);
        for z in roots {
            assert!((z * z * z - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn inertia_of_antidiagonal() {
        let m = from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(inertia(&m), (1, 1));
    }
}
