//! Fourth-order interior, second-order boundary summation-by-parts first derivative.

use alloc::vec::Vec;

use super::sparse::{Builder, SparseMatrix};
use crate::C64;

const BLOCK: [[f64; 6]; 4] = [
    [-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0],
    [-0.5, 0.0, 0.5, 0.0, 0.0, 0.0],
    [4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0],
    [3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
];
const INTERIOR: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
const NORM: [f64; 4] = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];

/// Smallest grid supported by the boundary closures.
pub const MIN_NODES: usize = 13;

pub fn d1(n: usize, h: f64) -> SparseMatrix {
    assert!(n >= MIN_NODES);
    let mut b = Builder::new(n, n);
    let s = 1.0 / h;
    for (r, row) in BLOCK.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            if v != 0.0 {
                b.add(r, k, C64::new(v * s, 0.0));
                b.add(n - 1 - r, n - 1 - k, C64::new(-v * s, 0.0));
            }
        }
    }
    for i in 4..n - 4 {
        for (k, &v) in INTERIOR.iter().enumerate() {
            if v != 0.0 {
                b.add(i, i + k - 2, C64::new(v * s, 0.0));
            }
        }
    }
    b.build()
}

/// Diagonal of the norm matrix.
pub fn norm_weights(n: usize, h: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let k = i.min(n - 1 - i);
            h * if k < 4 { NORM[k] } else { 1.0 }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summation_by_parts_identity() {
        let (n, h) = (20, 0.1);
        let d = d1(n, h);
        let w = norm_weights(n, h);
        for i in 0..n {
            for j in 0..n {
                let q = w[i] * d.get(i, j).re + w[j] * d.get(j, i).re;
                let b = if i == j && i == 0 {
                    -1.0
                } else if i == j && i == n - 1 {
                    1.0
                } else {
                    0.0
                };
                assert!((q - b).abs() < 1e-13, "({i},{j}) {q}");
            }
        }
    }

    #[test]
    fn exact_on_cubics_in_the_interior_and_quadratics_at_the_ends() {
        let (n, h) = (30, 0.05);
        let d = d1(n, h);
        let x: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let f: Vec<C64> = x.iter().map(|&t| C64::new(t * t - 2.0 * t, 0.0)).collect();
        let df = d.mul_vec(&f);
        for i in 0..n {
            assert!((df[i].re - (2.0 * x[i] - 2.0)).abs() < 1e-10);
        }
    }
}
