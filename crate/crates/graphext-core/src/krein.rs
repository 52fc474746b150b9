//! Finite-dimensional Krein spaces: forms, #-adjoints and the
//! unitary / contraction / self-orthogonality tests.

use crate::linalg::{
    block_diag, frobenius, inverse, max_eigenvalue, null_space, range_basis, rank, singular_values,
    smallest_singular_value, spectral_norm, vstack,
};
use crate::{CMat, CVec, Error, Result, C64};

/// Hermiticity tolerance for forms, relative to `max(1, |H|_F)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Invertibility threshold: smallest singular value over `|H|`.
pub const SINGULAR_RTOL: f64 = 1e-10;
/// Default tolerance for unitarity and semidefiniteness tests.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Invertible Hermitian matrix defining `(x|y)_H = (Hx|y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndefiniteForm {
    h: CMat,
}

impl IndefiniteForm {
    pub fn new(h: CMat) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::NonSquare { rows: h.nrows(), cols: h.ncols() });
        }
        let scale = frobenius(&h).max(1.0);
        let residual = frobenius(&(&h - h.adjoint()));
        if residual > HERMITIAN_TOL * scale {
            return Err(Error::NonHermitianForm { residual });
        }
        let sigma_min = smallest_singular_value(&h);
        if h.nrows() > 0 && !(sigma_min > SINGULAR_RTOL * spectral_norm(&h)) {
            return Err(Error::SingularForm { sigma_min });
        }
        Ok(Self { h })
    }

    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.h)
    }

    /// `(Hx|y) = y* H x`.
    pub fn inner(&self, x: &CVec, y: &CVec) -> C64 {
        (y.adjoint() * &self.h * x)[(0, 0)]
    }
}

/// A matrix between two Krein spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedOperator {
    pub lmat: CMat,
    pub domain: IndefiniteForm,
    pub codomain: IndefiniteForm,
}

impl FramedOperator {
    pub fn new(lmat: CMat, domain: IndefiniteForm, codomain: IndefiniteForm) -> Result<Self> {
        if lmat.ncols() != domain.dim() {
            return Err(Error::ShapeMismatch { expected: domain.dim(), got: lmat.ncols() });
        }
        if lmat.nrows() != codomain.dim() {
            return Err(Error::ShapeMismatch { expected: codomain.dim(), got: lmat.nrows() });
        }
        Ok(Self { lmat, domain, codomain })
    }

    /// `L* H_cod L - H_dom`.
    pub fn gram_defect(&self) -> CMat {
        self.lmat.adjoint() * self.codomain.matrix() * &self.lmat - self.domain.matrix()
    }
}

/// `L# = H_dom^-1 L* H_cod`, framed from the codomain back to the domain.
pub fn krein_adjoint(op: &FramedOperator) -> FramedOperator {
    let hinv = inverse(op.domain.matrix()).expect("forms are invertible by construction");
    FramedOperator {
        lmat: hinv * op.lmat.adjoint() * op.codomain.matrix(),
        domain: op.codomain.clone(),
        codomain: op.domain.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryCheck {
    pub unitary: bool,
    pub invertible: bool,
    /// `|L* H_cod L - H_dom|_F`.
    pub residual: f64,
}

pub fn is_krein_unitary(op: &FramedOperator, tol: f64) -> Result<UnitaryCheck> {
    let (r, k) = op.lmat.shape();
    if r != k {
        return Err(Error::NonSquare { rows: r, cols: k });
    }
    let sv = singular_values(&op.lmat);
    let top = sv.iter().copied().fold(0.0, f64::max);
    let low = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let invertible = top > 0.0 && low > SINGULAR_RTOL * top;
    let residual = frobenius(&op.gram_defect());
    let unitary = invertible && residual <= tol * frobenius(op.domain.matrix());
    Ok(UnitaryCheck { unitary, invertible, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionCheck {
    pub contraction: bool,
    /// Largest eigenvalue of `L* H_cod L - H_dom`.
    pub max_eigenvalue: f64,
}

pub fn is_krein_contraction(op: &FramedOperator, tol: f64) -> ContractionCheck {
    let max_eigenvalue = max_eigenvalue(&op.gram_defect());
    let contraction = max_eigenvalue <= tol * (1.0 + op.domain.norm());
    ContractionCheck { contraction, max_eigenvalue }
}

/// Contraction test restricted to the column span of `subspace`.
pub fn is_krein_contraction_on(op: &FramedOperator, subspace: &CMat, tol: f64) -> ContractionCheck {
    let q = range_basis(subspace);
    let max_eigenvalue = max_eigenvalue(&(q.adjoint() * op.gram_defect() * &q));
    let contraction = max_eigenvalue <= tol * (1.0 + op.domain.norm());
    ContractionCheck { contraction, max_eigenvalue }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfOrthogonality {
    pub self_orthogonal: bool,
    pub dim: usize,
    pub orthogonal_dim: usize,
    /// `|Q* W Q|_F` for an orthonormal basis `Q` of `X`.
    pub residual: f64,
}

/// Column-stacked basis of the graph `{(x, Lx)}`.
pub fn graph_basis(lmat: &CMat) -> CMat {
    vstack(&[CMat::identity(lmat.ncols(), lmat.ncols()), lmat.clone()])
}

/// `X = X^{⊥w}` for `w((x,y),(x',y')) = (x|x')_+ - (y|y')_-`.
pub fn is_w_self_orthogonal(
    basis: &CMat,
    plus: &IndefiniteForm,
    minus: &IndefiniteForm,
    tol: f64,
) -> Result<SelfOrthogonality> {
    let n = plus.dim() + minus.dim();
    if basis.nrows() != n {
        return Err(Error::ShapeMismatch { expected: n, got: basis.nrows() });
    }
    if rank(basis) < basis.ncols() {
        return Err(Error::DegenerateBasis);
    }
    let w = block_diag(&[plus.matrix().clone(), -minus.matrix().clone()]);
    let q = range_basis(basis);
    let orthogonal_dim = null_space(&(q.adjoint() * &w)).ncols();
    let residual = frobenius(&(q.adjoint() * &w * &q));
    let scale = 1.0 + spectral_norm(&w);
    let self_orthogonal = orthogonal_dim == q.ncols() && residual <= tol * scale;
    Ok(SelfOrthogonality { self_orthogonal, dim: q.ncols(), orthogonal_dim, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_rows};

    fn form(rows: &[&[f64]]) -> IndefiniteForm {
        IndefiniteForm::new(from_rows(rows)).unwrap()
    }

    #[test]
    fn rejects_bad_forms() {
        assert!(matches!(
            IndefiniteForm::new(from_rows(&[&[1.0, 2.0], &[0.0, 1.0]])),
            Err(Error::NonHermitianForm { .. })
        ));
        assert!(matches!(
            IndefiniteForm::new(from_rows(&[&[1.0, 1.0], &[1.0, 1.0]])),
            Err(Error::SingularForm { .. })
        ));
    }

    #[test]
    fn identity_is_unitary_and_self_adjoint() {
        let h = form(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let op = FramedOperator::new(CMat::identity(2, 2), h.clone(), h.clone()).unwrap();
        let u = is_krein_unitary(&op, DEFAULT_TOL).unwrap();
        assert!(u.unitary && u.residual == 0.0);
        assert_eq!(krein_adjoint(&op).lmat, CMat::identity(2, 2));
        let so = is_w_self_orthogonal(&graph_basis(&op.lmat), &h, &h, DEFAULT_TOL).unwrap();
        assert!(so.self_orthogonal);
    }

    #[test]
    fn zero_map_contraction_needs_positive_domain() {
        let i = form(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let op = FramedOperator::new(CMat::zeros(2, 2), i.clone(), i.clone()).unwrap();
        assert!(is_krein_contraction(&op, DEFAULT_TOL).contraction);
        let j = form(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let op = FramedOperator::new(CMat::zeros(2, 2), j.clone(), j).unwrap();
        assert!(!is_krein_contraction(&op, DEFAULT_TOL).contraction);
    }

    #[test]
    fn wrong_dimension_is_not_self_orthogonal() {
        let h = form(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let basis = vstack(&[CMat::zeros(2, 2), CMat::identity(2, 2)]);
        let so = is_w_self_orthogonal(&basis, &h, &h, DEFAULT_TOL).unwrap();
        assert!(!so.self_orthogonal);
        let flat = CMat::from_element(4, 2, c(1.0));
        assert_eq!(is_w_self_orthogonal(&flat, &h, &h, DEFAULT_TOL), Err(Error::DegenerateBasis));
    }

    #[test]
    fn non_square_unitary_test_errors() {
        let a = form(&[&[1.0]]);
        let b = form(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let op = FramedOperator::new(CMat::zeros(2, 1), a, b).unwrap();
        assert!(matches!(is_krein_unitary(&op, DEFAULT_TOL), Err(Error::NonSquare { .. })));
    }
}
