//! Linear boundary conditions on trace vectors and the direct
//! certificates computed from them.

use alloc::vec::Vec;

use crate::graph::{MetricGraph, OperatorOrder, TraceVector};
use crate::linalg::{c, inertia, max_abs, max_eigenvalue, null_space, rank, spectral_norm};
use crate::{CMat, Error, Result};

/// Rows selecting the block of point `p` from a trace vector.
pub fn point_selector(graph: &MetricGraph, order: OperatorOrder, p: usize) -> CMat {
    let b = order.block();
    let mut s = CMat::zeros(b, graph.trace_len(order));
    for k in 0..b {
        s[(k, p * b + k)] = c(1.0);
    }
    s
}

/// Rows selecting the blocks of several points in turn.
pub fn points_selector(graph: &MetricGraph, order: OperatorOrder, points: &[usize]) -> CMat {
    let blocks: Vec<CMat> = points.iter().map(|&p| point_selector(graph, order, p)).collect();
    crate::linalg::vstack(&blocks)
}

/// Rows selecting derivative `k` at every point (the vector `U^(k)`).
pub fn derivative_selector(graph: &MetricGraph, order: OperatorOrder, k: usize) -> CMat {
    let b = order.block();
    let mut s = CMat::zeros(graph.points(), graph.trace_len(order));
    for p in 0..graph.points() {
        s[(p, p * b + k)] = c(1.0);
    }
    s
}

/// Canonical indices of the lower ends: loop lower end, then each half-line.
pub fn input_points(graph: &MetricGraph) -> Vec<usize> {
    core::iter::once(0).chain(2..graph.points()).collect()
}

/// Linear constraints `C t = 0` on canonical trace vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    pub order: OperatorOrder,
    pub matrix: CMat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Largest constraint violation.
    pub residual: f64,
}

impl BoundaryConditions {
    pub fn new(graph: &MetricGraph, order: OperatorOrder, matrix: CMat) -> Result<Self> {
        let expected = graph.trace_len(order);
        if matrix.ncols() != expected {
            return Err(Error::ShapeMismatch { expected, got: matrix.ncols() });
        }
        Ok(Self { order, matrix })
    }

    pub fn rank(&self) -> usize {
        rank(&self.matrix)
    }

    /// Orthonormal basis of the admissible traces.
    pub fn domain_basis(&self) -> CMat {
        null_space(&self.matrix)
    }

    /// Membership with relative tolerance `tol * (1 + |U|_inf)`.
    pub fn membership(&self, trace: &TraceVector, tol: f64) -> Result<Membership> {
        if trace.order != self.order || trace.values.len() != self.matrix.ncols() {
            return Err(Error::ShapeMismatch { expected: self.matrix.ncols(), got: trace.values.len() });
        }
        let r = &self.matrix * trace.as_cvec();
        let residual = r.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        Ok(Membership { member: residual <= tol * (1.0 + trace.sup_norm()), residual })
    }
}

/// Certificates read off the domain directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainCertificates {
    pub form_on_domain: f64,
    pub dissipation_max_eigenvalue: f64,
    pub domain_dim: usize,
    /// Largest subspace on which `dissipation` is nonpositive.
    pub maximal_dim: usize,
    /// Largest subspace on which the form vanishes.
    pub isotropic_dim: usize,
    pub trace_dim: usize,
}

/// `form(U,V) = V* G U`; `dissipation` is the Hermitian matrix of `2 Re[AU,U]`.
pub fn domain_certificates(form: &CMat, dissipation: &CMat, conditions: &BoundaryConditions) -> DomainCertificates {
    let basis = conditions.domain_basis();
    let restricted = basis.adjoint() * form * &basis;
    let (pos, neg) = inertia(dissipation);
    let n = dissipation.nrows();
    DomainCertificates {
        form_on_domain: max_abs(&restricted),
        dissipation_max_eigenvalue: if basis.ncols() == 0 {
            0.0
        } else {
            max_eigenvalue(&(basis.adjoint() * dissipation * &basis)) * 0.5
        },
        domain_dim: basis.ncols(),
        maximal_dim: n - pos,
        isotropic_dim: n - pos.max(neg),
        trace_dim: n,
    }
}

impl DomainCertificates {
    /// Conservative: the form vanishes on a domain of half the trace dimension.
    pub fn conservative(&self, form: &CMat, tol: f64) -> bool {
        self.form_on_domain <= tol * (1.0 + spectral_norm(form)) && 2 * self.domain_dim == self.trace_dim
    }

    /// Dissipative and maximal for the given generator.
    pub fn maximal_dissipative(&self, dissipation: &CMat, tol: f64) -> bool {
        self.dissipation_max_eigenvalue <= tol * (1.0 + spectral_norm(dissipation))
            && self.domain_dim == self.maximal_dim
    }
}
