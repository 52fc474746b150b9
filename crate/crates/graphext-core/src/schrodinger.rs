//! Schrödinger operator `-u''` on looping-edge and T-shaped graphs:
//! replicated frames, matrix and subspace couplings, `D_{Z,N}` domains.

pub mod catalogue;

use alloc::vec;
use alloc::vec::Vec;

use crate::airy::{agrees, Tolerances};
use crate::boundary::{
    derivative_selector, domain_certificates, input_points, point_selector, points_selector,
    BoundaryConditions, Membership,
};
use crate::graph::{MetricGraph, OperatorOrder, TraceVector};
use crate::krein::{is_krein_contraction, is_krein_unitary, FramedOperator, IndefiniteForm};
use crate::linalg::{block_diag, c, complement_basis, from_rows, range_basis, rank, real_diag, vstack};
use crate::report::{ClassificationReport, DeficiencyReport, EdgeDeficiency, Verdict};
use crate::{CMat, Error, Result, C64};

const ORDER: OperatorOrder = OperatorOrder::Schrodinger2;

/// `[[0, 1], [-1, 0]]`.
pub fn p0() -> CMat {
    from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]])
}

/// `diag(1, -1, 1, ..., 1)` over the boundary points.
pub fn q_matrix(graph: &MetricGraph) -> CMat {
    let mut d = vec![1.0; graph.points()];
    d[1] = -1.0;
    real_diag(&d)
}

/// Matrix `G` with `[H0* U, V] - [U, H0* V] = V* G U` on canonical traces.
pub fn form_matrix(graph: &MetricGraph) -> CMat {
    let blocks: Vec<CMat> = (0..graph.points()).map(|p| if p == 1 { -p0() } else { p0() }).collect();
    block_diag(&blocks)
}

/// Replicated frame: inputs are the lower ends, outputs copies of the loop's upper end.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerFrame {
    pub graph: MetricGraph,
    /// `blockdiag(P0, ..., P0)`, `N+1` blocks.
    pub p_plus: CMat,
    /// `p_plus / (N+1)`.
    pub p_minus: CMat,
    pub input: CMat,
    pub output: CMat,
}

impl SchrodingerFrame {
    pub fn new(graph: &MetricGraph) -> Self {
        let n = graph.n();
        let p_plus = block_diag(&(0..=n).map(|_| p0()).collect::<Vec<_>>());
        let p_minus = &p_plus * c(1.0 / (n + 1) as f64);
        let one = point_selector(graph, ORDER, 1);
        Self {
            graph: graph.clone(),
            p_plus,
            p_minus,
            input: points_selector(graph, ORDER, &input_points(graph)),
            output: vstack(&(0..=n).map(|_| one.clone()).collect::<Vec<_>>()),
        }
    }

    /// Hermitian forms `J_+ = i P_+`, `J_- = i P_-`.
    pub fn forms(&self) -> Result<(IndefiniteForm, IndefiniteForm)> {
        let i = C64::new(0.0, 1.0);
        Ok((IndefiniteForm::new(&self.p_plus * i)?, IndefiniteForm::new(&self.p_minus * i)?))
    }
}

fn dot(x: &crate::CVec, y: &crate::CVec) -> C64 {
    (y.adjoint() * x)[(0, 0)]
}

/// `(P_+ x_U | x_V) - (P_- y_U | y_V)`.
pub fn boundary_form(u: &TraceVector, v: &TraceVector, graph: &MetricGraph) -> Result<C64> {
    u.check(graph, ORDER)?;
    v.check(graph, ORDER)?;
    let f = SchrodingerFrame::new(graph);
    let (uc, vc) = (u.as_cvec(), v.as_cvec());
    let (xu, xv) = (&f.input * &uc, &f.input * &vc);
    let (yu, yv) = (&f.output * &uc, &f.output * &vc);
    let total = dot(&(&f.p_plus * xu), &xv) - dot(&(&f.p_minus * yu), &yv);
    debug_assert!({
        let q = boundary_form_q(u, v, graph)?;
        (q - total).norm() <= 1e-9 * (1.0 + total.norm())
    });
    Ok(total)
}

/// `(Q U' | V) - (Q U | V')`.
pub fn boundary_form_q(u: &TraceVector, v: &TraceVector, graph: &MetricGraph) -> Result<C64> {
    u.check(graph, ORDER)?;
    v.check(graph, ORDER)?;
    let q = q_matrix(graph);
    let (u0, u1) = (u.derivative(0), u.derivative(1));
    let (v0, v1) = (v.derivative(0), v.derivative(1));
    Ok((v0.adjoint() * &q * u1)[(0, 0)] - (v1.adjoint() * &q * u0)[(0, 0)])
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchrodingerCoupling {
    Matrix { lmat: CMat },
    Subspace { y: CMat },
    /// Explicit linear constraints on traces.
    Conditions { matrix: CMat },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerSpec {
    pub frame: SchrodingerFrame,
    pub coupling: SchrodingerCoupling,
    pub tags: Vec<&'static str>,
}

impl SchrodingerSpec {
    pub fn matrix(graph: &MetricGraph, lmat: CMat) -> Result<Self> {
        let dim = 2 * graph.edges();
        if lmat.nrows() != lmat.ncols() {
            return Err(Error::Unsupported("rectangular couplings"));
        }
        if lmat.nrows() != dim {
            return Err(Error::ShapeMismatch { expected: dim, got: lmat.nrows() });
        }
        Ok(Self { frame: SchrodingerFrame::new(graph), coupling: SchrodingerCoupling::Matrix { lmat }, tags: Vec::new() })
    }

    pub fn subspace(graph: &MetricGraph, y: CMat) -> Result<Self> {
        if y.nrows() != graph.points() {
            return Err(Error::ShapeMismatch { expected: graph.points(), got: y.nrows() });
        }
        if rank(&y) < y.ncols() {
            return Err(Error::DegenerateBasis);
        }
        Ok(Self { frame: SchrodingerFrame::new(graph), coupling: SchrodingerCoupling::Subspace { y }, tags: Vec::new() })
    }

    pub fn conditions_spec(graph: &MetricGraph, matrix: CMat) -> Result<Self> {
        BoundaryConditions::new(graph, ORDER, matrix.clone())?;
        Ok(Self {
            frame: SchrodingerFrame::new(graph),
            coupling: SchrodingerCoupling::Conditions { matrix },
            tags: Vec::new(),
        })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.frame.graph
    }

    pub fn framed_operator(&self) -> Result<Option<FramedOperator>> {
        match &self.coupling {
            SchrodingerCoupling::Matrix { lmat } => {
                let (plus, minus) = self.frame.forms()?;
                Ok(Some(FramedOperator::new(lmat.clone(), plus, minus)?))
            }
            _ => Ok(None),
        }
    }

    pub fn conditions(&self) -> Result<BoundaryConditions> {
        let g = self.graph();
        let matrix = match &self.coupling {
            SchrodingerCoupling::Matrix { lmat } => lmat * &self.frame.input - &self.frame.output,
            SchrodingerCoupling::Subspace { y } => {
                let e0 = derivative_selector(g, ORDER, 0);
                let e1 = derivative_selector(g, ORDER, 1);
                let yb = range_basis(y);
                let yp = complement_basis(y);
                vstack(&[yp.adjoint() * e0, yb.adjoint() * q_matrix(g) * e1])
            }
            SchrodingerCoupling::Conditions { matrix } => matrix.clone(),
        };
        BoundaryConditions::new(g, ORDER, matrix)
    }

    /// `2 Re[A U, U] = U* M U` for the generator `A = -i H`.
    pub fn dissipation_matrix(&self) -> CMat {
        form_matrix(self.graph()) * C64::new(0.0, -1.0)
    }
}

pub fn domain_membership(spec: &SchrodingerSpec, trace: &TraceVector, tol: f64) -> Result<Membership> {
    spec.conditions()?.membership(trace, tol)
}

pub fn classify(spec: &SchrodingerSpec, tol: &Tolerances) -> Result<ClassificationReport> {
    let form = form_matrix(spec.graph());
    let dissipation = spec.dissipation_matrix();
    let cert = domain_certificates(&form, &dissipation, &spec.conditions()?);
    let (verdict, unitary_residual, contraction) = match spec.framed_operator()? {
        Some(op) => {
            // The Gram residual is compared relative to |P_+|_F = |J_+|_F.
            let u = is_krein_unitary(&op, tol.unitary)?;
            let v = if u.unitary { Verdict::SelfAdjoint } else { Verdict::Neither };
            (v, Some(u.residual), Some(is_krein_contraction(&op, tol.psd).max_eigenvalue))
        }
        None => match spec.coupling {
            SchrodingerCoupling::Subspace { .. } => (Verdict::SelfAdjoint, None, None),
            _ => {
                let ok = cert.conservative(&form, tol.form);
                (if ok { Verdict::SelfAdjoint } else { Verdict::Neither }, None, None)
            }
        },
    };
    Ok(ClassificationReport {
        verdict,
        unitary_residual,
        contraction_max_eigenvalue: contraction,
        adjoint_max_eigenvalue: None,
        adjoint_full_max_eigenvalue: None,
        form_on_domain: cert.form_on_domain,
        dissipation_max_eigenvalue: cert.dissipation_max_eigenvalue,
        domain_dim: cert.domain_dim,
        maximal_dim: cert.trace_dim / 2,
        criterion_agrees: agrees(verdict, &cert, &form, &dissipation, tol),
        tags: spec.tags.clone(),
    })
}

/// Continuity at the vertex plus `phi'(L) - phi'(-L) = sum psi_j'(L) + Z psi_1(L)`.
pub fn dzn_conditions(graph: &MetricGraph, z: f64) -> Result<BoundaryConditions> {
    let n = graph.n();
    let len = graph.trace_len(ORDER);
    let mut m = CMat::zeros(n + 2, len);
    m[(0, 2)] = c(1.0);
    m[(0, 0)] = c(-1.0);
    for j in 1..=n {
        m[(j, 2)] = c(1.0);
        m[(j, 2 * (j + 1))] = c(-1.0);
    }
    let r = n + 1;
    m[(r, 3)] = c(1.0);
    m[(r, 1)] = c(-1.0);
    for j in 1..=n {
        m[(r, 2 * (j + 1) + 1)] = c(-1.0);
    }
    m[(r, 4)] -= c(z);
    BoundaryConditions::new(graph, ORDER, m)
}

/// Comparison of an `L_N` constraint set with `D_{Z,N}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DznEquivalence {
    /// `(1/(N+1)) sum m_ij`.
    pub z: f64,
    pub coupling_rank: usize,
    pub dzn_rank: usize,
    /// The coupling's domain lies inside `D_{Z,N}`.
    pub included: bool,
    /// Both constraint sets have the same solutions.
    pub equal: bool,
}

pub fn dzn_equivalence(graph: &MetricGraph, m: &[Vec<f64>]) -> Result<DznEquivalence> {
    let spec = SchrodingerSpec::matrix(graph, catalogue::delta_coupling(m)?)?;
    let n = graph.n();
    let z = m.iter().flatten().sum::<f64>() / (n + 1) as f64;
    let coupling = spec.conditions()?.matrix;
    let dzn = dzn_conditions(graph, z)?.matrix;
    let coupling_rank = rank(&coupling);
    let dzn_rank = rank(&dzn);
    let joint = rank(&vstack(&[coupling, dzn]));
    Ok(DznEquivalence {
        z,
        coupling_rank,
        dzn_rank,
        included: joint == coupling_rank,
        equal: joint == coupling_rank && joint == dzn_rank,
    })
}

/// `(2 + N, 2 + N)`, decaying exponents `e^{k x}` with `k^2 = -+ i`.
pub fn deficiency(graph: &MetricGraph) -> DeficiencyReport {
    let s = crate::linalg::sqrt(0.5);
    let root = |re: f64, im: f64| C64::new(re * s, im * s);
    let edges: Vec<EdgeDeficiency> = (1..graph.edges())
        .map(|edge| EdgeDeficiency {
            edge,
            d_minus: 1,
            d_plus: 1,
            roots_minus: vec![root(1.0, 1.0), root(-1.0, -1.0)],
            roots_plus: vec![root(1.0, -1.0), root(-1.0, 1.0)],
        })
        .collect();
    DeficiencyReport { d_minus: 2 + graph.n(), d_plus: 2 + graph.n(), edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::MEMBERSHIP_TOL;
    use crate::linalg::{frobenius, max_abs};

    #[test]
    fn frame_shapes_and_q() {
        let g = MetricGraph::schrodinger_loop(1.0, 2);
        let g = g.unwrap();
        let f = SchrodingerFrame::new(&g);
        assert_eq!(f.p_plus.nrows(), 6);
        assert!(frobenius(&(f.p_plus.transpose() + &f.p_plus)) == 0.0);
        let q = q_matrix(&g);
        assert_eq!(&q * &q, CMat::identity(4, 4));
    }

    #[test]
    fn forms_agree_on_basis_pairs() {
        let g = MetricGraph::schrodinger_loop(1.0, 2).unwrap();
        let gm = form_matrix(&g);
        let n = g.trace_len(ORDER);
        for i in 0..n {
            for j in 0..n {
                let mut u = TraceVector::zeros(&g, ORDER);
                let mut v = TraceVector::zeros(&g, ORDER);
                u.values[i] = c(1.0);
                v.values[j] = c(1.0);
                let a = boundary_form(&u, &v, &g).unwrap();
                assert!((a - boundary_form_q(&u, &v, &g).unwrap()).norm() < 1e-14);
                assert!((a - gm[(j, i)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn deficiency_counts() {
        for n in 1..=5 {
            let d = deficiency(&MetricGraph::schrodinger_loop(1.0, n).unwrap());
            assert_eq!((d.d_minus, d.d_plus), (n + 2, n + 2));
            for e in &d.edges {
                for z in &e.roots_minus {
                    assert!((z * z - C64::new(0.0, 1.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn dzn_examples() {
        let g1 = MetricGraph::schrodinger_loop(1.0, 1).unwrap();
        let e = dzn_equivalence(&g1, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(e.z, 0.0);
        assert!(e.included);
        let e = dzn_equivalence(&g1, &[vec![1.5, 0.7], vec![0.7, -1.5]]).unwrap();
        assert!((e.z - 0.7).abs() < 1e-15);
        let g2 = MetricGraph::schrodinger_loop(1.0, 2).unwrap();
        let e = dzn_equivalence(&g2, &[vec![1.0; 3], vec![1.0; 3], vec![1.0; 3]]).unwrap();
        assert_eq!(e.z, 3.0);
        assert_eq!((e.coupling_rank, e.dzn_rank), (6, 4));
        assert!(e.included && !e.equal);
    }

    #[test]
    fn subspace_domain_vanishes_form() {
        let g = MetricGraph::schrodinger_loop(1.0, 1).unwrap();
        let spec = SchrodingerSpec::subspace(&g, from_rows(&[&[1.0], &[1.0], &[0.0]])).unwrap();
        let r = classify(&spec, &Tolerances::default()).unwrap();
        assert_eq!(r.verdict, Verdict::SelfAdjoint);
        assert!(r.criterion_agrees && r.domain_dim == 3);
        let basis = spec.conditions().unwrap().domain_basis();
        assert!(max_abs(&(basis.adjoint() * form_matrix(&g) * &basis)) < 1e-13);
        let t = TraceVector::from_real(ORDER, &[2.0, 0.5, 2.0, 0.5, 0.0, 3.0]).unwrap();
        assert!(domain_membership(&spec, &t, MEMBERSHIP_TOL).unwrap().member);
    }
}
