//! Worked Schrödinger couplings: delta-type `L_N`, delta-prime, subspace
//! examples and the T-shaped families.

use alloc::vec::Vec;

use super::{dzn_conditions, SchrodingerSpec};
use crate::graph::MetricGraph;
use crate::linalg::{c, from_rows};
use crate::{CMat, Error, Result};

fn check_symmetric(m: &[Vec<f64>]) -> Result<usize> {
    let k = m.len();
    if k < 2 || m.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidParameter("m must be square of size N+1 >= 2"));
    }
    for i in 0..k {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(Error::InvalidParameter("m must be symmetric"));
            }
        }
    }
    Ok(k)
}

/// Blocks `[[1,0],[m_ii,N+1]]` on the diagonal and `[[0,0],[m_ij,0]]` elsewhere.
pub fn delta_coupling(m: &[Vec<f64>]) -> Result<CMat> {
    let k = check_symmetric(m)?;
    let mut l = CMat::zeros(2 * k, 2 * k);
    for i in 0..k {
        l[(2 * i, 2 * i)] = c(1.0);
        l[(2 * i + 1, 2 * i + 1)] = c(k as f64);
        for j in 0..k {
            l[(2 * i + 1, 2 * j)] = c(m[i][j]);
        }
    }
    Ok(l)
}

pub fn delta_spec(length: f64, m: &[Vec<f64>]) -> Result<SchrodingerSpec> {
    let k = check_symmetric(m)?;
    SchrodingerSpec::matrix(&MetricGraph::schrodinger_loop(length, k - 1)?, delta_coupling(m)?)
}

/// `[[1,0,0,0],[m1,2,m2,0],[0,0,1,0],[m2,0,m3,2]]` on the tadpole.
pub fn delta_tadpole(length: f64, m1: f64, m2: f64, m3: f64) -> Result<SchrodingerSpec> {
    let m = [alloc::vec![m1, m2], alloc::vec![m2, m3]];
    delta_spec(length, &m)
}

/// The delta-prime coupling; needs `m1 != 0`.
pub fn delta_prime_matrix(m: [f64; 4]) -> Result<CMat> {
    let [m1, m2, m3, m4] = m;
    if m1 == 0.0 {
        return Err(Error::InvalidParameter("m1 must be nonzero"));
    }
    Ok(from_rows(&[
        &[m1, m2, 0.0, 0.0],
        &[0.0, 2.0 / m1, 0.0, m3],
        &[-m1 * m3, -m2 * m3, 2.0, m4],
        &[0.0, 0.0, 0.0, 1.0],
    ]))
}

pub fn delta_prime(graph: &MetricGraph, m: [f64; 4]) -> Result<SchrodingerSpec> {
    if graph.n() != 1 {
        return Err(Error::InvalidParameter("delta-prime coupling needs one half-line"));
    }
    SchrodingerSpec::matrix(graph, delta_prime_matrix(m)?)
}

/// Subspace coupling on the tadpole with `Y = span{y}`.
pub fn tadpole_subspace(length: f64, y: [f64; 3]) -> Result<SchrodingerSpec> {
    SchrodingerSpec::subspace(&MetricGraph::schrodinger_loop(length, 1)?, from_rows(&[&[y[0]], &[y[1]], &[y[2]]]))
}

/// Blocks `[[N+1, m_ii],[0,1]]` on the diagonal and `[[0, m_ij],[0,0]]` elsewhere.
pub fn derivative_continuity_coupling(m: &[Vec<f64>]) -> Result<CMat> {
    let k = check_symmetric(m)?;
    let mut l = CMat::zeros(2 * k, 2 * k);
    for i in 0..k {
        l[(2 * i, 2 * i)] = c(k as f64);
        l[(2 * i + 1, 2 * i + 1)] = c(1.0);
        for j in 0..k {
            l[(2 * i, 2 * j + 1)] = c(m[i][j]);
        }
    }
    Ok(l)
}

pub fn t_shaped_derivative_continuity(length: f64, m: &[Vec<f64>]) -> Result<SchrodingerSpec> {
    let k = check_symmetric(m)?;
    SchrodingerSpec::matrix(&MetricGraph::t_shaped(length, k - 1)?, derivative_continuity_coupling(m)?)
}

/// `(1/(N+1)) sum m_ij`.
pub fn aggregate(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().sum::<f64>() / m.len() as f64
}

/// Row encoding `phi(0-) - phi(-L) = sum psi_j(0+) + Z psi'(0+)` on a T-shaped trace.
pub fn t_shaped_sum_condition(graph: &MetricGraph, z: f64) -> CMat {
    let mut row = CMat::zeros(1, graph.trace_len(crate::OperatorOrder::Schrodinger2));
    row[(0, 2)] = c(1.0);
    row[(0, 0)] = c(-1.0);
    for j in 1..=graph.n() {
        row[(0, 2 * (j + 1))] = c(-1.0);
    }
    row[(0, 5)] -= c(z);
    row
}

/// Explicit `D_{Z,N}` as a spec on the looping edge.
pub fn dzn_spec(length: f64, n: usize, z: f64) -> Result<SchrodingerSpec> {
    let g = MetricGraph::schrodinger_loop(length, n)?;
    let conditions = dzn_conditions(&g, z)?;
    SchrodingerSpec::conditions_spec(&g, conditions.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::{Tolerances, MEMBERSHIP_TOL};
    use crate::graph::{OperatorOrder, TraceVector};
    use crate::linalg::{frobenius, rank, vstack};
    use crate::report::Verdict;
    use crate::schrodinger::{classify, domain_membership};
    use alloc::vec;

    fn tr(v: &[f64]) -> TraceVector {
        TraceVector::from_real(OperatorOrder::Schrodinger2, v).unwrap()
    }

    #[test]
    fn delta_tadpole_is_self_adjoint() {
        for (m1, m2, m3) in [(0.0, 0.0, 0.0), (1.0, -2.0, 0.5), (3.0, 1.0, -3.0)] {
            let spec = delta_tadpole(1.0, m1, m2, m3).unwrap();
            let r = classify(&spec, &Tolerances::default()).unwrap();
            assert_eq!(r.verdict, Verdict::SelfAdjoint);
            assert!(r.unitary_residual.unwrap() < 1e-13);
            assert!(r.form_on_domain < 1e-13);
            assert!(!r.criterion_agrees, "domain is smaller than maximal");
        }
    }

    #[test]
    fn delta_prime_domain_literal() {
        let g = MetricGraph::schrodinger_loop(1.0, 1).unwrap();
        let m4 = 0.8;
        let spec = delta_prime(&g, [1.0, 0.0, -1.0, m4]).unwrap();
        assert_eq!(classify(&spec, &Tolerances::default()).unwrap().verdict, Verdict::SelfAdjoint);
        let d = 1.3;
        let t = tr(&[0.4, d, 0.4, d, -m4 / 2.0 * d, d]);
        assert!(domain_membership(&spec, &t, MEMBERSHIP_TOL).unwrap().member);
        assert!(matches!(delta_prime_matrix([0.0, 0.0, 0.0, 0.0]), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn t_shaped_delta_prime_conditions() {
        let g = MetricGraph::t_shaped(1.0, 1).unwrap();
        let m4 = -0.6;
        let spec = delta_prime(&g, [1.0, 0.0, 1.0, m4]).unwrap();
        // psi' = phi'(0-), phi'(-L) = 0, phi(0-) = phi(-L), phi(0-) - psi = m4/2 psi'.
        let literal = from_rows(&[
            &[0.0, 0.0, 0.0, -1.0, 0.0, 1.0],
            &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            &[-1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0, -1.0, -m4 / 2.0],
        ]);
        let coupling = spec.conditions().unwrap().matrix;
        assert_eq!(rank(&coupling), 4);
        assert_eq!(rank(&vstack(&[coupling, literal])), 4);
    }

    #[test]
    fn derivative_continuity_aggregate() {
        let m = vec![vec![0.3, -1.0, 2.0], vec![-1.0, 0.5, 0.25], vec![2.0, 0.25, -0.7]];
        let spec = t_shaped_derivative_continuity(1.0, &m).unwrap();
        let r = classify(&spec, &Tolerances::default()).unwrap();
        assert_eq!(r.verdict, Verdict::SelfAdjoint);
        let coupling = spec.conditions().unwrap().matrix;
        let row = t_shaped_sum_condition(spec.graph(), aggregate(&m));
        assert_eq!(rank(&vstack(&[coupling.clone(), row])), rank(&coupling));
    }

    #[test]
    fn zero_parameters_triple_the_value() {
        let m = vec![vec![0.0; 3]; 3];
        let spec = t_shaped_derivative_continuity(1.0, &m).unwrap();
        // phi(0-) = 3 phi(-L) = 3 psi_1 = 3 psi_2, equal derivatives.
        let t = tr(&[1.0, 0.2, 3.0, 0.2, 1.0, 0.2, 1.0, 0.2]);
        assert!(domain_membership(&spec, &t, MEMBERSHIP_TOL).unwrap().member);
    }

    #[test]
    fn subspace_examples() {
        let e9 = tadpole_subspace(1.0, [1.0, 0.0, -1.0]).unwrap();
        let t = tr(&[0.7, 0.2, 0.0, -5.0, -0.7, 0.2]);
        assert!(domain_membership(&e9, &t, MEMBERSHIP_TOL).unwrap().member);
        let r = classify(&e9, &Tolerances::default()).unwrap();
        assert!(r.verdict == Verdict::SelfAdjoint && r.criterion_agrees);
    }

    #[test]
    fn dzn_spec_is_self_adjoint() {
        for z in [0.0, 2.0, -1.5] {
            let spec = dzn_spec(1.0, 2, z).unwrap();
            let r = classify(&spec, &Tolerances::default()).unwrap();
            assert_eq!(r.verdict, Verdict::SelfAdjoint);
            assert!(r.criterion_agrees);
        }
    }

    #[test]
    fn delta_coupling_gram_identity() {
        let m = vec![vec![1.0, 2.0], vec![2.0, -0.5]];
        let spec = delta_spec(1.0, &m).unwrap();
        let op = spec.framed_operator().unwrap().unwrap();
        assert!(frobenius(&op.gram_defect()) < 1e-13);
    }
}
