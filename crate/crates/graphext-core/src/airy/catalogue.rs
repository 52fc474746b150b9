//! Worked Airy couplings: delta-type blocks, the two 6x6 unitary families,
//! the tadpole contraction matrix and the derivative-split examples.

use alloc::vec;
use alloc::vec::Vec;

use super::{build_frame, AirySpec, FrameKind};
use crate::graph::{MetricGraph, OperatorOrder, TraceVector};
use crate::linalg::{block_diag, c, from_row_vecs, from_rows};
use crate::{CMat, Result};

/// Tag attached when the parameters leave the stated contraction region.
pub const EXPECTED_NON_CONTRACTION: &str = "expected non-contraction";

/// `[[1,0,0],[z,1,0],[z^2/2,z,1]]`.
pub fn delta_block(z: f64) -> CMat {
    from_rows(&[&[1.0, 0.0, 0.0], &[z, 1.0, 0.0], &[z * z / 2.0, z, 1.0]])
}

/// Looping edge with `2k` half-lines, `alpha = +-a0`, `beta = +-b0` alternating.
pub fn alternating_graph(length: f64, k: usize, a0: f64, b0: f64) -> Result<MetricGraph> {
    let mut coef = vec![(a0, b0)];
    for j in 1..=2 * k {
        coef.push(if j % 2 == 1 { (a0, b0) } else { (-a0, -b0) });
    }
    MetricGraph::looping_edge(length, coef)
}

/// Block-diagonal delta coupling pairing the loop ends and consecutive half-lines.
pub fn delta_z(graph: &MetricGraph, z: f64) -> Result<AirySpec> {
    let frame = build_frame(graph, FrameKind::EvenPaired)?;
    let blocks: Vec<CMat> = (0..=graph.n() / 2).map(|_| delta_block(z)).collect();
    AirySpec::matrix(frame, block_diag(&blocks))
}

fn even_paired_6(graph: &MetricGraph, rows: &[Vec<f64>]) -> Result<AirySpec> {
    let frame = build_frame(graph, FrameKind::EvenPaired)?;
    AirySpec::matrix(frame, from_row_vecs(rows))
}

/// Delta coupling with the cross term `m` between loop and half-lines.
pub fn delta_with_cross_term(graph: &MetricGraph, z: f64, m: f64) -> Result<AirySpec> {
    let q = z * z / 2.0;
    even_paired_6(
        graph,
        &[
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![z, 1.0, 0.0, 0.0, 0.0, 0.0],
            vec![q, z, 1.0, m, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, z, 1.0, 0.0],
            vec![-m, 0.0, 0.0, q, z, 1.0],
        ],
    )
}

pub fn two_parameter_unitary(graph: &MetricGraph, m1: f64, m2: f64) -> Result<AirySpec> {
    even_paired_6(
        graph,
        &[
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, m1, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, m2, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            vec![-m2, 0.0, 0.0, m1 * m1 / 2.0, m1, 1.0],
        ],
    )
}

pub fn four_parameter_unitary(graph: &MetricGraph, m: [f64; 4]) -> Result<AirySpec> {
    let [m1, m2, m3, m4] = m;
    even_paired_6(
        graph,
        &[
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![m1, 0.0, 0.0, m2, 1.0, 0.0],
            vec![(m1 * m1 + 1.0) / 2.0, 1.0, 1.0, m3, m1, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, m4, 0.0, 0.0],
            vec![m4 - m3 + m1 * m2, m4, 0.0, (m2 * m2 + m4 * m4) / 2.0, m2, 1.0],
        ],
    )
}

/// Tadpole with every coefficient equal to `a0`.
pub fn uniform_tadpole(length: f64, a0: f64) -> Result<MetricGraph> {
    MetricGraph::tadpole(length, (a0, a0), (a0, a0))
}

/// Region in which the tadpole delta matrix is claimed to contract.
pub fn tadpole_delta_region(a0: f64, m: [f64; 4]) -> bool {
    let [m1, m2, m3, m4] = m;
    a0 < 0.0 && m4 <= 1.5 && 4.0 * m1 - (m2 * m2 + m3 * m3) <= 2.0
}

pub fn tadpole_delta_matrix(m: [f64; 4]) -> CMat {
    let [m1, m2, m3, m4] = m;
    let s = m2 + m3;
    from_rows(&[
        &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        &[s / 2.0, 1.0, 0.0, 1.0, 0.0, 0.0],
        &[m1, s, 2.0, m2, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        &[s / 2.0, 1.0, 0.0, 1.0, 0.0, 0.0],
        &[m3, 2.0, 0.0, m4, 0.0, 2.0],
    ])
}

/// Replicated-frame delta coupling on a uniform tadpole.
pub fn tadpole_delta(length: f64, a0: f64, m: [f64; 4]) -> Result<AirySpec> {
    let graph = uniform_tadpole(length, a0)?;
    let frame = build_frame(&graph, FrameKind::Replicated)?;
    let spec = AirySpec::matrix(frame, tadpole_delta_matrix(m))?;
    Ok(if tadpole_delta_region(a0, m) { spec } else { spec.with_tag(EXPECTED_NON_CONTRACTION) })
}

/// `[[m1, m2], [m3, -m1 m2 / m3]]`.
pub fn split_family_matrix(m1: f64, m2: f64, m3: f64) -> Result<CMat> {
    if m3 == 0.0 {
        return Err(crate::Error::InvalidParameter("m3 must be nonzero"));
    }
    Ok(from_rows(&[&[m1, m2], &[m3, -m1 * m2 / m3]]))
}

/// Stated sufficient region for the split family and its adjoint to contract.
pub fn split_family_region(m1: f64, m2: f64, m3: f64) -> bool {
    m3 * m3 + m1 * m1 <= 2.0
        && m2 * m2 * (m1 * m1 + 1.0) <= 2.0
        && m1 * (m3 * m3 - m2 * m2) == 0.0
        && m1 * m1 + m2 * m2 <= 1.0
        && m1 * m1 * m2 * m2 / (m3 * m3) + m3 * m3 <= 2.0
}

/// `span{(1, 1, z)}` as a column.
pub fn loop_line_subspace(z: f64) -> CMat {
    from_rows(&[&[1.0], &[1.0], &[z]])
}

pub fn derivative_split(graph: &MetricGraph, y: CMat, lmat: CMat) -> Result<AirySpec> {
    let frame = build_frame(graph, FrameKind::DerivativeSplit)?;
    AirySpec::mixed(frame, y, lmat)
}

/// Tadpole with `alpha0 = alpha1`, `Y = span{(1,1,z)}` and `L = [[1,1],[1,-1]]`.
pub fn continuity_split(graph: &MetricGraph, z: f64) -> Result<AirySpec> {
    derivative_split(graph, loop_line_subspace(z), split_family_matrix(1.0, 1.0, 1.0)?)
}

/// Constraint rows of the literal pairwise conditions for the 6x6 delta coupling.
pub fn delta_pairwise_conditions(graph: &MetricGraph, z: f64, m: f64) -> CMat {
    // Trace columns: point p, derivative k at 3p + k. Points: phi(-L), phi(L), psi_1, psi_2.
    let n = graph.trace_len(OperatorOrder::Airy3);
    let idx = |p: usize, k: usize| 3 * p + k;
    let q = z * z / 2.0;
    let rows: [&[(usize, f64)]; 6] = [
        &[(idx(1, 0), 1.0), (idx(0, 0), -1.0)],
        &[(idx(3, 0), 1.0), (idx(2, 0), -1.0)],
        &[(idx(1, 1), 1.0), (idx(0, 1), -1.0), (idx(0, 0), -z)],
        &[(idx(3, 1), 1.0), (idx(2, 1), -1.0), (idx(2, 0), -z)],
        &[(idx(1, 2), 1.0), (idx(0, 2), -1.0), (idx(0, 0), -q), (idx(0, 1), -z), (idx(2, 0), -m)],
        &[(idx(3, 2), 1.0), (idx(2, 2), -1.0), (idx(2, 0), -q), (idx(2, 1), -z), (idx(0, 0), m)],
    ];
    let mut out = CMat::zeros(rows.len(), n);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row.iter() {
            out[(i, j)] += c(v);
        }
    }
    out
}

/// A trace meeting the pairwise delta conditions, from free loop-lower and `psi_1` data.
pub fn delta_pairwise_trace(z: f64, m: f64, lower: [f64; 3], first: [f64; 3]) -> TraceVector {
    let q = z * z / 2.0;
    let upper = [lower[0], lower[1] + z * lower[0], lower[2] + q * lower[0] + z * lower[1] + m * first[0]];
    let second = [first[0], first[1] + z * first[0], first[2] + q * first[0] + z * first[1] - m * lower[0]];
    let mut values = Vec::with_capacity(12);
    for block in [lower, upper, first, second] {
        values.extend(block);
    }
    TraceVector::from_real(OperatorOrder::Airy3, &values).expect("twelve entries")
}
