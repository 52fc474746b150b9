//! Airy operator `alpha u''' + beta u'` on looping-edge graphs: boundary
//! frames, classification, domains and deficiency indices.

pub mod catalogue;

use alloc::vec;
use alloc::vec::Vec;

use crate::boundary::{
    derivative_selector, domain_certificates, input_points, point_selector, points_selector,
    BoundaryConditions, DomainCertificates, Membership,
};
use crate::graph::{MetricGraph, OperatorOrder, TraceVector};
use crate::krein::{
    is_krein_contraction, is_krein_contraction_on, is_krein_unitary, krein_adjoint, FramedOperator,
    IndefiniteForm,
};
use crate::linalg::{
    block_diag, c, complement_basis, from_rows, polynomial_roots, range_basis, rank, real_diag, vstack,
};
use crate::report::{ClassificationReport, DeficiencyReport, EdgeDeficiency, Verdict};
use crate::{CMat, Error, Result, C64};

const ORDER: OperatorOrder = OperatorOrder::Airy3;

/// `[[beta, 0, alpha], [0, -alpha, 0], [alpha, 0, 0]]`.
pub fn b_block(alpha: f64, beta: f64) -> Result<CMat> {
    if alpha == 0.0 {
        return Err(Error::DegenerateAiryEdge { edge: 0 });
    }
    Ok(from_rows(&[&[beta, 0.0, alpha], &[0.0, -alpha, 0.0], &[alpha, 0.0, 0.0]]))
}

fn edge_block(graph: &MetricGraph, e: usize) -> Result<CMat> {
    b_block(graph.alpha(e), graph.beta(e)).map_err(|_| Error::DegenerateAiryEdge { edge: e })
}

/// Matrix `G` with `[A0* U, V] + [U, A0* V] = V* G U` on canonical traces.
pub fn form_matrix(graph: &MetricGraph) -> Result<CMat> {
    graph.require_airy()?;
    let b0 = edge_block(graph, 0)?;
    let mut blocks = vec![b0.clone(), -b0];
    for e in 1..graph.edges() {
        blocks.push(edge_block(graph, e)?);
    }
    Ok(block_diag(&blocks))
}

/// Loop entries carry `+`/`-` for the lower/upper end.
fn signed_diag(graph: &MetricGraph, coef: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut d = vec![coef(0), -coef(0)];
    d.extend((1..graph.edges()).map(coef));
    d
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// Sum of `(B_e dU | dV)` over the boundary points, upper loop end negated.
pub fn boundary_form(u: &TraceVector, v: &TraceVector, graph: &MetricGraph) -> Result<C64> {
    u.check(graph, ORDER)?;
    v.check(graph, ORDER)?;
    graph.require_airy()?;
    let mut total = c(0.0);
    for p in 0..graph.points() {
        let (e, sign) = match p {
            0 => (0, 1.0),
            1 => (0, -1.0),
            _ => (p - 1, 1.0),
        };
        let b = edge_block(graph, e)?;
        let bu = &b * crate::CVec::from_column_slice(u.point(p));
        total += dot(bu.as_slice(), v.point(p)) * sign;
    }
    debug_assert!({
        let split = boundary_form_split(u, v, graph)?;
        (split - total).norm() <= 1e-9 * (1.0 + total.norm())
    });
    Ok(total)
}

/// The same form written with `D_alpha`, `D_beta` acting on `U, U', U''`.
pub fn boundary_form_split(u: &TraceVector, v: &TraceVector, graph: &MetricGraph) -> Result<C64> {
    u.check(graph, ORDER)?;
    v.check(graph, ORDER)?;
    let da = signed_diag(graph, |e| graph.alpha(e));
    let db = signed_diag(graph, |e| graph.beta(e));
    let (u0, u1, u2) = (u.derivative(0), u.derivative(1), u.derivative(2));
    let (v0, v1, v2) = (v.derivative(0), v.derivative(1), v.derivative(2));
    let mut total = c(0.0);
    for i in 0..graph.points() {
        total += u0[i] * v0[i].conj() * db[i];
        total += u2[i] * v0[i].conj() * da[i];
        total += u0[i] * v2[i].conj() * da[i];
        total -= u1[i] * v1[i].conj() * da[i];
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    EvenPaired,
    Replicated,
    DerivativeSplit,
}

impl FrameKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FrameKind::EvenPaired => "even_paired",
            FrameKind::Replicated => "replicated",
            FrameKind::DerivativeSplit => "derivative_split",
        }
    }
}

/// A boundary frame: two Krein spaces and the trace selectors feeding them.
#[derive(Debug, Clone, PartialEq)]
pub struct AiryFrame {
    pub kind: FrameKind,
    pub graph: MetricGraph,
    pub plus: IndefiniteForm,
    pub minus: IndefiniteForm,
    /// Trace to input coordinates.
    pub input: CMat,
    /// Trace to output coordinates.
    pub output: CMat,
}

fn replicate(block: &CMat, times: usize) -> CMat {
    let copies: Vec<CMat> = (0..times).map(|_| block.clone()).collect();
    vstack(&copies)
}

pub fn build_frame(graph: &MetricGraph, kind: FrameKind) -> Result<AiryFrame> {
    graph.require_airy()?;
    let n = graph.n();
    let b0 = edge_block(graph, 0)?;
    let (plus, minus, input, output) = match kind {
        FrameKind::EvenPaired => {
            if n % 2 != 0 {
                return Err(Error::FrameInapplicable("even-paired frame needs an even number of half-lines"));
            }
            let odd_ok = (1..=n).step_by(2).all(|j| graph.alpha(j) > 0.0);
            let even_ok = (2..=n).step_by(2).all(|j| graph.alpha(j) < 0.0);
            if !odd_ok || !even_ok {
                return Err(Error::FrameInapplicable("even-paired frame needs alpha > 0 on odd and alpha < 0 on even half-lines"));
            }
            let mut plus = vec![b0.clone()];
            let mut minus = vec![b0];
            let mut ins = vec![0];
            let mut outs = vec![1];
            for j in 1..=n {
                let b = edge_block(graph, j)?;
                if j % 2 == 1 {
                    plus.push(b);
                    ins.push(j + 1);
                } else {
                    minus.push(-b);
                    outs.push(j + 1);
                }
            }
            (
                block_diag(&plus),
                block_diag(&minus),
                points_selector(graph, ORDER, &ins),
                points_selector(graph, ORDER, &outs),
            )
        }
        FrameKind::Replicated => {
            let mut plus = vec![b0.clone()];
            for j in 1..=n {
                plus.push(edge_block(graph, j)?);
            }
            let scaled = &b0 * c(1.0 / (n + 1) as f64);
            let minus: Vec<CMat> = (0..=n).map(|_| scaled.clone()).collect();
            (
                block_diag(&plus),
                block_diag(&minus),
                points_selector(graph, ORDER, &input_points(graph)),
                replicate(&point_selector(graph, ORDER, 1), n + 1),
            )
        }
        FrameKind::DerivativeSplit => {
            let plus: Vec<f64> = (0..=n).map(|e| graph.alpha(e)).collect();
            let minus = vec![graph.alpha(0) / (n + 1) as f64; n + 1];
            let d1 = derivative_selector(graph, ORDER, 1);
            let ins = input_points(graph);
            let input = vstack(&ins.iter().map(|&p| d1.rows(p, 1).into_owned()).collect::<Vec<_>>());
            (real_diag(&plus), real_diag(&minus), input, replicate(&d1.rows(1, 1).into_owned(), n + 1))
        }
    };
    Ok(AiryFrame {
        kind,
        graph: graph.clone(),
        plus: IndefiniteForm::new(plus)?,
        minus: IndefiniteForm::new(minus)?,
        input,
        output,
    })
}

impl AiryFrame {
    /// `(H+ S_in U | S_in V) - (H- S_out U | S_out V)` as a matrix on traces.
    pub fn frame_form(&self) -> CMat {
        self.input.adjoint() * self.plus.matrix() * &self.input
            - self.output.adjoint() * self.minus.matrix() * &self.output
    }

    /// Diagonal `D_alpha`, `D_beta` over `(phi(-L), phi(L), psi_1, ...)`.
    pub fn d_alpha(&self) -> CMat {
        real_diag(&signed_diag(&self.graph, |e| self.graph.alpha(e)))
    }

    pub fn d_beta(&self) -> CMat {
        real_diag(&signed_diag(&self.graph, |e| self.graph.beta(e)))
    }
}

/// Direction of time for the Airy flow: `u_t = s (alpha u''' + beta u')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorSign {
    /// `s = +1`, i.e. `A = -A0*`.
    Forward,
    /// `s = -1`, i.e. `A = A0*`.
    Backward,
}

impl GeneratorSign {
    pub fn factor(self) -> f64 {
        match self {
            GeneratorSign::Forward => 1.0,
            GeneratorSign::Backward => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorSign::Forward => "forward",
            GeneratorSign::Backward => "backward",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AiryCoupling {
    Matrix { frame: AiryFrame, lmat: CMat },
    Mixed { frame: AiryFrame, y: CMat, lmat: CMat },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AirySpec {
    pub coupling: AiryCoupling,
    pub generator_sign: GeneratorSign,
    pub tags: Vec<&'static str>,
}

impl AirySpec {
    pub fn matrix(frame: AiryFrame, lmat: CMat) -> Result<Self> {
        if frame.kind == FrameKind::DerivativeSplit {
            return Err(Error::FrameInapplicable("derivative-split frame takes a mixed coupling"));
        }
        check_square(&lmat, frame.plus.dim())?;
        let generator_sign = match frame.kind {
            FrameKind::EvenPaired => GeneratorSign::Backward,
            _ => GeneratorSign::Forward,
        };
        Ok(Self { coupling: AiryCoupling::Matrix { frame, lmat }, generator_sign, tags: Vec::new() })
    }

    pub fn mixed(frame: AiryFrame, y: CMat, lmat: CMat) -> Result<Self> {
        if frame.kind != FrameKind::DerivativeSplit {
            return Err(Error::FrameInapplicable("mixed coupling needs the derivative-split frame"));
        }
        check_square(&lmat, frame.plus.dim())?;
        if y.nrows() != frame.graph.points() {
            return Err(Error::ShapeMismatch { expected: frame.graph.points(), got: y.nrows() });
        }
        if rank(&y) < y.ncols() {
            return Err(Error::DegenerateBasis);
        }
        Ok(Self {
            coupling: AiryCoupling::Mixed { frame, y, lmat },
            generator_sign: GeneratorSign::Forward,
            tags: Vec::new(),
        })
    }

    pub fn with_sign(mut self, sign: GeneratorSign) -> Self {
        self.generator_sign = sign;
        self
    }

    pub fn with_tag(mut self, tag: &'static str) -> Self {
        self.tags.push(tag);
        self
    }

    pub fn frame(&self) -> &AiryFrame {
        match &self.coupling {
            AiryCoupling::Matrix { frame, .. } | AiryCoupling::Mixed { frame, .. } => frame,
        }
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.frame().graph
    }

    pub fn lmat(&self) -> &CMat {
        match &self.coupling {
            AiryCoupling::Matrix { lmat, .. } | AiryCoupling::Mixed { lmat, .. } => lmat,
        }
    }

    pub fn framed_operator(&self) -> Result<FramedOperator> {
        let f = self.frame();
        FramedOperator::new(self.lmat().clone(), f.plus.clone(), f.minus.clone())
    }

    /// All defining linear constraints on canonical traces.
    pub fn conditions(&self) -> Result<BoundaryConditions> {
        let frame = self.frame();
        let coupling = self.lmat() * &frame.input - &frame.output;
        let matrix = match &self.coupling {
            AiryCoupling::Matrix { .. } => coupling,
            AiryCoupling::Mixed { y, .. } => {
                let g = &frame.graph;
                let e0 = derivative_selector(g, ORDER, 0);
                let e2 = derivative_selector(g, ORDER, 2);
                let yb = range_basis(y);
                let yp = complement_basis(y);
                let second = frame.d_alpha() * e2 + frame.d_beta() * &e0 * c(0.5);
                vstack(&[yp.adjoint() * e0, yb.adjoint() * second, coupling])
            }
        };
        BoundaryConditions::new(self.graph(), ORDER, matrix)
    }

    /// Hermitian matrix of `2 Re[A U, U]` on traces for this generator.
    pub fn dissipation_matrix(&self) -> Result<CMat> {
        Ok(form_matrix(self.graph())? * c(-self.generator_sign.factor()))
    }
}

fn check_square(lmat: &CMat, dim: usize) -> Result<()> {
    if lmat.nrows() != lmat.ncols() {
        return Err(Error::Unsupported("rectangular couplings"));
    }
    if lmat.nrows() != dim {
        return Err(Error::ShapeMismatch { expected: dim, got: lmat.nrows() });
    }
    Ok(())
}

/// Tolerances for classification tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative Gram residual for Krein-unitarity.
    pub unitary: f64,
    /// Semidefiniteness, scaled by `1 + |H|`.
    pub psd: f64,
    /// Vanishing of the form on the domain, scaled by `1 + |G|`.
    pub form: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { unitary: 1e-10, psd: 1e-10, form: 1e-10 }
    }
}

/// Default relative tolerance for domain membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

pub fn domain_membership(spec: &AirySpec, trace: &TraceVector, tol: f64) -> Result<Membership> {
    spec.conditions()?.membership(trace, tol)
}

/// Basis of the range of the output selector in the replicated frame.
fn replication_vectors(n: usize) -> CMat {
    replicate(&CMat::identity(3, 3), n + 1)
}

pub fn classify(spec: &AirySpec, tol: &Tolerances) -> Result<ClassificationReport> {
    let op = spec.framed_operator()?;
    let form = form_matrix(spec.graph())?;
    let dissipation = spec.dissipation_matrix()?;
    let conditions = spec.conditions()?;
    let cert = domain_certificates(&form, &dissipation, &conditions);
    let contraction = is_krein_contraction(&op, tol.psd);
    let adjoint = krein_adjoint(&op);
    let adjoint_full = is_krein_contraction(&adjoint, tol.psd);
    let unitary = is_krein_unitary(&op, tol.unitary)?;
    let (verdict, adjoint_used) = match (&spec.coupling, spec.frame().kind) {
        (AiryCoupling::Matrix { .. }, FrameKind::EvenPaired) => {
            let v = if unitary.unitary { Verdict::SkewSelfAdjoint } else { Verdict::Neither };
            (v, adjoint_full)
        }
        (AiryCoupling::Matrix { .. }, _) => {
            let restricted =
                is_krein_contraction_on(&adjoint, &replication_vectors(spec.graph().n()), tol.psd);
            let ok = contraction.contraction && restricted.contraction;
            (if ok { Verdict::ContractionGenerator } else { Verdict::Neither }, restricted)
        }
        (AiryCoupling::Mixed { .. }, _) => {
            let ok = contraction.contraction && adjoint_full.contraction;
            (if ok { Verdict::ContractionGenerator } else { Verdict::Neither }, adjoint_full)
        }
    };
    let criterion_agrees = agrees(verdict, &cert, &form, &dissipation, tol);
    Ok(ClassificationReport {
        verdict,
        unitary_residual: Some(unitary.residual),
        contraction_max_eigenvalue: Some(contraction.max_eigenvalue),
        adjoint_max_eigenvalue: Some(adjoint_used.max_eigenvalue),
        adjoint_full_max_eigenvalue: Some(adjoint_full.max_eigenvalue),
        form_on_domain: cert.form_on_domain,
        dissipation_max_eigenvalue: cert.dissipation_max_eigenvalue,
        domain_dim: cert.domain_dim,
        maximal_dim: if verdict.is_unitary() { cert.trace_dim / 2 } else { cert.maximal_dim },
        criterion_agrees,
        tags: spec.tags.clone(),
    })
}

pub(crate) fn agrees(
    verdict: Verdict,
    cert: &DomainCertificates,
    form: &CMat,
    dissipation: &CMat,
    tol: &Tolerances,
) -> bool {
    let conservative = cert.conservative(form, tol.form);
    let generator = cert.maximal_dissipative(dissipation, tol.psd);
    match verdict {
        Verdict::SkewSelfAdjoint | Verdict::SelfAdjoint => conservative,
        Verdict::ContractionGenerator => generator,
        Verdict::Neither => !generator,
    }
}

/// Threshold below which a root counts as lying on the imaginary axis.
pub const IMAGINARY_AXIS_TOL: f64 = 1e-10;

/// Deficiency indices from the decaying exponentials on each half-line.
pub fn deficiency(graph: &MetricGraph) -> Result<DeficiencyReport> {
    graph.require_airy()?;
    let mut edges = Vec::with_capacity(graph.n());
    let (mut d_minus, mut d_plus) = (3, 3);
    for e in 1..graph.edges() {
        let (a, b) = graph.coefficients[e];
        let roots_minus = polynomial_roots(&[a, 0.0, b, -1.0]);
        let roots_plus = polynomial_roots(&[a, 0.0, b, 1.0]);
        if roots_minus.iter().chain(&roots_plus).any(|z| z.re.abs() < IMAGINARY_AXIS_TOL) {
            return Err(Error::BoundaryCaseCoefficients { edge: e });
        }
        let dm = roots_minus.iter().filter(|z| z.re < 0.0).count();
        let dp = roots_plus.iter().filter(|z| z.re < 0.0).count();
        d_minus += dm;
        d_plus += dp;
        edges.push(EdgeDeficiency { edge: e, d_minus: dm, d_plus: dp, roots_minus, roots_plus });
    }
    Ok(DeficiencyReport { d_minus, d_plus, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, inverse};

    fn alt_graph(k: usize) -> MetricGraph {
        let mut coef = vec![(1.0, 1.0)];
        for j in 1..=2 * k {
            coef.push(if j % 2 == 1 { (1.0, 1.0) } else { (-1.0, -1.0) });
        }
        MetricGraph::looping_edge(1.0, coef).unwrap()
    }

    #[test]
    fn b_block_entries_and_determinant() {
        assert_eq!(b_block(1.0, 2.0).unwrap(), from_rows(&[&[2.0, 0.0, 1.0], &[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0]]));
        assert!(matches!(b_block(0.0, 1.0), Err(Error::DegenerateAiryEdge { .. })));
        for (a, b) in [(0.7, -1.3), (-2.0, 0.4), (3.1, 5.0)] {
            let det = b_block(a, b).unwrap().determinant();
            assert!((det - c(a * a * a)).norm() < 1e-12);
        }
    }

    #[test]
    fn frames_reproduce_the_boundary_form() {
        let g = alt_graph(1);
        let form = form_matrix(&g).unwrap();
        for kind in [FrameKind::EvenPaired, FrameKind::Replicated] {
            let f = build_frame(&g, kind).unwrap();
            assert!(frobenius(&(f.frame_form() - &form)) < 1e-13, "{kind:?}");
        }
    }

    #[test]
    fn replicated_tadpole_forms() {
        let g = MetricGraph::tadpole(1.0, (1.0, 1.0), (1.0, 1.0)).unwrap();
        let f = build_frame(&g, FrameKind::Replicated).unwrap();
        let b0 = b_block(1.0, 1.0).unwrap() * c(0.5);
        assert_eq!(f.minus.matrix(), &block_diag(&[b0.clone(), b0]));
    }

    #[test]
    fn split_frame_weights() {
        let g = MetricGraph::looping_edge(1.0, vec![(1.0, 0.0); 3]).unwrap();
        let f = build_frame(&g, FrameKind::DerivativeSplit).unwrap();
        assert_eq!(f.plus.matrix(), &CMat::identity(3, 3));
        assert!(frobenius(&(f.minus.matrix() - CMat::identity(3, 3) * c(1.0 / 3.0))) < 1e-15);
    }

    #[test]
    fn even_paired_example_frames_coincide() {
        let f = build_frame(&alt_graph(1), FrameKind::EvenPaired).unwrap();
        assert_eq!(f.plus, f.minus);
        let odd = MetricGraph::tadpole(1.0, (1.0, 1.0), (1.0, 1.0)).unwrap();
        assert!(matches!(build_frame(&odd, FrameKind::EvenPaired), Err(Error::FrameInapplicable(_))));
        let wrong = MetricGraph::looping_edge(1.0, vec![(1.0, 1.0); 3]).unwrap();
        assert!(matches!(build_frame(&wrong, FrameKind::EvenPaired), Err(Error::FrameInapplicable(_))));
    }

    #[test]
    fn split_form_agrees_on_basis_pairs() {
        let g = alt_graph(1);
        let n = g.trace_len(ORDER);
        for i in 0..n {
            for j in 0..n {
                let mut u = TraceVector::zeros(&g, ORDER);
                let mut v = TraceVector::zeros(&g, ORDER);
                u.values[i] = c(1.0);
                v.values[j] = c(1.0);
                let a = boundary_form(&u, &v, &g).unwrap();
                let b = boundary_form_split(&u, &v, &g).unwrap();
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn delta_block_adjoint_is_inverse() {
        let g = MetricGraph::looping_edge(1.0, vec![(1.0, 1.0), (1.0, 1.0), (-1.0, -1.0)]).unwrap();
        let spec = catalogue::delta_z(&g, 2.0).unwrap();
        let adj = krein_adjoint(&spec.framed_operator().unwrap());
        let inv = inverse(spec.lmat()).unwrap();
        assert!(frobenius(&(adj.lmat - inv)) < 1e-12);
    }

    #[test]
    fn deficiency_rows() {
        let cases = [((1.0, 1.0), (2, 1)), ((1.0, -1.0), (2, 1)), ((-1.0, 1.0), (1, 2)), ((-1.0, -1.0), (1, 2))];
        for (coef, want) in cases {
            let g = MetricGraph::tadpole(1.0, (1.0, 1.0), coef).unwrap();
            let d = deficiency(&g).unwrap();
            assert_eq!((d.edges[0].d_minus, d.edges[0].d_plus), want, "{coef:?}");
        }
        let g = MetricGraph::tadpole(1.0, (1.0, 1.0), (1.0, 0.0)).unwrap();
        let d = deficiency(&g).unwrap();
        assert_eq!((d.d_minus, d.d_plus), (5, 4));
        for k in 1..=3 {
            let d = deficiency(&alt_graph(k)).unwrap();
            assert_eq!((d.d_minus, d.d_plus), (3 * k + 3, 3 * k + 3));
        }
    }
}
