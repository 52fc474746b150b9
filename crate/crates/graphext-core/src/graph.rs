//! Metric graphs, sampled functions and boundary trace vectors.
//!
//! Canonical point order: loop lower end, loop upper end, then the lower
//! end of each half-line. Derivatives are taken along increasing `x`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{c, exp};
use crate::{CVec, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    LoopingEdge,
    Tadpole,
    TShaped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorOrder {
    Airy3,
    Schrodinger2,
}

impl OperatorOrder {
    /// Entries per boundary point.
    pub fn block(self) -> usize {
        match self {
            OperatorOrder::Airy3 => 3,
            OperatorOrder::Schrodinger2 => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    pub topology: Topology,
    pub length: f64,
    pub half_lines: usize,
    /// `(alpha, beta)` per edge; index 0 is the loop or internal edge.
    pub coefficients: Vec<(f64, f64)>,
}

impl MetricGraph {
    pub fn new(
        topology: Topology,
        length: f64,
        half_lines: usize,
        coefficients: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGraph("L must be positive"));
        }
        if half_lines == 0 {
            return Err(Error::InvalidGraph("N must be at least 1"));
        }
        if topology == Topology::Tadpole && half_lines != 1 {
            return Err(Error::InvalidGraph("tadpole has exactly one half-line"));
        }
        if coefficients.len() != half_lines + 1 {
            return Err(Error::InvalidGraph("coefficients must have N+1 entries"));
        }
        if coefficients.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidGraph("coefficients must be finite"));
        }
        Ok(Self { topology, length, half_lines, coefficients })
    }

    pub fn looping_edge(length: f64, coefficients: Vec<(f64, f64)>) -> Result<Self> {
        let n = coefficients.len().saturating_sub(1);
        Self::new(Topology::LoopingEdge, length, n, coefficients)
    }

    pub fn tadpole(length: f64, loop_coef: (f64, f64), line_coef: (f64, f64)) -> Result<Self> {
        Self::new(Topology::Tadpole, length, 1, vec![loop_coef, line_coef])
    }

    /// T-shaped graph with unit coefficients (Schrödinger ignores them).
    pub fn t_shaped(length: f64, half_lines: usize) -> Result<Self> {
        Self::new(Topology::TShaped, length, half_lines, vec![(1.0, 0.0); half_lines + 1])
    }

    /// Schrödinger looping-edge graph; coefficients are placeholders.
    pub fn schrodinger_loop(length: f64, half_lines: usize) -> Result<Self> {
        let topology = if half_lines == 1 { Topology::Tadpole } else { Topology::LoopingEdge };
        Self::new(topology, length, half_lines, vec![(1.0, 0.0); half_lines + 1])
    }

    pub fn n(&self) -> usize {
        self.half_lines
    }

    pub fn edges(&self) -> usize {
        self.half_lines + 1
    }

    pub fn points(&self) -> usize {
        self.half_lines + 2
    }

    pub fn alpha(&self, e: usize) -> f64 {
        self.coefficients[e].0
    }

    pub fn beta(&self, e: usize) -> f64 {
        self.coefficients[e].1
    }

    pub fn require_airy(&self) -> Result<()> {
        match self.coefficients.iter().position(|&(a, _)| a == 0.0) {
            Some(edge) => Err(Error::DegenerateAiryEdge { edge }),
            None => Ok(()),
        }
    }

    /// Endpoints of the bounded edge: `[-L, L]`, or `[-L, 0]` for T-shaped graphs.
    pub fn bounded_edge(&self) -> (f64, f64) {
        match self.topology {
            Topology::TShaped => (-self.length, 0.0),
            _ => (-self.length, self.length),
        }
    }

    /// Coordinate of the vertex carrying the half-lines.
    pub fn vertex(&self) -> f64 {
        self.bounded_edge().1
    }

    pub fn trace_len(&self, order: OperatorOrder) -> usize {
        order.block() * self.points()
    }

    /// `(edge, sample index is the last one, orientation)` for point `p`.
    pub(crate) fn point_location(&self, p: usize) -> (usize, bool, f64) {
        match p {
            0 => (0, false, 1.0),
            1 => (0, true, -1.0),
            _ => (p - 1, false, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceVector {
    pub order: OperatorOrder,
    pub values: Vec<C64>,
}

impl TraceVector {
    pub fn new(order: OperatorOrder, values: Vec<C64>) -> Result<Self> {
        if values.len() % order.block() != 0 || values.len() < 3 * order.block() {
            return Err(Error::ShapeMismatch { expected: 3 * order.block(), got: values.len() });
        }
        Ok(Self { order, values })
    }

    pub fn zeros(graph: &MetricGraph, order: OperatorOrder) -> Self {
        Self { order, values: vec![c(0.0); graph.trace_len(order)] }
    }

    pub fn from_real(order: OperatorOrder, values: &[f64]) -> Result<Self> {
        Self::new(order, values.iter().map(|&x| c(x)).collect())
    }

    pub fn from_cvec(order: OperatorOrder, v: &CVec) -> Result<Self> {
        Self::new(order, v.iter().copied().collect())
    }

    pub fn points(&self) -> usize {
        self.values.len() / self.order.block()
    }

    pub fn point(&self, p: usize) -> &[C64] {
        let b = self.order.block();
        &self.values[p * b..(p + 1) * b]
    }

    /// The `k`-th derivative at every point, in canonical point order.
    pub fn derivative(&self, k: usize) -> CVec {
        let b = self.order.block();
        CVec::from_iterator(self.points(), (0..self.points()).map(|p| self.values[p * b + k]))
    }

    pub fn as_cvec(&self) -> CVec {
        CVec::from_column_slice(&self.values)
    }

    pub fn check(&self, graph: &MetricGraph, order: OperatorOrder) -> Result<()> {
        let expected = graph.trace_len(order);
        if self.order != order || self.values.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: self.values.len() });
        }
        Ok(())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, z| a.max(z.norm()))
    }
}

/// Samples of a function on a uniform grid over every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub graph: MetricGraph,
    pub h: f64,
    /// Truncation length of the half-lines.
    pub truncation: f64,
    pub loop_samples: Vec<C64>,
    pub halfline_samples: Vec<Vec<C64>>,
    /// Exact first to third derivatives per edge, when known.
    pub analytic: Option<Vec<[Vec<C64>; 3]>>,
}

/// Minimum samples per edge for the one-sided trace stencils.
pub const MIN_STENCIL_POINTS: usize = 7;

impl GridFunction {
    /// Zero function; `h` is snapped so the bounded edge holds a whole number of cells.
    pub fn zeros(graph: &MetricGraph, h: f64, truncation: f64) -> Result<Self> {
        if !(h > 0.0) || !(truncation > 0.0) {
            return Err(Error::InvalidGraph("grid spacing and truncation must be positive"));
        }
        let (a, b) = graph.bounded_edge();
        let cells = crate::linalg::round((b - a) / h).max(1.0) as usize;
        let h = (b - a) / cells as f64;
        let line_cells = crate::linalg::round(truncation / h).max(1.0) as usize;
        Ok(Self {
            graph: graph.clone(),
            h,
            truncation: line_cells as f64 * h,
            loop_samples: vec![c(0.0); cells + 1],
            halfline_samples: vec![vec![c(0.0); line_cells + 1]; graph.n()],
            analytic: None,
        })
    }

    pub fn from_fn(
        graph: &MetricGraph,
        h: f64,
        truncation: f64,
        f: impl Fn(usize, f64) -> C64,
    ) -> Result<Self> {
        let mut g = Self::zeros(graph, h, truncation)?;
        for e in 0..g.graph.edges() {
            let xs = g.coordinates(e);
            for (v, x) in g.edge_mut(e).iter_mut().zip(xs) {
                *v = f(e, x);
            }
        }
        Ok(g)
    }

    pub fn edge(&self, e: usize) -> &[C64] {
        if e == 0 {
            &self.loop_samples
        } else {
            &self.halfline_samples[e - 1]
        }
    }

    pub fn edge_mut(&mut self, e: usize) -> &mut [C64] {
        if e == 0 {
            &mut self.loop_samples
        } else {
            &mut self.halfline_samples[e - 1]
        }
    }

    pub fn coordinates(&self, e: usize) -> Vec<f64> {
        let start = if e == 0 { self.graph.bounded_edge().0 } else { self.graph.vertex() };
        (0..self.edge(e).len()).map(|i| start + i as f64 * self.h).collect()
    }

    /// `a*self + b*other` on identical grids.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        if self.loop_samples.len() != other.loop_samples.len()
            || self.halfline_samples.iter().map(Vec::len).ne(other.halfline_samples.iter().map(Vec::len))
        {
            return Err(Error::ShapeMismatch {
                expected: self.loop_samples.len(),
                got: other.loop_samples.len(),
            });
        }
        let mut out = self.clone();
        out.analytic = None;
        for e in 0..out.graph.edges() {
            for (i, v) in out.edge_mut(e).iter_mut().enumerate() {
                *v = a * self.edge(e)[i] + b * other.edge(e)[i];
            }
        }
        Ok(out)
    }
}


const D1: [f64; 5] = [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0];
const D2: [f64; 6] = [15.0 / 4.0, -77.0 / 6.0, 107.0 / 6.0, -13.0, 61.0 / 12.0, -5.0 / 6.0];

/// Boundary traces by 4th-order one-sided differences.
pub fn trace_of(f: &GridFunction, order: OperatorOrder) -> Result<TraceVector> {
    for e in 0..f.graph.edges() {
        let n = f.edge(e).len();
        if n < MIN_STENCIL_POINTS {
            return Err(Error::InsufficientStencil { points: n });
        }
    }
    let h = f.h;
    let mut values = Vec::with_capacity(f.graph.trace_len(order));
    for p in 0..f.graph.points() {
        let (e, at_end, sigma) = f.graph.point_location(p);
        let s = f.edge(e);
        let pick = |k: usize| if at_end { s[s.len() - 1 - k] } else { s[k] };
        let d1: C64 = D1.iter().enumerate().map(|(k, &w)| pick(k) * w).sum::<C64>() * (sigma / h);
        values.push(pick(0));
        values.push(d1);
        if order == OperatorOrder::Airy3 {
            let d2: C64 = D2.iter().enumerate().map(|(k, &w)| pick(k) * w).sum::<C64>() / (h * h);
            values.push(d2);
        }
    }
    TraceVector::new(order, values)
}

/// Truncated Taylor jet `(f, f', f''/2, f'''/6)` for the cutoff construction.
#[derive(Clone, Copy, Debug)]
struct Jet([f64; 4]);

impl Jet {
    fn var(x: f64) -> Self {
        Jet([x, 1.0, 0.0, 0.0])
    }

    fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|v| v * s))
    }

    fn add(self, o: Self) -> Self {
        Jet(core::array::from_fn(|k| self.0[k] + o.0[k]))
    }

    fn div(self, o: Self) -> Self {
        let mut q = [0.0; 4];
        for k in 0..4 {
            let acc: f64 = (0..k).map(|j| q[j] * o.0[k - j]).sum();
            q[k] = (self.0[k] - acc) / o.0[0];
        }
        Jet(q)
    }

    fn exp(self) -> Self {
        let mut e = [0.0; 4];
        e[0] = exp(self.0[0]);
        for k in 1..4 {
            e[k] = (1..=k).map(|j| j as f64 * self.0[j] * e[k - j]).sum::<f64>() / k as f64;
        }
        Jet(e)
    }
}

/// `exp(-1/u)` for `u > 0`, zero otherwise.
fn flat(u: Jet) -> Jet {
    if u.0[0] <= 0.0 {
        Jet([0.0; 4])
    } else {
        Jet([-1.0, 0.0, 0.0, 0.0]).div(u).exp()
    }
}

/// Smooth cutoff in the distance `t`: 1 on `[0, inner]`, 0 beyond `outer`.
fn cutoff(t: f64, inner: f64, outer: f64) -> Jet {
    if t <= inner {
        return Jet([1.0, 0.0, 0.0, 0.0]);
    }
    if t >= outer {
        return Jet([0.0; 4]);
    }
    let u = Jet::var(t).scale(-1.0).add(Jet([outer, 0.0, 0.0, 0.0])).scale(1.0 / (outer - inner));
    let a = flat(u);
    let b = flat(Jet([1.0, 0.0, 0.0, 0.0]).add(u.scale(-1.0)));
    a.div(a.add(b))
}

/// Plateau radius of the synthesized cutoff, as a fraction of `L`.
pub const CUTOFF_INNER: f64 = 1.0 / 16.0;
/// Support radius of the synthesized cutoff, as a fraction of `L`.
pub const CUTOFF_OUTER: f64 = 0.5;

/// A smooth function with prescribed traces, supported near the boundary points.
///
/// Near each point it is the quadratic matching the target; a plateau cutoff
/// takes it to zero within `L/2`. Exact derivatives are stored alongside.
pub fn synthesize_with_trace(
    graph: &MetricGraph,
    target: &TraceVector,
    h: f64,
    truncation: f64,
) -> Result<GridFunction> {
    target.check(graph, target.order)?;
    let mut g = GridFunction::zeros(graph, h, truncation)?;
    let inner = CUTOFF_INNER * graph.length;
    let outer = CUTOFF_OUTER * graph.length;
    let mut analytic: Vec<[Vec<C64>; 3]> = (0..graph.edges())
        .map(|e| {
            let n = g.edge(e).len();
            [vec![c(0.0); n], vec![c(0.0); n], vec![c(0.0); n]]
        })
        .collect();
    for p in 0..graph.points() {
        let (e, at_end, sigma) = graph.point_location(p);
        let blk = target.point(p);
        let v0 = blk[0];
        let v1 = blk[1] * sigma;
        let v2 = if blk.len() > 2 { blk[2] } else { c(0.0) };
        let poly = [v0, v1, v2 * 0.5, c(0.0)];
        let xs = g.coordinates(e);
        let anchor = if at_end { xs[xs.len() - 1] } else { xs[0] };
        for (i, &x) in xs.iter().enumerate() {
            let t = (x - anchor).abs();
            if t >= outer {
                continue;
            }
            let chi = cutoff(t, inner, outer);
            let pt = [
                poly[0] + poly[1] * t + poly[2] * t * t,
                poly[1] + poly[2] * (2.0 * t),
                poly[2],
                c(0.0),
            ];
            let jet: [C64; 4] =
                core::array::from_fn(|k| (0..=k).map(|j| pt[j] * chi.0[k - j]).sum());
            g.edge_mut(e)[i] += jet[0];
            let mut sign = 1.0;
            let mut fact = 1.0;
            for k in 1..4 {
                sign *= sigma;
                fact *= k as f64;
                analytic[e][k - 1][i] += jet[k] * (sign * fact);
            }
        }
    }
    g.analytic = Some(analytic);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tadpole() -> MetricGraph {
        MetricGraph::tadpole(1.0, (1.0, 1.0), (1.0, 0.0)).unwrap()
    }

    #[test]
    fn tadpole_forces_one_half_line() {
        assert!(MetricGraph::new(Topology::Tadpole, 1.0, 2, vec![(1.0, 0.0); 3]).is_err());
        assert!(MetricGraph::new(Topology::LoopingEdge, -1.0, 1, vec![(1.0, 0.0); 2]).is_err());
    }

    #[test]
    fn zero_function_has_zero_trace() {
        let g = GridFunction::zeros(&tadpole(), 1.0 / 32.0, 8.0).unwrap();
        let t = trace_of(&g, OperatorOrder::Airy3).unwrap();
        assert_eq!(t.values.len(), 9);
        assert!(t.sup_norm() == 0.0);
    }

    #[test]
    fn linear_loop_traces() {
        let g = GridFunction::from_fn(&tadpole(), 1.0 / 16.0, 1.0, |e, x| c(if e == 0 { x } else { 0.0 }))
            .unwrap();
        let t = trace_of(&g, OperatorOrder::Airy3).unwrap();
        let want = [-1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        for (z, w) in t.values.iter().zip(want) {
            assert!((z - c(w)).norm() < 1e-12);
        }
    }

    #[test]
    fn quadratic_upper_trace() {
        let g = GridFunction::from_fn(&tadpole(), 1.0 / 64.0, 1.0, |e, x| c(if e == 0 { x * x } else { 0.0 }))
            .unwrap();
        let t = trace_of(&g, OperatorOrder::Airy3).unwrap();
        for (z, w) in t.point(1).iter().zip([1.0, 2.0, 2.0]) {
            assert!((z - c(w)).norm() < 1e-8);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let g = GridFunction::zeros(&tadpole(), 1.0 / 16.0, 0.25).unwrap();
        assert!(matches!(trace_of(&g, OperatorOrder::Airy3), Err(Error::InsufficientStencil { .. })));
    }

    #[test]
    fn synthesized_single_point_trace() {
        let graph = tadpole();
        let mut target = TraceVector::zeros(&graph, OperatorOrder::Airy3);
        target.values[0] = c(1.0);
        let f = synthesize_with_trace(&graph, &target, 1.0 / 128.0, 8.0).unwrap();
        assert_eq!(*f.loop_samples.last().unwrap(), c(0.0));
        let back = trace_of(&f, OperatorOrder::Airy3).unwrap();
        let err = back.values.iter().zip(&target.values).fold(0.0f64, |a, (x, y)| a.max((x - y).norm()));
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn cutoff_matches_finite_differences() {
        let (inner, outer) = (0.1, 0.5);
        let t = 0.3;
        let d = 1e-4;
        let f = |x: f64| cutoff(x, inner, outer).0[0];
        let j = cutoff(t, inner, outer);
        let fd1 = (f(t + d) - f(t - d)) / (2.0 * d);
        let fd2 = (f(t + d) - 2.0 * f(t) + f(t - d)) / (d * d);
        assert!((j.0[1] - fd1).abs() < 1e-6);
        assert!((2.0 * j.0[2] - fd2).abs() < 1e-4);
    }
}
