//! Constrained time integration on truncated graphs.
//!
//! Each edge carries a summation-by-parts first derivative `D` with diagonal
//! norm `H`. Boundary conditions act on the discrete traces `(u, Du, D^2 u)`
//! and are imposed by the `H`-orthogonal projector `P` onto their kernel; the
//! flow `u_t = P A P u` is integrated with the Cayley (implicit midpoint /
//! Crank-Nicolson) step.

pub mod banded;
pub mod sbp;
pub mod sparse;

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::airy::{self, AirySpec, GeneratorSign, Tolerances};
use crate::boundary::BoundaryConditions;
use crate::graph::{MetricGraph, OperatorOrder};
use crate::linalg::{c, exp, range_basis, sqrt};
use crate::report::{ClassificationReport, Verdict};
use crate::schrodinger::{self, SchrodingerSpec};
use crate::{CMat, Error, Result, C64};

use banded::BandedLu;
use sparse::{Builder, SparseMatrix};

/// A classified operator together with its boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Airy(AirySpec),
    Schrodinger(SchrodingerSpec),
}

impl Model {
    pub fn graph(&self) -> &MetricGraph {
        match self {
            Model::Airy(s) => s.graph(),
            Model::Schrodinger(s) => s.graph(),
        }
    }

    pub fn order(&self) -> OperatorOrder {
        match self {
            Model::Airy(_) => OperatorOrder::Airy3,
            Model::Schrodinger(_) => OperatorOrder::Schrodinger2,
        }
    }

    pub fn conditions(&self) -> Result<BoundaryConditions> {
        match self {
            Model::Airy(s) => s.conditions(),
            Model::Schrodinger(s) => s.conditions(),
        }
    }

    pub fn classify(&self, tol: &Tolerances) -> Result<ClassificationReport> {
        match self {
            Model::Airy(s) => airy::classify(s, tol),
            Model::Schrodinger(s) => schrodinger::classify(s, tol),
        }
    }

    pub fn generator_sign(&self) -> Option<GeneratorSign> {
        match self {
            Model::Airy(s) => Some(s.generator_sign),
            Model::Schrodinger(_) => None,
        }
    }

    pub fn default_scheme(&self) -> Scheme {
        match self {
            Model::Airy(_) => Scheme::ImplicitMidpoint,
            Model::Schrodinger(_) => Scheme::CrankNicolson,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    CrankNicolson,
    ImplicitMidpoint,
}

/// Node ranges per edge; edge 0 is the bounded edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub h: f64,
    pub offsets: Vec<usize>,
    pub counts: Vec<usize>,
    pub total: usize,
}

impl Layout {
    pub fn new(graph: &MetricGraph, h: f64, truncation: f64) -> Result<Self> {
        let (a, b) = graph.bounded_edge();
        if !(h > 0.0) || h > graph.length / 64.0 + 1e-15 {
            return Err(Error::InvalidParameter("grid spacing must satisfy 0 < h <= L/64"));
        }
        let cells = crate::linalg::round((b - a) / h) as usize;
        let h = (b - a) / cells as f64;
        let m = crate::linalg::round(truncation / h) as usize + 1;
        if m < sbp::MIN_NODES {
            return Err(Error::InsufficientStencil { points: m });
        }
        let mut counts = vec![cells + 1];
        counts.extend(core::iter::repeat(m).take(graph.n()));
        let mut offsets = Vec::with_capacity(counts.len());
        let mut total = 0;
        for &n in &counts {
            offsets.push(total);
            total += n;
        }
        Ok(Self { h, offsets, counts, total })
    }

    fn node(&self, edge: usize, k: usize) -> usize {
        self.offsets[edge] + k
    }

    /// Ordering that keeps couplings near the edge ends close together.
    fn band_order(&self) -> Vec<usize> {
        let mut keys: Vec<(usize, usize, usize)> = Vec::with_capacity(self.total);
        for (e, &n) in self.counts.iter().enumerate() {
            for k in 0..n {
                let dist = if e == 0 { k.min(n - 1 - k) } else { k };
                keys.push((dist, e, k));
            }
        }
        keys.sort_unstable();
        keys.into_iter().map(|(_, e, k)| self.node(e, k)).collect()
    }
}

/// `H`-orthogonal projector `I - W`, `W` supported on a few boundary nodes.
#[derive(Debug, Clone, PartialEq)]
struct Projector {
    support: Vec<usize>,
    w: CMat,
}

impl Projector {
    fn apply(&self, u: &mut [C64]) {
        let x: Vec<C64> = self.support.iter().map(|&i| u[i]).collect();
        for (a, &i) in self.support.iter().enumerate() {
            let wx: C64 = (0..x.len()).map(|b| self.w[(a, b)] * x[b]).sum();
            u[i] -= wx;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteGenerator {
    pub graph: MetricGraph,
    pub order: OperatorOrder,
    pub layout: Layout,
    pub truncation: f64,
    /// Diagonal of the norm matrix `H`.
    pub weights: Vec<f64>,
    /// Discrete boundary constraints `G u = 0`, rows of unit length.
    pub constraints: SparseMatrix,
    /// `K` in `u_t = K u`.
    pub operator: SparseMatrix,
    pub generator_sign: Option<GeneratorSign>,
    projector: Projector,
}

fn sparse_row(m: &SparseMatrix, i: usize, offset: usize) -> Vec<(usize, C64)> {
    m.rows[i].iter().map(|&(j, v)| (j + offset, v)).collect()
}

pub fn assemble(model: &Model, h: f64, truncation: f64) -> Result<DiscreteGenerator> {
    let graph = model.graph().clone();
    let order = model.order();
    let layout = Layout::new(&graph, h, truncation)?;
    let h = layout.h;
    let n = layout.total;
    let derivs = order.block();

    let mut weights = vec![0.0; n];
    let mut a = Builder::new(n, n);
    let mut powers: Vec<[SparseMatrix; 3]> = Vec::with_capacity(graph.edges());
    for e in 0..graph.edges() {
        let m = layout.counts[e];
        let off = layout.offsets[e];
        let d = sbp::d1(m, h);
        let d2 = d.mul(&d);
        let op = match model {
            Model::Airy(spec) => {
                let s = spec.generator_sign.factor();
                let d3 = d2.mul(&d);
                let mut b = Builder::new(m, m);
                b.add_matrix(&d3, c(s * graph.alpha(e)));
                b.add_matrix(&d, c(s * graph.beta(e)));
                b.build()
            }
            Model::Schrodinger(_) => d2.scale(c(-1.0)),
        };
        for (i, row) in op.rows.iter().enumerate() {
            for &(j, v) in row {
                a.add(off + i, off + j, v);
            }
        }
        for (i, w) in sbp::norm_weights(m, h).into_iter().enumerate() {
            weights[off + i] = w;
        }
        powers.push([SparseMatrix::identity(m), d, d2]);
    }
    let a = a.build();

    // Discrete trace rows in canonical order.
    let mut trace_rows: Vec<Vec<(usize, C64)>> = Vec::with_capacity(graph.trace_len(order));
    for p in 0..graph.points() {
        let (e, at_end, _) = graph.point_location(p);
        let k = if at_end { layout.counts[e] - 1 } else { 0 };
        for pw in powers[e].iter().take(derivs) {
            trace_rows.push(sparse_row(pw, k, layout.offsets[e]));
        }
    }
    let conditions = model.conditions()?;
    let mut g_rows: Vec<Vec<(usize, C64)>> = Vec::new();
    if conditions.matrix.nrows() > 0 && conditions.rank() > 0 {
        let q = range_basis(&conditions.matrix.adjoint());
        for r in 0..q.ncols() {
            let mut acc = alloc::collections::BTreeMap::<usize, C64>::new();
            for (t, row) in trace_rows.iter().enumerate() {
                let coef = q[(t, r)].conj();
                if coef == c(0.0) {
                    continue;
                }
                for &(j, v) in row {
                    *acc.entry(j).or_insert(c(0.0)) += coef * v;
                }
            }
            g_rows.push(acc.into_iter().collect());
        }
    }
    let far_rows = match model {
        Model::Airy(_) => derivs,
        Model::Schrodinger(_) => 1,
    };
    for e in 1..graph.edges() {
        let k = layout.counts[e] - 1;
        for pw in powers[e].iter().take(far_rows) {
            g_rows.push(sparse_row(pw, k, layout.offsets[e]));
        }
    }
    for row in g_rows.iter_mut() {
        let len = sqrt(row.iter().map(|(_, v)| v.norm_sqr()).sum());
        if len == 0.0 {
            return Err(Error::InconsistentDiscretization);
        }
        row.retain(|(_, v)| v.norm() > 1e-14 * len);
        for (_, v) in row.iter_mut() {
            *v /= len;
        }
    }
    let constraints = SparseMatrix { nrows: g_rows.len(), ncols: n, rows: g_rows };
    let projector = build_projector(&constraints, &weights)?;

    let mut operator = project_operator(&a, &projector);
    if let Model::Schrodinger(_) = model {
        operator = operator.scale(C64::new(0.0, -1.0));
    }
    Ok(DiscreteGenerator {
        graph,
        order,
        layout,
        truncation,
        weights,
        constraints,
        operator,
        generator_sign: model.generator_sign(),
        projector,
    })
}

fn build_projector(g: &SparseMatrix, weights: &[f64]) -> Result<Projector> {
    let support: Vec<usize> = g.rows.iter().flatten().map(|&(j, _)| j).collect::<BTreeSet<_>>().into_iter().collect();
    let index = |j: usize| support.binary_search(&j).expect("column in support");
    let mut w = CMat::zeros(support.len(), support.len());
    for rows in row_groups(g) {
        let cols: Vec<usize> = rows.iter().flat_map(|&i| g.rows[i].iter().map(|&(j, _)| index(j))).collect::<BTreeSet<_>>().into_iter().collect();
        let local = |k: usize| cols.binary_search(&k).expect("column in group");
        // W = H^-1 G* (G H^-1 G*)^-1 G = H^-1/2 Q Q* H^1/2, Q an orthonormal basis of H^-1/2 G*.
        let root: Vec<f64> = cols.iter().map(|&k| sqrt(weights[support[k]])).collect();
        let mut m = CMat::zeros(cols.len(), rows.len());
        for (r, &i) in rows.iter().enumerate() {
            for &(j, v) in &g.rows[i] {
                let a = local(index(j));
                m[(a, r)] = v.conj() / root[a];
            }
            let len = m.column(r).norm();
            m.column_mut(r).scale_mut(1.0 / len);
        }
        let q = range_basis(&m);
        if q.ncols() != rows.len() {
            return Err(Error::InconsistentDiscretization);
        }
        let block = &q * q.adjoint();
        for (a, &ka) in cols.iter().enumerate() {
            for (b, &kb) in cols.iter().enumerate() {
                w[(ka, kb)] = block[(a, b)] * (root[b] / root[a]);
            }
        }
    }
    Ok(Projector { support, w })
}

/// Rows of `g` grouped into classes that share columns.
fn row_groups(g: &SparseMatrix) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..g.nrows).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut owner = alloc::collections::BTreeMap::<usize, usize>::new();
    for (i, row) in g.rows.iter().enumerate() {
        for &(j, _) in row {
            match owner.get(&j) {
                Some(&k) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, k));
                    parent[a] = b;
                }
                None => {
                    owner.insert(j, i);
                }
            }
        }
    }
    let mut groups = alloc::collections::BTreeMap::<usize, Vec<usize>>::new();
    for i in 0..g.nrows {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// `(I - W) A (I - W)` with `W` dense on the support.
fn project_operator(a: &SparseMatrix, p: &Projector) -> SparseMatrix {
    let n = a.nrows;
    let sup = &p.support;
    let nb = sup.len();
    let mut out = Builder::new(n, n);
    out.add_matrix(a, c(1.0));
    if nb == 0 {
        return out.build();
    }
    let mut in_support = vec![usize::MAX; n];
    for (k, &j) in sup.iter().enumerate() {
        in_support[j] = k;
    }
    // A W: rows touching the support.
    let mut a_b: Vec<(usize, Vec<C64>)> = Vec::new();
    for (i, row) in a.rows.iter().enumerate() {
        let mut v = vec![c(0.0); nb];
        let mut any = false;
        for &(j, x) in row {
            if in_support[j] != usize::MAX {
                v[in_support[j]] = x;
                any = true;
            }
        }
        if any {
            a_b.push((i, v));
        }
    }
    let mut aw_support = CMat::zeros(nb, nb);
    for (i, v) in &a_b {
        let aw: Vec<C64> = (0..nb).map(|b| (0..nb).map(|k| v[k] * p.w[(k, b)]).sum()).collect();
        for (b, &x) in aw.iter().enumerate() {
            out.add(*i, sup[b], -x);
        }
        if in_support[*i] != usize::MAX {
            for b in 0..nb {
                aw_support[(in_support[*i], b)] = aw[b];
            }
        }
    }
    // W A: support rows.
    for k in 0..nb {
        let mut acc = alloc::collections::BTreeMap::<usize, C64>::new();
        for (b, &j) in sup.iter().enumerate() {
            let wkb = p.w[(k, b)];
            if wkb == c(0.0) {
                continue;
            }
            for &(col, x) in &a.rows[j] {
                *acc.entry(col).or_insert(c(0.0)) += wkb * x;
            }
        }
        for (col, x) in acc {
            out.add(sup[k], col, -x);
        }
    }
    // W A W.
    let waw = &p.w * aw_support;
    for r in 0..nb {
        for b in 0..nb {
            out.add(sup[r], sup[b], waw[(r, b)]);
        }
    }
    out.build()
}

impl DiscreteGenerator {
    pub fn nodes(&self) -> usize {
        self.layout.total
    }

    pub fn norm(&self, u: &[C64]) -> f64 {
        sqrt(u.iter().zip(&self.weights).map(|(z, w)| w * z.norm_sqr()).sum())
    }

    pub fn project(&self, u: &mut [C64]) {
        self.projector.apply(u);
    }

    /// Largest `|G u|`.
    pub fn boundary_residual(&self, u: &[C64]) -> f64 {
        self.constraints.mul_vec(u).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Mass in the outer tenth of every half-line, relative to `reference^2`.
    pub fn tail_mass(&self, u: &[C64], reference: f64) -> f64 {
        let mut mass = 0.0;
        for e in 1..self.graph.edges() {
            let (off, m) = (self.layout.offsets[e], self.layout.counts[e]);
            let start = m - m / 10;
            for k in start..m {
                mass += self.weights[off + k] * u[off + k].norm_sqr();
            }
        }
        mass / (reference * reference).max(f64::MIN_POSITIVE)
    }

    /// Coordinates of the bounded-edge nodes.
    pub fn bounded_coordinates(&self) -> Vec<f64> {
        let (a, _) = self.graph.bounded_edge();
        (0..self.layout.counts[0]).map(|k| a + k as f64 * self.layout.h).collect()
    }

    /// Gaussian on the bounded edge, projected onto the constraints.
    pub fn gaussian(&self, center: f64, width: f64) -> Vec<C64> {
        let mut u = vec![c(0.0); self.nodes()];
        for (k, x) in self.bounded_coordinates().into_iter().enumerate() {
            let s = (x - center) / width;
            u[k] = c(exp(-s * s));
        }
        self.project(&mut u);
        u
    }

    /// `max |HK + (HK)*| / max |HK|`: zero when the flow conserves the norm.
    pub fn energy_defect(&self) -> f64 {
        let k = &self.operator;
        let (mut defect, mut scale) = (0.0f64, 0.0f64);
        for (i, row) in k.rows.iter().enumerate() {
            for &(j, v) in row {
                let hk = v * self.weights[i];
                let ht = k.get(j, i) * self.weights[j];
                defect = defect.max((hk + ht.conj()).norm());
                scale = scale.max(hk.norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }
}

/// Factored Cayley step `(I - dt/2 K) u+ = (I + dt/2 K) u`.
#[derive(Debug, Clone)]
pub struct Integrator {
    pub dt: f64,
    lu: Option<BandedLu>,
    order: Vec<usize>,
    explicit: SparseMatrix,
}

impl Integrator {
    pub fn new(generator: &DiscreteGenerator, dt: f64) -> Result<Self> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter("time step must be finite and nonnegative"));
        }
        let n = generator.nodes();
        let half = c(dt / 2.0);
        let mut plus = Builder::new(n, n);
        plus.add_matrix(&SparseMatrix::identity(n), c(1.0));
        plus.add_matrix(&generator.operator, half);
        if dt == 0.0 {
            return Ok(Self { dt, lu: None, order: Vec::new(), explicit: plus.build() });
        }
        let order = generator.layout.band_order();
        let mut position = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut minus = Builder::new(n, n);
        for i in 0..n {
            minus.add(position[i], position[i], c(1.0));
        }
        for (i, row) in generator.operator.rows.iter().enumerate() {
            for &(j, v) in row {
                minus.add(position[i], position[j], -half * v);
            }
        }
        let lu = BandedLu::factor(&minus.build())?;
        Ok(Self { dt, lu: Some(lu), order, explicit: plus.build() })
    }

    pub fn step(&self, u: &[C64]) -> Vec<C64> {
        let Some(lu) = &self.lu else {
            return u.to_vec();
        };
        let rhs = self.explicit.mul_vec(u);
        let mut permuted: Vec<C64> = self.order.iter().map(|&old| rhs[old]).collect();
        lu.solve_in_place(&mut permuted);
        let mut out = vec![c(0.0); u.len()];
        for (new, &old) in self.order.iter().enumerate() {
            out[old] = permuted[new];
        }
        out
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        self.lu.as_ref().map_or((0, 0), BandedLu::bandwidths)
    }
}

fn check_scheme(generator: &DiscreteGenerator, scheme: Scheme) -> Result<()> {
    match (generator.order, scheme) {
        (OperatorOrder::Airy3, Scheme::ImplicitMidpoint) | (OperatorOrder::Schrodinger2, Scheme::CrankNicolson) => Ok(()),
        _ => Err(Error::InvalidParameter("use implicit midpoint for Airy and Crank-Nicolson for Schrodinger")),
    }
}

/// One step from scratch; prefer [`Integrator`] for repeated steps.
pub fn step(generator: &DiscreteGenerator, state: &[C64], dt: f64, scheme: Scheme) -> Result<Vec<C64>> {
    check_scheme(generator, scheme)?;
    Ok(Integrator::new(generator, dt)?.step(state))
}

/// Initial data and horizon of a certification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub center: f64,
    pub width: f64,
    pub t_final: f64,
    pub h: f64,
    /// Half-line truncation length.
    pub truncation: f64,
    /// Fixed step count; otherwise from `c_stab`.
    pub steps: Option<usize>,
    /// Airy steps use `dt <= c_stab h^2`, Schrödinger `dt <= h`.
    pub c_stab: f64,
    pub scheme: Scheme,
}

impl Scenario {
    /// Gaussian at `-L/2`, width `L/10`, `T = 0.1 L^2`, 1000 steps, `h = L/256`, `R = 20L`.
    pub fn schrodinger_default(length: f64) -> Self {
        Self {
            center: -length / 2.0,
            width: length / 10.0,
            t_final: 0.1 * length * length,
            h: length / 256.0,
            truncation: 20.0 * length,
            steps: Some(1000),
            c_stab: 1.0,
            scheme: Scheme::CrankNicolson,
        }
    }

    /// Gaussian at the middle of the bounded edge, width `L/8`, `T = 0.002`,
    /// `dt = h^2/2`, `h = L/256`, `R = 20L`.
    pub fn airy_default(graph: &MetricGraph) -> Self {
        let (a, b) = graph.bounded_edge();
        let length = graph.length;
        Self {
            center: (a + b) / 2.0,
            width: length / 8.0,
            t_final: 0.002,
            h: length / 256.0,
            truncation: 20.0 * length,
            steps: None,
            c_stab: 0.5,
            scheme: Scheme::ImplicitMidpoint,
        }
    }

    fn step_count(&self, order: OperatorOrder, h: f64) -> usize {
        if let Some(s) = self.steps {
            return s;
        }
        let cap = match order {
            OperatorOrder::Airy3 => self.c_stab * h * h,
            OperatorOrder::Schrodinger2 => self.c_stab * h,
        };
        crate::linalg::ceil(self.t_final / cap).max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionReport {
    pub h: f64,
    pub dt: f64,
    pub nodes: usize,
    pub bandwidths: (usize, usize),
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub boundary_residuals: Vec<f64>,
    pub tail_masses: Vec<f64>,
    /// `max |norm(t)/norm(0) - 1|`.
    pub norm_drift: f64,
    /// `max norm(t+dt)/norm(t) - 1` over steps.
    pub max_step_growth: f64,
    pub energy_defect: f64,
}

pub fn simulate(model: &Model, scenario: &Scenario) -> Result<EvolutionReport> {
    let generator = assemble(model, scenario.h, scenario.truncation)?;
    check_scheme(&generator, scenario.scheme)?;
    let steps = scenario.step_count(generator.order, generator.layout.h);
    let dt = scenario.t_final / steps as f64;
    let integrator = Integrator::new(&generator, dt)?;
    let mut u = generator.gaussian(scenario.center, scenario.width);
    let n0 = generator.norm(&u);
    let mut report = EvolutionReport {
        h: generator.layout.h,
        dt,
        nodes: generator.nodes(),
        bandwidths: integrator.bandwidths(),
        times: Vec::with_capacity(steps + 1),
        norms: Vec::with_capacity(steps + 1),
        boundary_residuals: Vec::with_capacity(steps + 1),
        tail_masses: Vec::with_capacity(steps + 1),
        norm_drift: 0.0,
        max_step_growth: f64::NEG_INFINITY,
        energy_defect: generator.energy_defect(),
    };
    let record = |r: &mut EvolutionReport, t: f64, u: &[C64]| {
        let nu = generator.norm(u);
        if let Some(&prev) = r.norms.last() {
            r.max_step_growth = r.max_step_growth.max(nu / prev - 1.0);
        }
        r.norm_drift = r.norm_drift.max((nu / n0 - 1.0).abs());
        r.times.push(t);
        r.norms.push(nu);
        r.boundary_residuals.push(generator.boundary_residual(u));
        r.tail_masses.push(generator.tail_mass(u, n0));
    };
    record(&mut report, 0.0, &u);
    for s in 1..=steps {
        u = integrator.step(&u);
        record(&mut report, s as f64 * dt, &u);
    }
    if steps == 0 {
        report.max_step_growth = 0.0;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyTolerances {
    pub unitary: f64,
    pub contraction: f64,
    /// Required `drift(h/2) / drift(h)` for Airy conservation.
    pub refinement_ratio: f64,
    /// Drift below this is treated as roundoff and skips the ratio test.
    pub roundoff_floor: f64,
    /// Largest admissible tail mass.
    pub horizon: f64,
}

impl Default for CertifyTolerances {
    fn default() -> Self {
        Self { unitary: 1e-6, contraction: 1e-6, refinement_ratio: 0.35, roundoff_floor: 1e-10, horizon: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub drift_h: f64,
    pub drift_half: f64,
    pub ratio: f64,
    pub at_roundoff: bool,
    pub passed: bool,
}

pub fn refinement(drift_h: f64, drift_half: f64, tol: &CertifyTolerances, max_ratio: f64) -> Refinement {
    let ratio = if drift_h > 0.0 { drift_half / drift_h } else { 0.0 };
    let at_roundoff = drift_h <= tol.roundoff_floor;
    Refinement { drift_h, drift_half, ratio, at_roundoff, passed: at_roundoff || ratio <= max_ratio }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub classification: ClassificationReport,
    pub report: EvolutionReport,
    pub refinement: Option<Refinement>,
    pub verdict_consistency: bool,
}

fn check_horizon(report: &EvolutionReport, tol: &CertifyTolerances) -> Result<()> {
    let tail = report.tail_masses.iter().copied().fold(0.0, f64::max);
    if tail > tol.horizon {
        return Err(Error::HorizonExceeded { tail_mass: tail });
    }
    Ok(())
}

pub fn certify(model: &Model, scenario: &Scenario, tol: &CertifyTolerances, class_tol: &Tolerances) -> Result<Certification> {
    let classification = model.classify(class_tol)?;
    let report = simulate(model, scenario)?;
    check_horizon(&report, tol)?;
    let mut refinement_result = None;
    let consistent = match classification.verdict {
        Verdict::SelfAdjoint | Verdict::SkewSelfAdjoint => {
            let mut ok = report.norm_drift <= tol.unitary;
            if let Model::Airy(_) = model {
                let finer = Scenario { h: report.h / 2.0, steps: scenario.steps.map(|s| 4 * s), ..*scenario };
                let fine = simulate(model, &finer)?;
                check_horizon(&fine, tol)?;
                let r = refinement(report.norm_drift, fine.norm_drift, tol, tol.refinement_ratio);
                ok &= r.passed;
                refinement_result = Some(r);
            }
            ok
        }
        Verdict::ContractionGenerator => report.max_step_growth <= tol.contraction,
        Verdict::Neither => true,
    };
    Ok(Certification { classification, report, refinement: refinement_result, verdict_consistency: consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::catalogue::{alternating_graph, delta_z};
    use crate::schrodinger::catalogue::{dzn_spec, tadpole_subspace};

    fn coarse(length: f64) -> Scenario {
        Scenario { h: length / 64.0, truncation: 4.0 * length, steps: Some(50), t_final: 0.01, ..Scenario::schrodinger_default(length) }
    }

    #[test]
    fn zero_data_stays_zero() {
        let model = Model::Schrodinger(dzn_spec(1.0, 1, 0.0).unwrap());
        let g = assemble(&model, 1.0 / 64.0, 2.0).unwrap();
        let it = Integrator::new(&g, 1e-3).unwrap();
        let z = vec![c(0.0); g.nodes()];
        assert!(it.step(&z).iter().all(|v| *v == c(0.0)));
    }

    #[test]
    fn zero_step_is_identity() {
        let model = Model::Schrodinger(dzn_spec(1.0, 1, 2.0).unwrap());
        let g = assemble(&model, 1.0 / 64.0, 2.0).unwrap();
        let u = g.gaussian(-0.5, 0.1);
        assert_eq!(step(&g, &u, 0.0, Scheme::CrankNicolson).unwrap(), u);
        assert!(step(&g, &u, 0.0, Scheme::ImplicitMidpoint).is_err());
    }

    #[test]
    fn schrodinger_projected_operator_is_hermitian() {
        for spec in [dzn_spec(1.0, 1, 2.0).unwrap(), tadpole_subspace(1.0, [1.0, 1.0, 0.0]).unwrap()] {
            let g = assemble(&Model::Schrodinger(spec), 1.0 / 64.0, 2.0).unwrap();
            assert!(g.energy_defect() < 1e-12, "{}", g.energy_defect());
        }
    }

    #[test]
    fn crank_nicolson_conserves_norm() {
        let model = Model::Schrodinger(dzn_spec(1.0, 1, 2.0).unwrap());
        let r = simulate(&model, &coarse(1.0)).unwrap();
        assert!(r.norm_drift < 1e-12, "{}", r.norm_drift);
        assert!(r.boundary_residuals.iter().all(|&x| x < 1e-8));
    }

    #[test]
    fn airy_delta_is_conservative_discretely() {
        let g = alternating_graph(1.0, 1, 1.0, 1.0).unwrap();
        let model = Model::Airy(delta_z(&g, 1.0).unwrap());
        let d = assemble(&model, 1.0 / 64.0, 2.0).unwrap();
        assert!(d.energy_defect() < 1e-11, "{}", d.energy_defect());
    }

    #[test]
    fn grid_limits() {
        let model = Model::Schrodinger(dzn_spec(1.0, 1, 0.0).unwrap());
        assert!(matches!(assemble(&model, 0.1, 2.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(assemble(&model, 1.0 / 64.0, 0.05), Err(Error::InsufficientStencil { .. })));
    }

    #[test]
    fn refinement_rule() {
        let tol = CertifyTolerances::default();
        assert!(refinement(1e-13, 5e-13, &tol, 0.35).passed);
        assert!(!refinement(1e-6, 5e-7, &tol, 0.35).passed);
        assert!(refinement(1e-6, 2e-7, &tol, 0.35).passed);
    }
}
