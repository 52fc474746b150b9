//! Versioned JSON reports and CSV time series.

use std::io::Write;

use graphext_core::airy::{self, Tolerances};
use graphext_core::evolution::{Certification, EvolutionReport, Refinement, Scenario, Scheme};
use graphext_core::{ClassificationReport, DeficiencyReport, MetricGraph, OperatorOrder, TraceVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::format::{GraphDto, LoadedSpec};
use graphext_core::schrodinger;

pub const SCHEMA: &str = "graphext-report/1";
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
/// Random member-trace pairs used for the sampled form certificate.
pub const SAMPLED_PAIRS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassTolerances {
    pub unitary: f64,
    pub psd: f64,
    pub form: f64,
    pub membership: f64,
}

impl From<&Tolerances> for ClassTolerances {
    fn from(t: &Tolerances) -> Self {
        Self { unitary: t.unitary, psd: t.psd, form: t.form, membership: airy::MEMBERSHIP_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: String,
    /// Krein-unitarity residual of the coupling matrix, when there is one.
    pub residual: Option<f64>,
    pub contraction_max_eigenvalue: Option<f64>,
    pub adjoint_max_eigenvalue: Option<f64>,
    pub adjoint_full_max_eigenvalue: Option<f64>,
    pub form_on_domain: f64,
    pub dissipation_max_eigenvalue: f64,
    pub domain_dim: usize,
    pub maximal_dim: usize,
    pub criterion_agrees: bool,
    /// Largest `|form(U, V)|` over seeded random pairs of domain traces.
    pub sampled_form_max: f64,
    pub tags: Vec<String>,
}

impl Classification {
    pub fn new(r: &ClassificationReport, sampled_form_max: f64) -> Self {
        Self {
            verdict: r.verdict.as_str().into(),
            residual: r.unitary_residual,
            contraction_max_eigenvalue: r.contraction_max_eigenvalue,
            adjoint_max_eigenvalue: r.adjoint_max_eigenvalue,
            adjoint_full_max_eigenvalue: r.adjoint_full_max_eigenvalue,
            form_on_domain: r.form_on_domain,
            dissipation_max_eigenvalue: r.dissipation_max_eigenvalue,
            domain_dim: r.domain_dim,
            maximal_dim: r.maximal_dim,
            criterion_agrees: r.criterion_agrees,
            sampled_form_max,
            tags: r.tags.iter().map(|t| t.to_string()).collect(),
        }
    }
}

/// Random member traces of the spec's domain.
pub fn sample_members(spec: &LoadedSpec, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<TraceVector>> {
    let (conditions, order) = match spec {
        LoadedSpec::Airy(s) => (s.conditions()?, OperatorOrder::Airy3),
        LoadedSpec::Schrodinger(s) => (s.conditions()?, OperatorOrder::Schrodinger2),
    };
    let basis = conditions.domain_basis();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let coeffs = graphext_core::CVec::from_fn(basis.ncols(), |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        out.push(TraceVector::from_cvec(order, &(&basis * coeffs))?);
    }
    Ok(out)
}

pub fn boundary_form(spec: &LoadedSpec, u: &TraceVector, v: &TraceVector) -> Result<C64> {
    Ok(match spec {
        LoadedSpec::Airy(s) => airy::boundary_form(u, v, s.graph())?,
        LoadedSpec::Schrodinger(s) => schrodinger::boundary_form(u, v, s.graph())?,
    })
}

/// Largest `|form(U, V)|` over `pairs` seeded random member pairs.
pub fn sampled_form_max(spec: &LoadedSpec, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = sample_members(spec, 2 * pairs, &mut rng)?;
    let mut worst = 0.0f64;
    for pair in members.chunks(2) {
        worst = worst.max(boundary_form(spec, &pair[0], &pair[1])?.norm());
    }
    Ok(worst)
}

pub fn classify(spec: &LoadedSpec, tol: &Tolerances, seed: u64) -> Result<Classification> {
    let r = spec.model().classify(tol)?;
    Ok(Classification::new(&r, sampled_form_max(spec, SAMPLED_PAIRS, seed)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub schema: String,
    pub command: String,
    pub operator: String,
    pub graph: GraphDto,
    pub frame: String,
    pub generator_sign: Option<String>,
    pub tolerances: ClassTolerances,
    pub seed: u64,
    #[serde(flatten)]
    pub classification: Classification,
}

pub fn frame_name(spec: &LoadedSpec) -> String {
    match spec {
        LoadedSpec::Airy(s) => s.frame().kind.as_str().into(),
        LoadedSpec::Schrodinger(s) => match s.coupling {
            schrodinger::SchrodingerCoupling::Matrix { .. } => "matrix".into(),
            schrodinger::SchrodingerCoupling::Subspace { .. } => "subspace".into(),
            schrodinger::SchrodingerCoupling::Conditions { .. } => "conditions".into(),
        },
    }
}

fn sign_name(spec: &LoadedSpec) -> Option<String> {
    match spec {
        LoadedSpec::Airy(s) => Some(s.generator_sign.as_str().into()),
        LoadedSpec::Schrodinger(_) => None,
    }
}

pub fn classify_report(spec: &LoadedSpec, tol: &Tolerances, seed: u64) -> Result<ClassifyReport> {
    Ok(ClassifyReport {
        schema: SCHEMA.into(),
        command: "classify".into(),
        operator: spec.operator().into(),
        graph: GraphDto::from_graph(spec.graph()),
        frame: frame_name(spec),
        generator_sign: sign_name(spec),
        tolerances: tol.into(),
        seed,
        classification: classify(spec, tol, seed)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDeficiencyDto {
    pub edge: usize,
    pub d_minus: usize,
    pub d_plus: usize,
    pub roots_minus: Vec<[f64; 2]>,
    pub roots_plus: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyReportDto {
    pub schema: String,
    pub command: String,
    pub operator: String,
    pub graph: GraphDto,
    pub d_minus: usize,
    pub d_plus: usize,
    pub edges: Vec<EdgeDeficiencyDto>,
}

fn pairs(z: &[C64]) -> Vec<[f64; 2]> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

pub fn deficiency_report(operator: &str, graph: &MetricGraph, d: &DeficiencyReport) -> DeficiencyReportDto {
    DeficiencyReportDto {
        schema: SCHEMA.into(),
        command: "deficiency".into(),
        operator: operator.into(),
        graph: GraphDto::from_graph(graph),
        d_minus: d.d_minus,
        d_plus: d.d_plus,
        edges: d
            .edges
            .iter()
            .map(|e| EdgeDeficiencyDto {
                edge: e.edge,
                d_minus: e.d_minus,
                d_plus: e.d_plus,
                roots_minus: pairs(&e.roots_minus),
                roots_plus: pairs(&e.roots_plus),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogueRow {
    pub name: String,
    pub operator: String,
    pub frame: String,
    pub expected: String,
    pub pass: bool,
    #[serde(flatten)]
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogueReport {
    pub schema: String,
    pub command: String,
    pub tolerances: ClassTolerances,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub entries: Vec<CatalogueRow>,
}

pub fn catalogue_report(tol: &Tolerances, seed: u64) -> Result<CatalogueReport> {
    let mut rows = Vec::new();
    for e in crate::catalogue::entries()? {
        let classification = classify(&e.spec, tol, seed)?;
        rows.push(CatalogueRow {
            name: e.name,
            operator: e.spec.operator().into(),
            frame: frame_name(&e.spec),
            expected: e.expected.as_str().into(),
            pass: classification.verdict == e.expected.as_str(),
            classification,
        });
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(CatalogueReport {
        schema: SCHEMA.into(),
        command: "catalogue".into(),
        tolerances: tol.into(),
        seed,
        passed,
        failed: rows.len() - passed,
        entries: rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOut {
    pub initial: String,
    pub center: f64,
    pub width: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub h: f64,
    #[serde(rename = "R")]
    pub truncation: f64,
    pub steps: Option<usize>,
    pub c_stab: f64,
    pub scheme: String,
}

impl From<&Scenario> for ScenarioOut {
    fn from(s: &Scenario) -> Self {
        Self {
            initial: "gaussian".into(),
            center: s.center,
            width: s.width,
            t_final: s.t_final,
            h: s.h,
            truncation: s.truncation,
            steps: s.steps,
            c_stab: s.c_stab,
            scheme: match s.scheme {
                Scheme::CrankNicolson => "cn",
                Scheme::ImplicitMidpoint => "midpoint",
            }
            .into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSummary {
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub nodes: usize,
    pub bandwidths: [usize; 2],
    pub norm_initial: f64,
    pub norm_final: f64,
    pub norm_drift: f64,
    pub max_step_growth: f64,
    pub max_boundary_residual: f64,
    pub max_tail_mass: f64,
    pub energy_defect: f64,
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

impl From<&EvolutionReport> for EvolutionSummary {
    fn from(r: &EvolutionReport) -> Self {
        Self {
            h: r.h,
            dt: r.dt,
            steps: r.times.len().saturating_sub(1),
            nodes: r.nodes,
            bandwidths: [r.bandwidths.0, r.bandwidths.1],
            norm_initial: r.norms.first().copied().unwrap_or(0.0),
            norm_final: r.norms.last().copied().unwrap_or(0.0),
            norm_drift: r.norm_drift,
            max_step_growth: r.max_step_growth,
            max_boundary_residual: max_of(&r.boundary_residuals),
            max_tail_mass: max_of(&r.tail_masses),
            energy_defect: r.energy_defect,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyTolerancesOut {
    pub drift: f64,
    pub growth: f64,
    pub refinement_ratio: f64,
    pub roundoff_floor: f64,
    pub horizon: f64,
}

impl From<&graphext_core::evolution::CertifyTolerances> for CertifyTolerancesOut {
    fn from(t: &graphext_core::evolution::CertifyTolerances) -> Self {
        Self {
            drift: t.unitary,
            growth: t.contraction,
            refinement_ratio: t.refinement_ratio,
            roundoff_floor: t.roundoff_floor,
            horizon: t.horizon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementOut {
    pub drift_h: f64,
    pub drift_half: f64,
    pub ratio: f64,
    pub at_roundoff: bool,
    pub passed: bool,
}

impl From<&Refinement> for RefinementOut {
    fn from(r: &Refinement) -> Self {
        Self { drift_h: r.drift_h, drift_half: r.drift_half, ratio: r.ratio, at_roundoff: r.at_roundoff, passed: r.passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub schema: String,
    pub command: String,
    pub operator: String,
    pub graph: GraphDto,
    pub frame: String,
    pub generator_sign: Option<String>,
    pub scenario: ScenarioOut,
    pub evolution: EvolutionSummary,
}

pub fn simulate_report(spec: &LoadedSpec, scenario: &Scenario, r: &EvolutionReport) -> SimulateReport {
    SimulateReport {
        schema: SCHEMA.into(),
        command: "simulate".into(),
        operator: spec.operator().into(),
        graph: GraphDto::from_graph(spec.graph()),
        frame: frame_name(spec),
        generator_sign: sign_name(spec),
        scenario: scenario.into(),
        evolution: r.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub schema: String,
    pub command: String,
    pub operator: String,
    pub graph: GraphDto,
    pub frame: String,
    pub generator_sign: Option<String>,
    pub scenario: ScenarioOut,
    pub tolerances: CertifyTolerancesOut,
    pub classification_tolerances: ClassTolerances,
    pub verdict: String,
    pub evolution: EvolutionSummary,
    pub refinement: Option<RefinementOut>,
    pub verdict_consistency: bool,
}

pub fn certify_report(
    spec: &LoadedSpec,
    scenario: &Scenario,
    tol: &graphext_core::evolution::CertifyTolerances,
    class_tol: &Tolerances,
    c: &Certification,
) -> CertifyReport {
    CertifyReport {
        schema: SCHEMA.into(),
        command: "certify".into(),
        operator: spec.operator().into(),
        graph: GraphDto::from_graph(spec.graph()),
        frame: frame_name(spec),
        generator_sign: sign_name(spec),
        scenario: scenario.into(),
        tolerances: tol.into(),
        classification_tolerances: class_tol.into(),
        verdict: c.classification.verdict.as_str().into(),
        evolution: (&c.report).into(),
        refinement: c.refinement.as_ref().map(Into::into),
        verdict_consistency: c.verdict_consistency,
    }
}

/// Time series with columns `t, norm, boundary_residual, tail_mass`.
pub fn write_series<W: Write>(r: &EvolutionReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "norm", "boundary_residual", "tail_mass"])?;
    for i in 0..r.times.len() {
        w.serialize((r.times[i], r.norms[i], r.boundary_residuals[i], r.tail_masses[i]))?;
    }
    w.flush().map_err(|e| crate::error::CliError::Io { path: "csv".into(), source: e })?;
    Ok(())
}
