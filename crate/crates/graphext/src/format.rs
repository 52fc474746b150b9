//! JSON input formats: graphs, extension specs and scenarios.

use std::collections::BTreeMap;

use graphext_core::airy::{self, catalogue as ac, AirySpec, FrameKind, GeneratorSign};
use graphext_core::evolution::{Model, Scenario, Scheme};
use graphext_core::schrodinger::{catalogue as sc, SchrodingerSpec};
use graphext_core::{CMat, MetricGraph, Topology, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDto {
    pub topology: String,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N", default)]
    pub half_lines: Option<usize>,
    #[serde(default)]
    pub coefficients: Option<Vec<[f64; 2]>>,
}

impl GraphDto {
    pub fn to_graph(&self) -> Result<MetricGraph> {
        let topology = match self.topology.as_str() {
            "looping_edge" => Topology::LoopingEdge,
            "tadpole" => Topology::Tadpole,
            "t_shaped" => Topology::TShaped,
            other => return Err(CliError::input(format!("unknown topology {other:?}"))),
        };
        let n = match (self.half_lines, &self.coefficients) {
            (Some(n), _) => n,
            (None, Some(c)) if !c.is_empty() => c.len() - 1,
            (None, _) if topology == Topology::Tadpole => 1,
            _ => return Err(CliError::input("graph needs \"N\" or \"coefficients\"")),
        };
        let coefficients = match &self.coefficients {
            Some(c) => c.iter().map(|&[a, b]| (a, b)).collect(),
            None => vec![(1.0, 0.0); n + 1],
        };
        Ok(MetricGraph::new(topology, self.length, n, coefficients)?)
    }

    pub fn from_graph(g: &MetricGraph) -> Self {
        let topology = match g.topology {
            Topology::LoopingEdge => "looping_edge",
            Topology::Tadpole => "tadpole",
            Topology::TShaped => "t_shaped",
        };
        Self {
            topology: topology.into(),
            length: g.length,
            half_lines: Some(g.half_lines),
            coefficients: Some(g.coefficients.iter().map(|&(a, b)| [a, b]).collect()),
        }
    }
}

/// A matrix entry: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

pub fn matrix_from_rows(rows: &[Vec<Entry>]) -> Result<CMat> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::input("matrix rows have different lengths"));
    }
    Ok(CMat::from_fn(rows.len(), ncols, |i, j| rows[i][j].value()))
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDto {
    #[serde(default = "default_operator")]
    pub operator: String,
    #[serde(default)]
    pub graph: Option<GraphDto>,
    #[serde(default)]
    pub frame: Option<String>,
    #[serde(rename = "L", default)]
    pub lmat: Option<Vec<Vec<Entry>>>,
    /// Basis vectors of the subspace, one per entry.
    #[serde(rename = "Y", default)]
    pub y: Option<Vec<Vec<Entry>>>,
    #[serde(default)]
    pub generator_sign: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

fn default_operator() -> String {
    "airy".into()
}

/// A parsed spec, ready for classification or evolution.
#[derive(Debug, Clone)]
pub enum LoadedSpec {
    Airy(AirySpec),
    Schrodinger(SchrodingerSpec),
}

impl LoadedSpec {
    pub fn graph(&self) -> &MetricGraph {
        match self {
            LoadedSpec::Airy(s) => s.graph(),
            LoadedSpec::Schrodinger(s) => s.graph(),
        }
    }

    pub fn model(&self) -> Model {
        match self {
            LoadedSpec::Airy(s) => Model::Airy(s.clone()),
            LoadedSpec::Schrodinger(s) => Model::Schrodinger(s.clone()),
        }
    }

    pub fn operator(&self) -> &'static str {
        match self {
            LoadedSpec::Airy(_) => "airy",
            LoadedSpec::Schrodinger(_) => "schrodinger",
        }
    }
}

struct Params<'a>(&'a BTreeMap<String, serde_json::Value>);

impl Params<'_> {
    fn num(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.0.get(key) {
            Some(v) => v.as_f64().ok_or_else(|| CliError::input(format!("params.{key} must be a number"))),
            None => default.ok_or_else(|| CliError::input(format!("missing params.{key}"))),
        }
    }

    fn array<const K: usize>(&self, key: &str) -> Result<[f64; K]> {
        let v = self.nums(key)?;
        v.try_into().map_err(|_| CliError::input(format!("params.{key} must have {K} numbers")))
    }

    fn nums(&self, key: &str) -> Result<Vec<f64>> {
        let arr = self
            .0
            .get(key)
            .and_then(|v| v.as_array())
            .ok_or_else(|| CliError::input(format!("params.{key} must be an array")))?;
        arr.iter()
            .map(|x| x.as_f64().ok_or_else(|| CliError::input(format!("params.{key} must hold numbers"))))
            .collect()
    }

    fn square(&self, key: &str) -> Result<Vec<Vec<f64>>> {
        let rows = self
            .0
            .get(key)
            .and_then(|v| v.as_array())
            .ok_or_else(|| CliError::input(format!("params.{key} must be a matrix")))?;
        rows.iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| CliError::input(format!("params.{key} rows must be arrays")))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| CliError::input(format!("params.{key} must hold numbers"))))
                    .collect()
            })
            .collect()
    }

    fn family(&self) -> Option<&str> {
        self.0.get("family").and_then(|v| v.as_str())
    }
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(CliError::json)
}

impl SpecDto {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    fn require_graph(&self) -> Result<MetricGraph> {
        self.graph.as_ref().ok_or_else(|| CliError::input("spec needs \"graph\""))?.to_graph()
    }

    pub fn load(&self) -> Result<LoadedSpec> {
        match self.operator.as_str() {
            "airy" => self.load_airy().map(LoadedSpec::Airy),
            "schrodinger" => self.load_schrodinger().map(LoadedSpec::Schrodinger),
            other => Err(CliError::input(format!("unknown operator {other:?}"))),
        }
    }

    fn subspace(&self) -> Result<Option<CMat>> {
        match &self.y {
            None => Ok(None),
            Some(vectors) => Ok(Some(matrix_from_rows(vectors)?.transpose())),
        }
    }

    fn load_airy(&self) -> Result<AirySpec> {
        let p = Params(&self.params);
        let spec = match p.family() {
            Some(family) => self.airy_family(family, &p)?,
            None => {
                let graph = self.require_graph()?;
                let kind = match self.frame.as_deref() {
                    Some("even_paired") => FrameKind::EvenPaired,
                    Some("replicated") => FrameKind::Replicated,
                    Some("derivative_split") => FrameKind::DerivativeSplit,
                    Some(other) => return Err(CliError::input(format!("unknown Airy frame {other:?}"))),
                    None => return Err(CliError::input("spec needs \"frame\" or params.family")),
                };
                let lmat = matrix_from_rows(self.lmat.as_deref().ok_or_else(|| CliError::input("spec needs \"L\""))?)?;
                let frame = airy::build_frame(&graph, kind)?;
                match (kind, self.subspace()?) {
                    (FrameKind::DerivativeSplit, Some(y)) => AirySpec::mixed(frame, y, lmat)?,
                    (FrameKind::DerivativeSplit, None) => {
                        return Err(CliError::input("derivative_split frame needs \"Y\""))
                    }
                    (_, Some(_)) => return Err(CliError::input("\"Y\" is only used with derivative_split")),
                    (_, None) => AirySpec::matrix(frame, lmat)?,
                }
            }
        };
        match self.generator_sign.as_deref() {
            None => Ok(spec),
            Some("forward") => Ok(spec.with_sign(GeneratorSign::Forward)),
            Some("backward") => Ok(spec.with_sign(GeneratorSign::Backward)),
            Some(other) => Err(CliError::input(format!("unknown generator_sign {other:?}"))),
        }
    }

    fn airy_family(&self, family: &str, p: &Params) -> Result<AirySpec> {
        let length = self.graph.as_ref().map_or(1.0, |g| g.length);
        let even_graph = || match &self.graph {
            Some(g) => g.to_graph(),
            None => Ok(ac::alternating_graph(length, 1, 1.0, 1.0)?),
        };
        let tadpole = || match &self.graph {
            Some(g) => g.to_graph(),
            None => Ok(ac::uniform_tadpole(length, 1.0)?),
        };
        Ok(match family {
            "delta_z" => ac::delta_z(&even_graph()?, p.num("z", None)?)?,
            "delta_cross" => ac::delta_with_cross_term(&even_graph()?, p.num("z", None)?, p.num("m", None)?)?,
            "two_parameter" => ac::two_parameter_unitary(&even_graph()?, p.num("m1", None)?, p.num("m2", None)?)?,
            "four_parameter" => ac::four_parameter_unitary(&even_graph()?, p.array("m")?)?,
            "tadpole_delta" => ac::tadpole_delta(length, p.num("alpha0", Some(-1.0))?, p.array("m")?)?,
            "split_family" => {
                let [m1, m2, m3] = p.array("m")?;
                ac::derivative_split(
                    &tadpole()?,
                    ac::loop_line_subspace(p.num("z", Some(1.0))?),
                    ac::split_family_matrix(m1, m2, m3)?,
                )?
            }
            "continuity_split" => ac::continuity_split(&tadpole()?, p.num("z", None)?)?,
            other => return Err(CliError::input(format!("unknown Airy family {other:?}"))),
        })
    }

    fn load_schrodinger(&self) -> Result<SchrodingerSpec> {
        let p = Params(&self.params);
        if let Some(family) = p.family() {
            let length = self.graph.as_ref().map_or(1.0, |g| g.length);
            return Ok(match family {
                "delta" => sc::delta_spec(length, &p.square("m")?)?,
                "delta_prime" => {
                    let graph = match &self.graph {
                        Some(g) => g.to_graph()?,
                        None => MetricGraph::schrodinger_loop(length, 1)?,
                    };
                    sc::delta_prime(&graph, p.array("m")?)?
                }
                "subspace" => sc::tadpole_subspace(length, p.array("y")?)?,
                "t_derivative_continuity" => sc::t_shaped_derivative_continuity(length, &p.square("m")?)?,
                "dzn" => sc::dzn_spec(length, p.num("N", Some(1.0))? as usize, p.num("Z", None)?)?,
                other => return Err(CliError::input(format!("unknown Schrodinger family {other:?}"))),
            });
        }
        let graph = self.require_graph()?;
        match (self.frame.as_deref(), &self.lmat, self.subspace()?) {
            (Some("matrix") | None, Some(rows), None) => Ok(SchrodingerSpec::matrix(&graph, matrix_from_rows(rows)?)?),
            (Some("subspace") | None, None, Some(y)) => Ok(SchrodingerSpec::subspace(&graph, y)?),
            (Some("conditions"), Some(rows), None) => {
                Ok(SchrodingerSpec::conditions_spec(&graph, matrix_from_rows(rows)?)?)
            }
            _ => Err(CliError::input("Schrodinger spec needs exactly one of \"L\" (matrix) or \"Y\" (subspace)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDto {
    #[serde(default)]
    pub initial: Option<String>,
    #[serde(default)]
    pub center: Option<f64>,
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(rename = "T", default)]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(rename = "R", default)]
    pub truncation: Option<f64>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub c_stab: Option<f64>,
    #[serde(default)]
    pub scheme: Option<String>,
}

impl ScenarioDto {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    /// Fills unset fields from the operator's default scenario.
    pub fn resolve(&self, model: &Model) -> Result<Scenario> {
        if let Some(init) = self.initial.as_deref() {
            if init != "gaussian" {
                return Err(CliError::input(format!("unknown initial data {init:?}")));
            }
        }
        let graph = model.graph();
        let base = match model {
            Model::Airy(_) => Scenario::airy_default(graph),
            Model::Schrodinger(_) => Scenario::schrodinger_default(graph.length),
        };
        let scheme = match self.scheme.as_deref() {
            None => base.scheme,
            Some("cn") => Scheme::CrankNicolson,
            Some("midpoint") => Scheme::ImplicitMidpoint,
            Some(other) => return Err(CliError::input(format!("unknown scheme {other:?}"))),
        };
        let steps = match (self.steps, self.t_final) {
            (Some(s), _) => Some(s),
            (None, Some(_)) if self.c_stab.is_some() => None,
            (None, _) => base.steps,
        };
        Ok(Scenario {
            center: self.center.unwrap_or(base.center),
            width: self.width.unwrap_or(base.width),
            t_final: self.t_final.unwrap_or(base.t_final),
            h: self.h.unwrap_or(base.h),
            truncation: self.truncation.unwrap_or(base.truncation),
            steps,
            c_stab: self.c_stab.unwrap_or(base.c_stab),
            scheme,
        })
    }
}
