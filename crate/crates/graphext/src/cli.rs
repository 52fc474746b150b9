//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use graphext_core::airy::{self, Tolerances};
use graphext_core::evolution::{self, CertifyTolerances};
use graphext_core::schrodinger;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::format::{GraphDto, ScenarioDto, SpecDto};
use crate::report::{self, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "graphext", version, about = "Vertex couplings on looping-edge, tadpole and T-shaped graphs")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Input JSON file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_unitary: f64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_psd: f64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_form: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Grid spacing override for simulate/certify.
    #[arg(long, global = true)]
    pub grid_h: Option<f64>,
    /// Largest admissible tail mass at the truncation cut.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub horizon: f64,
    /// Norm drift allowed for conservative verdicts.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_drift: f64,
    /// Per-step norm growth allowed for contraction verdicts.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_growth: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify an extension spec.
    Classify,
    /// Deficiency indices of a graph (`--operator schrodinger` for the Laplacian).
    Deficiency {
        #[arg(long, default_value = "airy")]
        operator: String,
    },
    /// Classify every worked example and compare with the expected verdicts.
    Catalogue,
    /// Evolve Gaussian data under a spec.
    Simulate {
        /// Scenario JSON; operator defaults otherwise.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// CSV time series (t, norm, boundary_residual, tail_mass).
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Classify, evolve and check the norm against the verdict.
    Certify {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        series: Option<PathBuf>,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })
}

fn input(config: &RunConfig) -> Result<String> {
    read(config.input.as_ref().ok_or_else(|| CliError::input("--input is required"))?)
}

fn emit<T: Serialize>(config: &RunConfig, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::json)?;
    text.push('\n');
    match &config.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), source: e }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io { path: "stdout".into(), source: e }),
    }
}

fn write_series(path: &Option<PathBuf>, r: &evolution::EvolutionReport) -> Result<()> {
    if let Some(path) = path {
        let file = fs::File::create(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        report::write_series(r, file)?;
    }
    Ok(())
}

impl RunConfig {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances { unitary: self.tol_unitary, psd: self.tol_psd, form: self.tol_form }
    }

    pub fn certify_tolerances(&self) -> CertifyTolerances {
        CertifyTolerances { unitary: self.tol_drift, contraction: self.tol_growth, horizon: self.horizon, ..Default::default() }
    }

    fn scenario(&self, path: &Option<PathBuf>, model: &evolution::Model) -> Result<evolution::Scenario> {
        let dto = match path {
            Some(p) => ScenarioDto::parse(&read(p)?)?,
            None => ScenarioDto::default(),
        };
        let mut s = dto.resolve(model)?;
        if let Some(h) = self.grid_h {
            s.h = h;
        }
        Ok(s)
    }
}

/// Runs one command; returns the process exit code.
pub fn run(config: &RunConfig) -> Result<i32> {
    let tol = config.tolerances();
    match &config.command {
        Command::Classify => {
            let spec = SpecDto::parse(&input(config)?)?.load()?;
            emit(config, &report::classify_report(&spec, &tol, config.seed)?)?;
            Ok(EXIT_OK)
        }
        Command::Deficiency { operator } => {
            let text = input(config)?;
            let graph = match crate::format::parse_json::<GraphDto>(&text) {
                Ok(g) => g.to_graph()?,
                Err(first) => match SpecDto::parse(&text) {
                    Ok(spec) => spec.load()?.graph().clone(),
                    Err(_) => return Err(first),
                },
            };
            let d = match operator.as_str() {
                "airy" => airy::deficiency(&graph)?,
                "schrodinger" => schrodinger::deficiency(&graph),
                other => return Err(CliError::input(format!("unknown operator {other:?}"))),
            };
            emit(config, &report::deficiency_report(operator, &graph, &d))?;
            Ok(EXIT_OK)
        }
        Command::Catalogue => {
            let r = report::catalogue_report(&tol, config.seed)?;
            emit(config, &r)?;
            Ok(if r.failed == 0 { EXIT_OK } else { EXIT_INCONSISTENT })
        }
        Command::Simulate { scenario, series } => {
            let spec = SpecDto::parse(&input(config)?)?.load()?;
            let model = spec.model();
            let s = config.scenario(scenario, &model)?;
            let r = evolution::simulate(&model, &s)?;
            write_series(series, &r)?;
            emit(config, &report::simulate_report(&spec, &s, &r))?;
            Ok(EXIT_OK)
        }
        Command::Certify { scenario, series } => {
            let spec = SpecDto::parse(&input(config)?)?.load()?;
            let model = spec.model();
            let s = config.scenario(scenario, &model)?;
            let ctol = config.certify_tolerances();
            let c = evolution::certify(&model, &s, &ctol, &tol)?;
            write_series(series, &c.report)?;
            emit(config, &report::certify_report(&spec, &s, &ctol, &tol, &c))?;
            Ok(if c.verdict_consistency { EXIT_OK } else { EXIT_INCONSISTENT })
        }
    }
}
