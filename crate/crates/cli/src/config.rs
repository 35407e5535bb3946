//! Run configuration: one JSON file per run, unknown keys rejected.
//!
//! Only `domain` is shared between tasks; every other section belongs to one
//! task and may be omitted when its defaults are fine.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vpl_core::branch::{uniform_mu_grid, BranchSelector, Component, DomainSpec, DEFAULT_GRID_HI, DEFAULT_GRID_LO, DEFAULT_GRID_POINTS};
use vpl_core::deformed::DEFAULT_WINDOW;
use vpl_core::oracle::{GridMvpOptions, DEFAULT_RADIAL_NODES};
use vpl_pde::geometry::GeometrySpec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Branch,
    Envelope,
    Transition,
    Classify,
    HighEnergy,
    Oracle,
    Pde,
    AppendixCheck,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Branch => "branch",
            Task::Envelope => "envelope",
            Task::Transition => "transition",
            Task::Classify => "classify",
            Task::HighEnergy => "high-energy",
            Task::Oracle => "oracle",
            Task::Pde => "pde",
            Task::AppendixCheck => "appendix-check",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when given.
    pub task: Option<Task>,
    pub domain: Option<DomainConfig>,
    pub mu_grid: Option<MuGrid>,
    pub energies: Option<EnergyGrid>,
    /// Branches to build; defaults to every k-branch (or every merged branch
    /// for identical disks).
    pub selectors: Option<Vec<BranchSelector>>,
    pub transition: Option<TransitionConfig>,
    pub high_energy: Option<HighEnergyConfig>,
    pub oracle: Option<OracleConfig>,
    pub pde: Option<PdeConfig>,
    pub appendix: Option<AppendixConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub areas: Vec<f64>,
    /// Deformation per component; all plain disks when absent.
    pub etas: Option<Vec<f64>>,
}

/// Either explicit `values` or a uniform grid.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuGrid {
    pub values: Option<Vec<f64>>,
    pub points: Option<usize>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

/// Either explicit `values` or `points` energies spaced geometrically from
/// the uniform-state energy up to `factor` times it.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyGrid {
    pub values: Option<Vec<f64>>,
    pub points: Option<usize>,
    pub factor: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionSourceKind {
    /// d/l/r pieces of the 0-branch.
    #[default]
    ZeroBranch,
    /// Winner switches of the envelope over `selectors`.
    Envelope,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionConfig {
    #[serde(default)]
    pub source: TransitionSourceKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HighEnergyConfig {
    #[serde(default = "default_he_n")]
    pub n: usize,
    #[serde(default = "default_he_eta")]
    pub eta: f64,
    #[serde(default = "default_he_window")]
    pub window: (f64, f64),
    pub e_range: Option<(f64, f64)>,
}

fn default_he_n() -> usize {
    3
}
fn default_he_eta() -> f64 {
    1e-3
}
fn default_he_window() -> (f64, f64) {
    DEFAULT_WINDOW
}

impl Default for HighEnergyConfig {
    fn default() -> Self {
        HighEnergyConfig {
            n: default_he_n(),
            eta: default_he_eta(),
            window: default_he_window(),
            e_range: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Radial finite-volume solve against the closed-form disk.
    #[default]
    Radial,
    /// Lattice maximization against the entropy envelope.
    Envelope,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default)]
    pub kind: OracleKind,
    pub betas: Option<Vec<f64>>,
    pub area: Option<f64>,
    pub nodes: Option<usize>,
    pub grid_points: Option<usize>,
    pub refine_rounds: Option<usize>,
    pub refine_points: Option<usize>,
    pub shrink: Option<f64>,
}

impl OracleConfig {
    pub fn betas(&self) -> Vec<f64> {
        self.betas.clone().unwrap_or_else(|| vec![-7.0 * PI, -4.0 * PI, 0.0, 8.0 * PI])
    }

    pub fn grid_options(&self) -> GridMvpOptions {
        let d = GridMvpOptions::default();
        GridMvpOptions {
            points: self.grid_points.unwrap_or(d.points),
            refine_rounds: self.refine_rounds.unwrap_or(d.refine_rounds),
            refine_points: self.refine_points.unwrap_or(d.refine_points),
            shrink: self.shrink.unwrap_or(d.shrink),
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes.unwrap_or(DEFAULT_RADIAL_NODES)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdeMode {
    /// One solve at `lambda`, reached by natural continuation from zero.
    Solve,
    /// Arclength continuation through the fold.
    Continue,
    /// Chain lower-branch states against the disjoint disks, per width.
    LowerBranch,
    /// Equal-energy states with crossing entropies on a chain.
    Crossing,
}

/// Disks on a line joined centre to centre by channels; widths and the edge
/// gap are fractions of the largest radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub areas: Vec<f64>,
    #[serde(default)]
    pub width_fraction: f64,
    #[serde(default = "default_gap")]
    pub gap_fraction: f64,
}

fn default_gap() -> f64 {
    vpl_pde::dumbbell::DEFAULT_GAP_FRACTION
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeConfig {
    pub mode: PdeMode,
    pub h: f64,
    pub geometry: Option<GeometrySpec>,
    pub chain: Option<ChainConfig>,
    pub lambda: Option<f64>,
    /// Natural-continuation steps used to reach `lambda`.
    pub lambda_steps: Option<usize>,
    pub tol: Option<f64>,
    /// Write `U` at every node.
    #[serde(default)]
    pub export_field: bool,
    pub lambda_start: Option<f64>,
    pub lambda_step: Option<f64>,
    pub ds_max: Option<f64>,
    pub max_points: Option<usize>,
    pub u_max: Option<f64>,
    pub widths: Option<Vec<f64>>,
    pub mus: Option<Vec<f64>>,
    /// Centre of the crossing window; the disjoint-disk `E*` by default.
    pub reference_energy: Option<f64>,
    pub window: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixConfig {
    #[serde(default = "default_appendix_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_appendix_eps")]
    pub epsilons: [f64; 2],
    #[serde(default = "default_appendix_h")]
    pub h: f64,
}

fn default_appendix_betas() -> Vec<f64> {
    vec![-4.0 * PI, -PI]
}
fn default_appendix_eps() -> [f64; 2] {
    vpl_pde::appendix::DEFAULT_EPSILONS
}
fn default_appendix_h() -> f64 {
    vpl_pde::appendix::DEFAULT_H
}

impl Default for AppendixConfig {
    fn default() -> Self {
        AppendixConfig {
            betas: default_appendix_betas(),
            epsilons: default_appendix_eps(),
            h: default_appendix_h(),
        }
    }
}

/// A parsed configuration with the hash of the file it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    /// Hex SHA-256 of the raw file bytes.
    pub sha256: String,
    pub warnings: Vec<String>,
}

pub fn parse_config(path: &Path) -> Result<LoadedConfig> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_bytes(&bytes)
}

pub fn parse_config_bytes(bytes: &[u8]) -> Result<LoadedConfig> {
    let config: RunConfig = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let sha256 = format!("{:x}", Sha256::digest(bytes));
    let mut warnings = Vec::new();
    if let Some(d) = &config.domain {
        validate_domain(d, &mut warnings)?;
    }
    Ok(LoadedConfig {
        config,
        sha256,
        warnings,
    })
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be positive and finite, got {x}")))
    }
}

fn validate_domain(d: &DomainConfig, warnings: &mut Vec<String>) -> Result<()> {
    if d.areas.is_empty() {
        return Err(Error::validation("domain.areas", "empty"));
    }
    for (i, &a) in d.areas.iter().enumerate() {
        positive(&format!("domain.areas[{i}]"), a)?;
    }
    if let Some(etas) = &d.etas {
        if etas.len() != d.areas.len() {
            return Err(Error::validation(
                "domain.etas",
                format!("{} values for {} areas", etas.len(), d.areas.len()),
            ));
        }
        for (i, &e) in etas.iter().enumerate() {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::validation(format!("domain.etas[{i}]"), format!("must be non-negative, got {e}")));
            }
        }
    }
    if d.areas.windows(2).any(|w| w[1] > w[0]) {
        warnings.push("domain.areas not in non-increasing order; sorted".into());
    }
    Ok(())
}

impl RunConfig {
    pub fn check_task(&self, task: Task) -> Result<()> {
        match self.task {
            Some(t) if t != task => Err(Error::validation(
                "task",
                format!("config is for `{}`, subcommand is `{}`", t.name(), task.name()),
            )),
            _ => Ok(()),
        }
    }

    pub fn domain(&self) -> Result<DomainSpec> {
        let d = self
            .domain
            .as_ref()
            .ok_or_else(|| Error::validation("domain", "required by this task"))?;
        let comps = match &d.etas {
            None => d.areas.iter().map(|&area| Component::Disk { area }).collect(),
            Some(etas) => d
                .areas
                .iter()
                .zip(etas)
                .map(|(&area, &eta)| Component::DeformedDisk { area, eta })
                .collect(),
        };
        Ok(DomainSpec::new(comps)?)
    }

    pub fn mu_grid(&self) -> Result<Vec<f64>> {
        let g = self.mu_grid.clone().unwrap_or_default();
        if let Some(v) = g.values {
            if g.points.is_some() || g.lo.is_some() || g.hi.is_some() {
                return Err(Error::validation("mu_grid", "give either values or points/lo/hi"));
            }
            if v.is_empty() {
                return Err(Error::validation("mu_grid.values", "empty μ grid"));
            }
            return Ok(v);
        }
        let points = g.points.unwrap_or(DEFAULT_GRID_POINTS);
        if points == 0 {
            return Err(Error::validation("mu_grid.points", "empty μ grid"));
        }
        let (lo, hi) = (g.lo.unwrap_or(DEFAULT_GRID_LO), g.hi.unwrap_or(DEFAULT_GRID_HI));
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(Error::validation("mu_grid", format!("need 0 < lo < hi < 1, got ({lo}, {hi})")));
        }
        Ok(uniform_mu_grid(points, lo, hi))
    }

    pub fn energies(&self, domain: &DomainSpec, default_points: usize) -> Result<Vec<f64>> {
        let g = self.energies.clone().unwrap_or_default();
        if let Some(v) = g.values {
            if g.points.is_some() || g.factor.is_some() {
                return Err(Error::validation("energies", "give either values or points/factor"));
            }
            if v.is_empty() {
                return Err(Error::validation("energies.values", "empty"));
            }
            for (i, &e) in v.iter().enumerate() {
                positive(&format!("energies.values[{i}]"), e)?;
            }
            return Ok(v);
        }
        let points = g.points.unwrap_or(default_points);
        if points == 0 {
            return Err(Error::validation("energies.points", "empty"));
        }
        let factor = g.factor.unwrap_or(20.0);
        if !(factor > 1.0 && factor.is_finite()) {
            return Err(Error::validation("energies.factor", format!("must exceed 1, got {factor}")));
        }
        Ok(vpl_core::transition::default_energy_grid(domain, points, factor))
    }

    pub fn selectors(&self, domain: &DomainSpec) -> Result<Vec<BranchSelector>> {
        match &self.selectors {
            None => Ok(vpl_core::transition::default_selectors(domain)),
            Some(v) if v.is_empty() => Err(Error::validation("selectors", "empty")),
            Some(v) => {
                for (i, s) in v.iter().enumerate() {
                    s.validate(domain)
                        .map_err(|e| Error::validation(format!("selectors[{i}]"), e.to_string()))?;
                }
                Ok(v.clone())
            }
        }
    }

    pub fn pde(&self) -> Result<&PdeConfig> {
        let p = self
            .pde
            .as_ref()
            .ok_or_else(|| Error::validation("pde", "required by this task"))?;
        positive("pde.h", p.h)?;
        for (name, v) in [
            ("pde.tol", p.tol),
            ("pde.lambda", p.lambda),
            ("pde.lambda_start", p.lambda_start),
            ("pde.lambda_step", p.lambda_step),
            ("pde.ds_max", p.ds_max),
            ("pde.u_max", p.u_max),
            ("pde.reference_energy", p.reference_energy),
            ("pde.window", p.window),
        ] {
            if let Some(x) = v {
                positive(name, x)?;
            }
        }
        Ok(p)
    }
}
