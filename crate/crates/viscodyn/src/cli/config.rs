//! Scenario description files (TOML).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::materials::{ModelKind, ViscousBranch};
use crate::splines::GeometryTemplate;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub geometry: GeometryTemplate,
    pub discretization: Discretization,
    pub material: MaterialConfig,
    #[serde(default)]
    pub initial: InitialCondition,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    /// Pressure degree; the kinematic space is one degree higher.
    pub degree: usize,
    pub elements: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub model: ModelKind,
    pub density: f64,
    /// Sets `c₁ = c₂ = E/6` when the coefficients are omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub youngs_modulus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(default)]
    pub branches: Vec<BranchConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchConfig {
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_over_c1: Option<f64>,
    pub tau: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    #[default]
    Rest,
    Uniform { velocity: [f64; 3] },
    /// `V = (v0 Z/L, 0, 0)`.
    Bending { v0: f64, reference_length: f64 },
    /// `V = v0 sin(πZ/(12L)) (−Y/L, X/L, 0)`.
    Torsion { v0: f64, reference_length: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default)]
    pub dirichlet: Vec<DirichletConfig>,
    #[serde(default)]
    pub traction: Vec<TractionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_force: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletConfig {
    pub face: String,
    pub motion: MotionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionKind {
    Clamp,
    Sine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TractionConfig {
    pub face: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub rho_inf: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write a VTK snapshot every this many steps; 0 disables snapshots.
    #[serde(default)]
    pub vtk_every: usize,
    /// Face whose resultant force goes to `force.csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_face: Option<String>,
    /// Write one energy row every this many steps (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_every: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub pin_pressure: bool,
    #[serde(default = "d_iters")]
    pub max_iterations: usize,
    #[serde(default = "d_rtol")]
    pub rtol: f64,
    #[serde(default = "d_atol")]
    pub atol: f64,
    #[serde(default = "d_halvings")]
    pub max_halvings: usize,
    /// Modified Newton: reuse the factorized matrix while it converges.
    #[serde(default)]
    pub reuse_tangent: bool,
}

fn d_iters() -> usize {
    20
}
fn d_rtol() -> f64 {
    1e-8
}
fn d_atol() -> f64 {
    1e-11
}
fn d_halvings() -> usize {
    3
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { pin_pressure: false, max_iterations: d_iters(), rtol: d_rtol(), atol: d_atol(), max_halvings: d_halvings(), reuse_tangent: false }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("field `{field}`: {msg}"))
}

impl MaterialConfig {
    /// `(c₁, c₂)` from explicit coefficients or the Young's modulus.
    pub fn coefficients(&self) -> Result<(f64, f64), Error> {
        match (self.c1, self.c2, self.youngs_modulus) {
            (Some(c1), Some(c2), None) => Ok((c1, c2)),
            (None, None, Some(e)) => Ok((e / 6.0, e / 6.0)),
            _ => Err(field_err("material", "give either c1 and c2, or youngs_modulus")),
        }
    }

    pub fn viscous_branches(&self) -> Result<Vec<ViscousBranch>, Error> {
        let (c1, _) = self.coefficients()?;
        self.branches
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mu = match (b.mu, b.mu_over_c1) {
                    (Some(m), None) => m,
                    (None, Some(r)) => r * c1,
                    _ => return Err(field_err(&format!("material.branches[{i}]"), "give exactly one of mu, mu_over_c1")),
                };
                Ok(ViscousBranch { beta: b.beta, mu, tau: b.tau })
            })
            .collect()
    }
}

impl ScenarioConfig {
    /// Parse and validate TOML text.
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let msg = e.message().trim().to_string();
            match e.span() {
                Some(s) => Error::Config(format!("line {}: {msg}", line_of(text, s.start))),
                None => Error::Config(msg),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, Error> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), Error> {
        let t = &self.time;
        if !(t.dt > 0.0) {
            return Err(field_err("time.dt", "must be positive"));
        }
        if !(t.t_end >= 0.0) {
            return Err(field_err("time.t_end", "must be non-negative"));
        }
        if !(0.0..=1.0).contains(&t.rho_inf) {
            return Err(field_err("time.rho_inf", "must lie in [0, 1]"));
        }
        if self.discretization.degree < 1 {
            return Err(field_err("discretization.degree", "must be at least 1"));
        }
        if self.discretization.elements.contains(&0) {
            return Err(field_err("discretization.elements", "must be positive"));
        }
        let m = &self.material;
        if !(m.density > 0.0) {
            return Err(field_err("material.density", "must be positive"));
        }
        let (c1, c2) = m.coefficients()?;
        if !(c1 > 0.0 && c2 >= 0.0) {
            return Err(field_err("material", "need c1 > 0 and c2 ≥ 0"));
        }
        for (i, b) in m.viscous_branches()?.iter().enumerate() {
            if !(b.mu > 0.0 && b.tau > 0.0) {
                return Err(field_err(&format!("material.branches[{i}]"), "mu and tau must be positive"));
            }
            if m.model != ModelKind::Hs && !(b.beta > 0.0) {
                return Err(field_err(&format!("material.branches[{i}].beta"), "must be positive"));
            }
        }
        for (i, d) in self.boundary.dirichlet.iter().enumerate() {
            parse_face(&self.geometry, &d.face).map_err(|e| field_err(&format!("boundary.dirichlet[{i}].face"), e))?;
            if d.motion == MotionKind::Sine && (d.amplitude.is_none() || d.omega.is_none()) {
                return Err(field_err(&format!("boundary.dirichlet[{i}]"), "sine motion needs amplitude and omega"));
            }
        }
        for (i, tr) in self.boundary.traction.iter().enumerate() {
            parse_face(&self.geometry, &tr.face).map_err(|e| field_err(&format!("boundary.traction[{i}].face"), e))?;
            if tr.pressure.is_some() == tr.vector.is_some() {
                return Err(field_err(&format!("boundary.traction[{i}]"), "give exactly one of pressure, vector"));
            }
        }
        if let Some(f) = &self.output.force_face {
            parse_face(&self.geometry, f).map_err(|e| field_err("output.force_face", e))?;
        }
        if self.output.energy_every == Some(0) {
            return Err(field_err("output.energy_every", "must be positive"));
        }
        match (&self.initial, &self.geometry) {
            (InitialCondition::Bending { reference_length: l, .. } | InitialCondition::Torsion { reference_length: l, .. }, _)
                if !(*l > 0.0) =>
            {
                Err(field_err("initial.reference_length", "must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Face by name: `xmin … zmax` on boxes, `inner`, `outer`, `bottom`, `top`
/// on annuli.
pub fn parse_face(geometry: &GeometryTemplate, name: &str) -> Result<crate::assembly::Face, String> {
    use crate::assembly::Face;
    let f = match (geometry, name) {
        (GeometryTemplate::Box { .. }, "xmin") => Face::new(0, 0),
        (GeometryTemplate::Box { .. }, "xmax") => Face::new(0, 1),
        (GeometryTemplate::Box { .. }, "ymin") => Face::new(1, 0),
        (GeometryTemplate::Box { .. }, "ymax") => Face::new(1, 1),
        (GeometryTemplate::Box { .. }, "zmin") => Face::new(2, 0),
        (GeometryTemplate::Box { .. }, "zmax") => Face::new(2, 1),
        (GeometryTemplate::Annulus { .. }, "inner") => Face::new(0, 0),
        (GeometryTemplate::Annulus { .. }, "outer") => Face::new(0, 1),
        (GeometryTemplate::Annulus { .. }, "bottom") => Face::new(2, 0),
        (GeometryTemplate::Annulus { .. }, "top") => Face::new(2, 1),
        _ => return Err(format!("unknown face `{name}` for this geometry")),
    };
    Ok(f)
}

/// Read and validate a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, Error> {
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::from_toml(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}
