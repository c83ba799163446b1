//! Config to problem: mesh, material, boundary data and initial velocity.

use std::f64::consts::PI;

use super::config::{parse_face, InitialCondition, MotionKind, ScenarioConfig};
use crate::assembly::{Face, FaceElement, Mesh, Motion, Problem, TractionLoad};
use crate::materials::{EquilibriumModel, Material};
use crate::splines::build_mixed_pair;
use crate::timeint::{derive_parameters, AlphaParameters, NewtonOptions, Stepper};
use crate::Error;

pub struct Scenario {
    pub config: ScenarioConfig,
    pub problem: Problem,
    pub params: AlphaParameters,
    pub options: NewtonOptions,
    pub force_face: Option<(Face, Vec<FaceElement>)>,
}

/// Analytic initial velocity at reference point `x`.
pub fn initial_field(ic: &InitialCondition, x: [f64; 3]) -> [f64; 3] {
    match *ic {
        InitialCondition::Rest => [0.0; 3],
        InitialCondition::Uniform { velocity } => velocity,
        InitialCondition::Bending { v0, reference_length: l } => [v0 * x[2] / l, 0.0, 0.0],
        InitialCondition::Torsion { v0, reference_length: l } => {
            let a = v0 * (PI * x[2] / (12.0 * l)).sin();
            [-a * x[1] / l, a * x[0] / l, 0.0]
        }
    }
}

fn face(cfg: &ScenarioConfig, name: &str) -> Result<Face, Error> {
    parse_face(&cfg.geometry, name).map_err(Error::Config)
}

impl Scenario {
    pub fn build(config: ScenarioConfig) -> Result<Self, Error> {
        config.validate()?;
        let d = &config.discretization;
        let mesh = Mesh::new(build_mixed_pair(d.degree, d.elements, &config.geometry)?)?;
        let m = &config.material;
        let (c1, c2) = m.coefficients()?;
        let material = Material::new(m.model, EquilibriumModel::new(c1, c2)?, m.viscous_branches()?, m.density)?;
        let mut dirichlet = Vec::new();
        for dc in &config.boundary.dirichlet {
            let motion = match dc.motion {
                MotionKind::Clamp => Motion::Clamp,
                MotionKind::Sine => Motion::Sine {
                    amplitude: dc.amplitude.unwrap_or_default(),
                    omega: dc.omega.unwrap_or_default(),
                },
            };
            dirichlet.push((face(&config, &dc.face)?, motion));
        }
        let mut tractions = Vec::new();
        for tc in &config.boundary.traction {
            let load = match (tc.pressure, tc.vector) {
                (Some(p), None) => TractionLoad::Pressure(p),
                (None, Some(v)) => TractionLoad::Constant(v),
                _ => return Err(Error::Config("traction needs exactly one of pressure, vector".into())),
            };
            tractions.push((face(&config, &tc.face)?, load));
        }
        let body = config.boundary.body_force.unwrap_or_default();
        let problem = Problem::new(mesh, material, &dirichlet, &tractions, body, config.solver.pin_pressure)?;
        let force_face = match &config.output.force_face {
            Some(name) => {
                let f = face(&config, name)?;
                Some((f, problem.mesh.face_quadrature(f)?))
            }
            None => None,
        };
        let s = &config.solver;
        let options = NewtonOptions { max_iterations: s.max_iterations, rtol: s.rtol, atol: s.atol, max_halvings: s.max_halvings, reuse_tangent: s.reuse_tangent };
        let params = derive_parameters(config.time.rho_inf)?;
        Ok(Self { config, problem, params, options, force_face })
    }

    /// L² projection of the configured initial velocity.
    pub fn initial_velocity(&self) -> Result<Vec<f64>, Error> {
        match self.config.initial {
            InitialCondition::Rest => Ok(vec![0.0; 3 * self.problem.mesh.n_kin]),
            ref ic => self.problem.project(|x| initial_field(ic, x)),
        }
    }

    pub fn stepper(&self) -> Result<Stepper<'_>, Error> {
        Stepper::start(&self.problem, self.params, self.options, self.initial_velocity()?)
    }

    /// Number of steps of size `dt` covering `[0, t_end]`.
    pub fn num_steps(&self) -> usize {
        (self.config.time.t_end / self.config.time.dt - 1e-9).ceil().max(0.0) as usize
    }
}
