//! Energies, momenta, dissipation and boundary force.

use crate::assembly::{gather_gradient, gather_scalar, gather_vector, FaceElement, Problem};
use crate::kinematics::build_deformation;
use crate::materials::MaterialState;
use crate::timeint::SolutionState;
use crate::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
    pub dissipation_increment: f64,
    pub linear_momentum: [f64; 3],
    pub angular_momentum: [f64; 3],
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ForceRecord {
    pub t: f64,
    pub ux: f64,
    pub force: [f64; 3],
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// `∫ Σ_α |Q^α|²/2η^α dΩ`.
pub fn dissipation_rate(problem: &Problem, history: &[MaterialState]) -> f64 {
    let nq = problem.qp_per_element();
    let m = &problem.material;
    problem
        .mesh
        .elements
        .iter()
        .enumerate()
        .map(|(e, el)| el.qps.iter().enumerate().map(|(q, qp)| qp.weight * m.dissipation_rate(&history[e * nq + q])).sum::<f64>())
        .sum()
}

/// Kinetic and stored energy; `history` must hold `Q` at `state.t`.
pub fn compute_energies(problem: &Problem, state: &SolutionState, history: &[MaterialState]) -> Result<(f64, f64), Error> {
    let nq = problem.qp_per_element();
    let m = &problem.material;
    let (mut kin, mut pot) = (0.0, 0.0);
    for (e, el) in problem.mesh.elements.iter().enumerate() {
        for (q, qp) in el.qps.iter().enumerate() {
            let v = gather_vector(&el.kin, &qp.nk, &state.v);
            kin += 0.5 * qp.weight * m.density * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            let def = build_deformation(&gather_gradient(&el.kin, &qp.gk, &state.u))?;
            pot += qp.weight * (m.equilibrium_energy(&def) + m.branch_energy(&history[e * nq + q], &def));
        }
    }
    Ok((kin, pot))
}

/// `∫ ρ₀ V dΩ` and `∫ ρ₀ φ × V dΩ` with `φ = X + U`.
pub fn compute_momenta(problem: &Problem, state: &SolutionState) -> ([f64; 3], [f64; 3]) {
    let rho = problem.material.density;
    let (mut lin, mut ang) = ([0.0; 3], [0.0; 3]);
    for el in &problem.mesh.elements {
        for qp in &el.qps {
            let v = gather_vector(&el.kin, &qp.nk, &state.v);
            let u = gather_vector(&el.kin, &qp.nk, &state.u);
            let phi = [0, 1, 2].map(|i| qp.x[i] + u[i]);
            let l = cross(phi, v);
            for i in 0..3 {
                lin[i] += qp.weight * rho * v[i];
                ang[i] += qp.weight * rho * l[i];
            }
        }
    }
    (lin, ang)
}

/// Full energy record at the current state.
pub fn record(problem: &Problem, state: &SolutionState, history: &[MaterialState], dissipation_increment: f64) -> Result<EnergyRecord, Error> {
    let (kinetic, potential) = compute_energies(problem, state, history)?;
    let (linear_momentum, angular_momentum) = compute_momenta(problem, state);
    Ok(EnergyRecord {
        t: state.t,
        kinetic,
        potential,
        total: kinetic + potential,
        dissipation_increment,
        linear_momentum,
        angular_momentum,
    })
}

/// `∫ (F·S) N dA` over a face, `S = S_iso − J P C⁻¹`. The history at each face
/// point is taken from the nearest volume quadrature point of its element.
pub fn compute_surface_force(
    problem: &Problem,
    face: &[FaceElement],
    state: &SolutionState,
    history: &[MaterialState],
) -> Result<[f64; 3], Error> {
    let nq = problem.qp_per_element();
    let mut out = [0.0; 3];
    for fe in face {
        let el = &problem.mesh.elements[fe.element];
        for pt in &fe.points {
            let def = build_deformation(&gather_gradient(&el.kin, &pt.gk, &state.u))?;
            let p = gather_scalar(&el.pres, &pt.np, &state.p);
            let h = &history[fe.element * nq + problem.mesh.nearest_point(fe.element, pt.xi)];
            let (s_iso, _) = problem.material.stress(h, &def, 0.0);
            let s = s_iso - def.c_inv.scale(def.j * p);
            let t = def.f.dot(&s).apply(&pt.normal_area);
            for i in 0..3 {
                out[i] += t[i];
            }
        }
    }
    Ok(out)
}
