//! Time loop with observers and file output.

use std::path::Path;

use super::config::ScenarioConfig;
use super::output::{energy_row, force_row, write_vtk, CsvSeries, ENERGY_HEADER, FORCE_HEADER};
use super::scenario::Scenario;
use crate::assembly::{gather_vector, FaceElement, Problem};
use crate::diagnostics::{compute_surface_force, record, EnergyRecord, ForceRecord};
use crate::timeint::SolutionState;
use crate::Error;

#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub energies: Vec<EnergyRecord>,
    pub forces: Vec<ForceRecord>,
    pub steps: usize,
    pub newton_iterations: usize,
}

/// Area-averaged x-displacement of a face.
fn face_ux(problem: &Problem, face: &[FaceElement], state: &SolutionState) -> f64 {
    let (mut num, mut area) = (0.0, 0.0);
    for fe in face {
        let el = &problem.mesh.elements[fe.element];
        for pt in &fe.points {
            let da = pt.normal_area.iter().map(|c| c * c).sum::<f64>().sqrt();
            num += da * gather_vector(&el.kin, &pt.nk, &state.u)[0];
            area += da;
        }
    }
    num / area
}

struct Sinks {
    energies: Option<CsvSeries>,
    forces: Option<CsvSeries>,
}

/// Run a scenario. With `out`, writes `energies.csv`, `force.csv` (if a force
/// face is configured) and VTK snapshots; rows are flushed as steps commit.
pub fn run(config: &ScenarioConfig, out: Option<&Path>) -> Result<RunSummary, Error> {
    let scenario = Scenario::build(config.clone())?;
    let pb = &scenario.problem;
    let mut stepper = scenario.stepper()?;
    let every = config.output.energy_every.unwrap_or(1);
    let mut sinks = Sinks { energies: None, forces: None };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        sinks.energies = Some(CsvSeries::create(&dir.join("energies.csv"), &ENERGY_HEADER)?);
        if scenario.force_face.is_some() {
            sinks.forces = Some(CsvSeries::create(&dir.join("force.csv"), &FORCE_HEADER)?);
        }
    }
    let mut summary = RunSummary::default();
    let mut observe = |stepper: &crate::timeint::Stepper, step: usize, dissipation: f64, summary: &mut RunSummary| -> Result<(), Error> {
        let history = stepper.probe_history()?;
        let state = &stepper.state;
        let rec = record(pb, state, &history, dissipation)?;
        if step % every == 0 {
            if let Some(s) = sinks.energies.as_mut() {
                s.row(&energy_row(&rec))?;
            }
        }
        summary.energies.push(rec);
        if let Some((_, face)) = &scenario.force_face {
            let f = ForceRecord { t: state.t, ux: face_ux(pb, face, state), force: compute_surface_force(pb, face, state, &history)? };
            if let Some(s) = sinks.forces.as_mut() {
                s.row(&force_row(&f))?;
            }
            summary.forces.push(f);
        }
        let vtk = config.output.vtk_every;
        if let (Some(dir), true) = (out, vtk > 0 && step % vtk == 0) {
            write_vtk(&dir.join(format!("snapshot_{step:06}.vtk")), pb, state, &history)?;
        }
        Ok(())
    };
    observe(&stepper, 0, 0.0, &mut summary)?;
    let dt = config.time.dt;
    for step in 1..=scenario.num_steps() {
        let rep = stepper.step(dt)?;
        summary.steps = step;
        summary.newton_iterations += rep.iterations;
        observe(&stepper, step, rep.dissipation, &mut summary)?;
    }
    Ok(summary)
}
