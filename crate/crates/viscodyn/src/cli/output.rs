//! CSV time series and VTK legacy snapshots.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::assembly::{gather_gradient, gather_scalar, gather_vector, Problem};
use crate::diagnostics::{EnergyRecord, ForceRecord};
use crate::kinematics::build_deformation;
use crate::materials::MaterialState;
use crate::timeint::SolutionState;
use crate::Error;

pub const ENERGY_HEADER: [&str; 11] = [
    "t",
    "kinetic",
    "potential",
    "total",
    "dissipation_increment",
    "linear_momentum_x",
    "linear_momentum_y",
    "linear_momentum_z",
    "angular_momentum_x",
    "angular_momentum_y",
    "angular_momentum_z",
];

pub const FORCE_HEADER: [&str; 5] = ["t", "Ux", "Fx", "Fy", "Fz"];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub struct CsvSeries {
    w: csv::Writer<File>,
}

impl CsvSeries {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self, Error> {
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        w.flush()?;
        Ok(Self { w })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<(), Error> {
        self.w.write_record(values.iter().map(|v| format!("{v:.12e}"))).map_err(csv_err)?;
        self.w.flush()?;
        Ok(())
    }
}

pub fn energy_row(r: &EnergyRecord) -> [f64; 11] {
    let (l, a) = (r.linear_momentum, r.angular_momentum);
    [r.t, r.kinetic, r.potential, r.total, r.dissipation_increment, l[0], l[1], l[2], a[0], a[1], a[2]]
}

pub fn force_row(r: &ForceRecord) -> [f64; 5] {
    [r.t, r.ux, r.force[0], r.force[1], r.force[2]]
}

/// Fields evaluated at one parametric point of an element.
pub struct PointValues {
    pub x: [f64; 3],
    pub u: [f64; 3],
    pub v: [f64; 3],
    pub p: f64,
    pub cauchy: crate::Tensor2,
}

/// Evaluate the solution at `xi` in element `e`; the history is taken from the
/// nearest quadrature point.
pub fn evaluate(problem: &Problem, e: usize, xi: [f64; 3], state: &SolutionState, history: &[MaterialState]) -> Result<PointValues, Error> {
    let mesh = &problem.mesh;
    let el = &mesh.elements[e];
    let kin = &mesh.pair.kinematic;
    let kb = kin.space.eval_in_element(el.index, xi);
    let (x, jac) = kin.map_in_element(el.index, &kb);
    let (_, inv) = jac.det_inv()?;
    let it = inv.transpose();
    let grads: Vec<[f64; 3]> = kb.grads.iter().map(|g| it.apply(g)).collect();
    let pb = mesh.pair.pressure.space.eval_in_element(el.index, xi);
    let def = build_deformation(&gather_gradient(&el.kin, &grads, &state.u))?;
    let p = gather_scalar(&el.pres, &pb.values, &state.p);
    let h = &history[e * problem.qp_per_element() + mesh.nearest_point(e, xi)];
    let (s_iso, _) = problem.material.stress(h, &def, 0.0);
    let s = s_iso - def.c_inv.scale(def.j * p);
    let cauchy = def.f.dot(&s).dot(&def.f.transpose()).scale(1.0 / def.j);
    Ok(PointValues {
        x,
        u: gather_vector(&el.kin, &kb.values, &state.u),
        v: gather_vector(&el.kin, &kb.values, &state.v),
        p,
        cauchy,
    })
}

/// Unstructured hexahedral grid over the element vertices.
pub fn write_vtk(path: &Path, problem: &Problem, state: &SolutionState, history: &[MaterialState]) -> Result<(), Error> {
    let space = &problem.mesh.pair.kinematic.space;
    let n = space.element_counts();
    let periodic = space.periodic();
    let breaks: Vec<Vec<f64>> = (0..3).map(|d| space.knots(d).breakpoints()).collect();
    let nv = [0, 1, 2].map(|d| if periodic[d] { n[d] } else { n[d] + 1 });
    let vid = |i: usize, j: usize, k: usize| {
        let m = [i, j, k];
        let w = [0, 1, 2].map(|d| if periodic[d] { m[d] % nv[d] } else { m[d] });
        w[0] + nv[0] * (w[1] + nv[1] * w[2])
    };
    let total = nv[0] * nv[1] * nv[2];
    let mut pts = Vec::with_capacity(total);
    for k in 0..nv[2] {
        for j in 0..nv[1] {
            for i in 0..nv[0] {
                let m = [i, j, k];
                let el = [0, 1, 2].map(|d| m[d].min(n[d] - 1));
                let e = el[0] + n[0] * (el[1] + n[1] * el[2]);
                let xi = [0, 1, 2].map(|d| breaks[d][m[d]]);
                pts.push(evaluate(problem, e, xi, state, history)?);
            }
        }
    }
    let mut f = BufWriter::new(File::create(path)?);
    writeln!(f, "# vtk DataFile Version 3.0")?;
    writeln!(f, "t = {}", state.t)?;
    writeln!(f, "ASCII\nDATASET UNSTRUCTURED_GRID")?;
    writeln!(f, "POINTS {total} double")?;
    for p in &pts {
        writeln!(f, "{} {} {}", p.x[0], p.x[1], p.x[2])?;
    }
    let ncell = n[0] * n[1] * n[2];
    writeln!(f, "CELLS {ncell} {}", 9 * ncell)?;
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let c = [
                    vid(i, j, k),
                    vid(i + 1, j, k),
                    vid(i + 1, j + 1, k),
                    vid(i, j + 1, k),
                    vid(i, j, k + 1),
                    vid(i + 1, j, k + 1),
                    vid(i + 1, j + 1, k + 1),
                    vid(i, j + 1, k + 1),
                ];
                writeln!(f, "8 {} {} {} {} {} {} {} {}", c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7])?;
            }
        }
    }
    writeln!(f, "CELL_TYPES {ncell}")?;
    for _ in 0..ncell {
        writeln!(f, "12")?;
    }
    writeln!(f, "POINT_DATA {total}")?;
    writeln!(f, "VECTORS displacement double")?;
    for p in &pts {
        writeln!(f, "{} {} {}", p.u[0], p.u[1], p.u[2])?;
    }
    writeln!(f, "VECTORS velocity double")?;
    for p in &pts {
        writeln!(f, "{} {} {}", p.v[0], p.v[1], p.v[2])?;
    }
    writeln!(f, "SCALARS pressure double 1\nLOOKUP_TABLE default")?;
    for p in &pts {
        writeln!(f, "{}", p.p)?;
    }
    writeln!(f, "TENSORS cauchy_stress double")?;
    for p in &pts {
        for r in p.cauchy.0 {
            writeln!(f, "{} {} {}", r[0], r[1], r[2])?;
        }
    }
    f.flush()?;
    Ok(())
}
