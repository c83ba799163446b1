//! Mixed residuals and chain-rule-scaled tangents on the reference configuration.

mod dofs;
mod mesh;
mod sparse;

pub use dofs::{DofMap, Motion, Prescribed};
pub use mesh::{ElementData, Face, FaceElement, FacePoint, Mesh, QuadPoint};
pub use sparse::SparsePattern;

use faer::sparse::{SparseColMat, Triplet};
use faer::prelude::*;
use faer::Col;
use rayon::prelude::*;

use crate::kinematics::build_deformation;
use crate::materials::{Material, MaterialState};
use crate::tensors::{Tensor2, Tensor4};
use crate::Error;
use sparse::{element_dofs, NONE};

/// Dead traction on a reference face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TractionLoad {
    /// `H = −p₀ N`.
    Pressure(f64),
    Constant([f64; 3]),
}

/// Field values at the collocation levels, laid out as in [`DofMap`].
#[derive(Clone, Copy, Debug)]
pub struct Fields<'a> {
    pub u: &'a [f64],
    pub v: &'a [f64],
    pub v_dot: &'a [f64],
    pub p: &'a [f64],
}

/// Derivatives of the collocated fields with respect to the Newton unknowns
/// `(V̇_{n+1}, Ṗ_{n+1})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    /// `∂V̇_{n+α_m}/∂V̇_{n+1}`.
    pub mass: f64,
    /// `∂V_{n+α_f}/∂V̇_{n+1}`.
    pub vel: f64,
    /// `∂U_{n+α_f}/∂V̇_{n+1}`.
    pub disp: f64,
    /// `∂P_{n+α_f}/∂Ṗ_{n+1}`.
    pub pres: f64,
}

impl Coefficients {
    /// Plain partial derivatives with respect to `(V̇, U, V, P)` summed.
    pub const UNIT: Coefficients = Coefficients { mass: 1.0, vel: 1.0, disp: 1.0, pres: 1.0 };
}

#[derive(Clone, Debug)]
pub struct Assembled {
    pub residual: Vec<f64>,
    /// CSC values on the problem's pattern.
    pub matrix: Option<Vec<f64>>,
    /// Trial history at every quadrature point.
    pub history: Vec<MaterialState>,
}

struct ElementOut {
    r: Vec<f64>,
    k: Vec<f64>,
    states: Vec<MaterialState>,
}

/// Everything needed to assemble the discrete system.
#[derive(Clone, Debug)]
pub struct Problem {
    pub mesh: Mesh,
    pub material: Material,
    pub dofs: DofMap,
    pub pattern: SparsePattern,
    pub body_force: [f64; 3],
    tractions: Vec<(TractionLoad, Vec<FaceElement>)>,
    element_dofs: Vec<Vec<usize>>,
    qp_per_element: usize,
}

/// `Σ_a u_a ⊗ g_a`.
pub fn gather_gradient(kin: &[usize], grads: &[[f64; 3]], u: &[f64]) -> Tensor2 {
    let mut g = Tensor2::zero();
    for (a, ga) in kin.iter().zip(grads) {
        for i in 0..3 {
            let ua = u[3 * a + i];
            for j in 0..3 {
                g.0[i][j] += ua * ga[j];
            }
        }
    }
    g
}

/// `Σ_a N_a u_a`.
pub fn gather_vector(kin: &[usize], values: &[f64], u: &[f64]) -> [f64; 3] {
    let mut v = [0.0; 3];
    for (a, n) in kin.iter().zip(values) {
        for i in 0..3 {
            v[i] += n * u[3 * a + i];
        }
    }
    v
}

pub fn gather_scalar(pres: &[usize], values: &[f64], p: &[f64]) -> f64 {
    pres.iter().zip(values).map(|(b, n)| n * p[*b]).sum()
}

impl Problem {
    pub fn new(
        mesh: Mesh,
        material: Material,
        dirichlet: &[(Face, Motion)],
        tractions: &[(Face, TractionLoad)],
        body_force: [f64; 3],
        pin_pressure: bool,
    ) -> Result<Self, Error> {
        for (f, _) in dirichlet {
            if !mesh.is_boundary(*f) {
                return Err(Error::Config(format!("face in direction {} is not a boundary", f.dir)));
            }
        }
        let dofs = DofMap::new(&mesh, dirichlet, pin_pressure);
        let pattern = SparsePattern::new(&mesh)?;
        let tractions = tractions
            .iter()
            .map(|(f, t)| Ok((*t, mesh.face_quadrature(*f)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let offset = 3 * mesh.n_kin;
        let element_dofs = mesh.elements.iter().map(|e| element_dofs(&e.kin, &e.pres, offset)).collect();
        let qp_per_element = mesh.gauss_per_dir.pow(3);
        Ok(Self { mesh, material, dofs, pattern, body_force, tractions, element_dofs, qp_per_element })
    }

    pub fn num_dofs(&self) -> usize {
        self.dofs.num_dofs()
    }

    pub fn num_quad_points(&self) -> usize {
        self.mesh.elements.len() * self.qp_per_element
    }

    pub fn qp_per_element(&self) -> usize {
        self.qp_per_element
    }

    /// Undeformed history with `Q = O` at every quadrature point.
    pub fn initial_history(&self) -> Vec<MaterialState> {
        vec![self.material.initial_state(); self.num_quad_points()]
    }

    /// Residual, and the tangent scaled by `coef` if given. History is advanced
    /// by `dt` from `history` at every quadrature point.
    pub fn assemble(
        &self,
        fields: Fields,
        history: &[MaterialState],
        dt: f64,
        coef: Option<&Coefficients>,
    ) -> Result<Assembled, Error> {
        let outs: Vec<ElementOut> = (0..self.mesh.elements.len())
            .into_par_iter()
            .map(|e| self.element(e, &fields, history, dt, coef))
            .collect::<Result<_, _>>()?;
        let mut residual = vec![0.0; self.num_dofs()];
        let mut matrix = coef.map(|_| vec![0.0; self.pattern.nnz()]);
        let mut states = Vec::with_capacity(self.num_quad_points());
        for (e, out) in outs.into_iter().enumerate() {
            let d = &self.element_dofs[e];
            for (r, v) in d.iter().zip(&out.r) {
                residual[*r] += v;
            }
            if let Some(vals) = matrix.as_mut() {
                for (pos, v) in self.pattern.scatter(e).iter().zip(&out.k) {
                    if *pos != NONE {
                        vals[*pos] += v;
                    }
                }
            }
            states.extend(out.states);
        }
        self.add_tractions(&mut residual);
        Ok(Assembled { residual, matrix, history: states })
    }

    fn add_tractions(&self, residual: &mut [f64]) {
        for (load, faces) in &self.tractions {
            for fe in faces {
                let kin = &self.mesh.elements[fe.element].kin;
                for pt in &fe.points {
                    let h = match *load {
                        TractionLoad::Pressure(p0) => pt.normal_area.map(|n| -p0 * n),
                        TractionLoad::Constant(h) => {
                            let da = pt.normal_area.iter().map(|n| n * n).sum::<f64>().sqrt();
                            h.map(|c| c * da)
                        }
                    };
                    for (a, n) in kin.iter().zip(&pt.nk) {
                        for i in 0..3 {
                            residual[3 * a + i] -= n * h[i];
                        }
                    }
                }
            }
        }
    }

    fn element(
        &self,
        e: usize,
        fields: &Fields,
        history: &[MaterialState],
        dt: f64,
        coef: Option<&Coefficients>,
    ) -> Result<ElementOut, Error> {
        let el = &self.mesh.elements[e];
        let nk = el.kin.len();
        let np = el.pres.len();
        let nl = 3 * nk + np;
        let po = 3 * nk;
        let rho = self.material.density;
        let b = self.body_force;
        let mut r = vec![0.0; nl];
        let mut k = if coef.is_some() { vec![0.0; nl * nl] } else { Vec::new() };
        let mut states = Vec::with_capacity(el.qps.len());
        let h0 = e * self.qp_per_element;
        for (q, qp) in el.qps.iter().enumerate() {
            let grad_u = gather_gradient(&el.kin, &qp.gk, fields.u);
            let grad_v = gather_gradient(&el.kin, &qp.gk, fields.v);
            let acc = gather_vector(&el.kin, &qp.nk, fields.v_dot);
            let p = gather_scalar(&el.pres, &qp.np, fields.p);
            let def = build_deformation(&grad_u)?;
            let hist = &history[h0 + q];
            let (s_iso, c_iso) = match coef {
                Some(_) => {
                    let st = self.material.stress_tangent(hist, &def, dt);
                    states.push(st.state);
                    (st.s_iso, Some(st.c_iso))
                }
                None => {
                    let (s, next) = self.material.stress(hist, &def, dt);
                    states.push(next);
                    (s, None)
                }
            };
            let w = qp.weight;
            let j = def.j;
            let jp = j * p;
            let s = s_iso - def.c_inv.scale(jp);
            let piola = def.f.dot(&s);
            let l = grad_v.dot(&def.f_inv);
            let trl = l.trace();
            for a in 0..nk {
                let (na, ga) = (qp.nk[a], qp.gk[a]);
                for i in 0..3 {
                    let pg: f64 = (0..3).map(|jj| piola.0[i][jj] * ga[jj]).sum();
                    r[3 * a + i] += w * (rho * na * (acc[i] - b[i]) + pg);
                }
            }
            for bb in 0..np {
                r[po + bb] += w * qp.np[bb] * j * trl;
            }
            let (Some(c), Some(c_iso)) = (coef, c_iso) else { continue };

            let cinv = &def.c_inv;
            let cm = c_iso + (Tensor4::symdyad(cinv, cinv).scale(2.0) - Tensor4::dyad(cinv, cinv)).scale(jp);
            let f = &def.f.0;
            let mut t1 = [0.0; 81];
            for i in 0..3 {
                for rest in 0..27 {
                    t1[27 * i + rest] = (0..3).map(|ii| f[i][ii] * cm.0[27 * ii + rest]).sum();
                }
            }
            // A_{iJkL} = F_iI ℂ_IJKL F_kK + δ_ik S_JL
            let mut a4 = [0.0; 81];
            for i in 0..3 {
                for jj in 0..3 {
                    for kk in 0..3 {
                        for ll in 0..3 {
                            let base = 27 * i + 9 * jj + ll;
                            let mut v: f64 = (0..3).map(|m| t1[base + 3 * m] * f[kk][m]).sum();
                            if i == kk {
                                v += s.0[jj][ll];
                            }
                            a4[27 * i + 9 * jj + 3 * kk + ll] = v;
                        }
                    }
                }
            }
            let cu = c.disp * w;
            let cmass = c.mass * w * rho;
            for a in 0..nk {
                let ga = qp.gk[a];
                let na = qp.nk[a];
                let mut h = [0.0; 27];
                for i in 0..3 {
                    for kk in 0..3 {
                        for ll in 0..3 {
                            h[9 * i + 3 * kk + ll] = (0..3).map(|jj| ga[jj] * a4[27 * i + 9 * jj + 3 * kk + ll]).sum();
                        }
                    }
                }
                for bq in a..nk {
                    let gb = qp.gk[bq];
                    let m = cmass * na * qp.nk[bq];
                    for i in 0..3 {
                        let row = &mut k[(3 * a + i) * nl + 3 * bq..(3 * a + i) * nl + 3 * bq + 3];
                        for kk in 0..3 {
                            let hh = &h[9 * i + 3 * kk..9 * i + 3 * kk + 3];
                            row[kk] += cu * (hh[0] * gb[0] + hh[1] * gb[1] + hh[2] * gb[2]);
                        }
                        row[i] += m;
                    }
                }
            }
            let fit = def.f_inv.transpose();
            let mt = def.f_inv.dot(&l).transpose();
            for a in 0..nk {
                let fg = fit.apply(&qp.gk[a]);
                let mg = mt.apply(&qp.gk[a]);
                for i in 0..3 {
                    let row = (3 * a + i) * nl + po;
                    let coup = -c.pres * w * j * fg[i];
                    for cc in 0..np {
                        k[row + cc] += coup * qp.np[cc];
                    }
                }
                for bb in 0..np {
                    let row = (po + bb) * nl + 3 * a;
                    let wn = w * qp.np[bb] * j;
                    for kk in 0..3 {
                        k[row + kk] += wn * (c.vel * fg[kk] + c.disp * (fg[kk] * trl - mg[kk]));
                    }
                }
            }
        }
        if coef.is_some() {
            // the kinematic block is symmetric; only blocks b ≥ a were summed
            for a in 0..nk {
                for bq in a + 1..nk {
                    for i in 0..3 {
                        for kk in 0..3 {
                            k[(3 * bq + kk) * nl + 3 * a + i] = k[(3 * a + i) * nl + 3 * bq + kk];
                        }
                    }
                }
            }
        }
        Ok(ElementOut { r, k, states })
    }

    /// Zero constrained residual rows and replace constrained matrix rows by identity.
    pub fn constrain(&self, residual: &mut [f64], matrix: Option<&mut Vec<f64>>) {
        let mask = self.dofs.constrained_mask();
        for (r, m) in residual.iter_mut().zip(mask) {
            if *m {
                *r = 0.0;
            }
        }
        if let Some(vals) = matrix {
            let n = self.num_dofs();
            let mut pos = 0;
            for c in 0..n {
                for &row in self.pattern.column_rows(c) {
                    if mask[row] {
                        vals[pos] = 0.0;
                    }
                    pos += 1;
                }
            }
            for (i, m) in mask.iter().enumerate() {
                if *m {
                    vals[self.pattern.diagonal(i)] = 1.0;
                }
            }
        }
    }

    /// Unit-density mass matrix of the scalar kinematic space.
    pub fn scalar_mass(&self) -> Result<SparseColMat<usize, f64>, Error> {
        let mut trip = Vec::new();
        for el in &self.mesh.elements {
            for qp in &el.qps {
                for (a, na) in el.kin.iter().zip(&qp.nk) {
                    for (b, nb) in el.kin.iter().zip(&qp.nk) {
                        trip.push(Triplet::new(*a, *b, qp.weight * na * nb));
                    }
                }
            }
        }
        let n = self.mesh.n_kin;
        SparseColMat::try_new_from_triplets(n, n, &trip).map_err(|e| Error::LinearSolver(format!("{e:?}")))
    }

    /// Solve `M x_i = rhs_i` for each component, where `rhs` is laid out as
    /// `3a + i`.
    pub fn solve_mass(&self, rhs: &[f64]) -> Result<Vec<f64>, Error> {
        self.solve_mass_with(rhs, &[])
    }

    /// As [`Problem::solve_mass`] with `x[dof] = value` imposed for each
    /// prescribed entry (all three components of a function must share the
    /// constraint).
    pub fn solve_mass_with(&self, rhs: &[f64], fixed: &[(usize, f64)]) -> Result<Vec<f64>, Error> {
        let n = self.mesh.n_kin;
        let mut is_fixed = vec![false; n];
        let mut out = vec![0.0; 3 * n];
        for &(d, val) in fixed {
            is_fixed[d / 3] = true;
            out[d] = val;
        }
        let mut trip = Vec::new();
        let mut b = rhs.to_vec();
        for el in &self.mesh.elements {
            for qp in &el.qps {
                for (a, na) in el.kin.iter().zip(&qp.nk) {
                    if is_fixed[*a] {
                        continue;
                    }
                    for (c, nc) in el.kin.iter().zip(&qp.nk) {
                        let m = qp.weight * na * nc;
                        if is_fixed[*c] {
                            for i in 0..3 {
                                b[3 * a + i] -= m * out[3 * c + i];
                            }
                        } else {
                            trip.push(Triplet::new(*a, *c, m));
                        }
                    }
                }
            }
        }
        for (a, f) in is_fixed.iter().enumerate() {
            if *f {
                trip.push(Triplet::new(a, a, 1.0));
            }
        }
        let m = SparseColMat::try_new_from_triplets(n, n, &trip).map_err(|e| Error::LinearSolver(format!("{e:?}")))?;
        let lu = m.sp_lu().map_err(|e| Error::LinearSolver(format!("{e:?}")))?;
        for i in 0..3 {
            let mut col = Col::<f64>::from_fn(n, |a| if is_fixed[a] { out[3 * a + i] } else { b[3 * a + i] });
            lu.solve_in_place(col.as_mut());
            for a in 0..n {
                out[3 * a + i] = col[a];
            }
        }
        Ok(out)
    }

    /// History advanced by `dt` to the displacement `u` (stress path only).
    pub fn advance_history(&self, u: &[f64], history: &[MaterialState], dt: f64) -> Result<Vec<MaterialState>, Error> {
        let per: Vec<Vec<MaterialState>> = self
            .mesh
            .elements
            .par_iter()
            .enumerate()
            .map(|(e, el)| {
                el.qps
                    .iter()
                    .enumerate()
                    .map(|(q, qp)| {
                        let def = build_deformation(&gather_gradient(&el.kin, &qp.gk, u))?;
                        Ok(self.material.stress(&history[e * self.qp_per_element + q], &def, dt).1)
                    })
                    .collect::<Result<Vec<_>, Error>>()
            })
            .collect::<Result<_, _>>()?;
        Ok(per.into_iter().flatten().collect())
    }

    /// L² projection of a vector field onto the kinematic space.
    pub fn project(&self, field: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Vec<f64>, Error> {
        let mut rhs = vec![0.0; 3 * self.mesh.n_kin];
        for el in &self.mesh.elements {
            for qp in &el.qps {
                let v = field(qp.x);
                for (a, na) in el.kin.iter().zip(&qp.nk) {
                    for i in 0..3 {
                        rhs[3 * a + i] += qp.weight * na * v[i];
                    }
                }
            }
        }
        self.solve_mass(&rhs)
    }
}
