//! Quadrature data cached per element and per boundary face.

use serde::{Deserialize, Serialize};

use crate::splines::{gauss_legendre, LocalBasis, MixedSpacePair, SplineVolume};
use crate::Error;

/// A parametric boundary face: direction `dir` at `ξ_dir = side`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Face {
    pub dir: usize,
    pub side: usize,
}

impl Face {
    pub fn new(dir: usize, side: usize) -> Self {
        assert!(dir < 3 && side < 2);
        Self { dir, side }
    }
}

/// Basis data of both fields at one volume quadrature point.
#[derive(Clone, Debug)]
pub struct QuadPoint {
    /// Gauss weight times `det(dX/dξ)`.
    pub weight: f64,
    pub xi: [f64; 3],
    pub x: [f64; 3],
    pub nk: Vec<f64>,
    /// Material gradients of the kinematic basis.
    pub gk: Vec<[f64; 3]>,
    pub np: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ElementData {
    pub index: [usize; 3],
    pub kin: Vec<usize>,
    pub pres: Vec<usize>,
    pub qps: Vec<QuadPoint>,
}

/// Basis data at one face quadrature point.
#[derive(Clone, Debug)]
pub struct FacePoint {
    /// Weighted area vector `N dA`.
    pub normal_area: [f64; 3],
    pub xi: [f64; 3],
    pub x: [f64; 3],
    pub nk: Vec<f64>,
    pub gk: Vec<[f64; 3]>,
    pub np: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct FaceElement {
    /// Index of the adjacent volume element.
    pub element: usize,
    pub points: Vec<FacePoint>,
}

/// Discretization with basis values precomputed at `p+2` Gauss points per
/// direction.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub pair: MixedSpacePair,
    pub elements: Vec<ElementData>,
    pub n_kin: usize,
    pub n_pres: usize,
    pub gauss_per_dir: usize,
}

fn physical_grads(basis: &LocalBasis, jac_inv_t: &crate::Tensor2) -> Vec<[f64; 3]> {
    basis.grads.iter().map(|g| jac_inv_t.apply(g)).collect()
}

fn point_data(
    pair: &MixedSpacePair,
    el: [usize; 3],
    xi: [f64; 3],
) -> Result<([f64; 3], crate::Tensor2, Vec<f64>, Vec<[f64; 3]>, Vec<f64>), Error> {
    let kb = pair.kinematic.space.eval_in_element(el, xi);
    let (x, jac) = pair.kinematic.map_in_element(el, &kb);
    let (det, inv) = jac.det_inv().map_err(|_| Error::DegenerateMapping(jac.det()))?;
    if !(det > 0.0) {
        return Err(Error::DegenerateMapping(det));
    }
    let gk = physical_grads(&kb, &inv.transpose());
    let pb = pair.pressure.space.eval_in_element(el, xi);
    Ok((x, jac, kb.values, gk, pb.values))
}

impl Mesh {
    pub fn new(pair: MixedSpacePair) -> Result<Self, Error> {
        let nq = pair.degree + 2;
        let (gx, gw) = gauss_legendre(nq);
        let space = &pair.kinematic.space;
        let mut elements = Vec::with_capacity(space.num_elements());
        for e in 0..space.num_elements() {
            let el = space.element_index(e);
            let b = space.element_bounds(el);
            let h = [0, 1, 2].map(|d| b[d][1] - b[d][0]);
            let mut qps = Vec::with_capacity(nq * nq * nq);
            for k in 0..nq {
                for j in 0..nq {
                    for i in 0..nq {
                        let xi = [
                            b[0][0] + h[0] * gx[i],
                            b[1][0] + h[1] * gx[j],
                            b[2][0] + h[2] * gx[k],
                        ];
                        let (x, jac, nk, gk, np) = point_data(&pair, el, xi)?;
                        let weight = gw[i] * gw[j] * gw[k] * h[0] * h[1] * h[2] * jac.det();
                        qps.push(QuadPoint { weight, xi, x, nk, gk, np });
                    }
                }
            }
            elements.push(ElementData {
                index: el,
                kin: space.element_connectivity(el),
                pres: pair.pressure.space.element_connectivity(el),
                qps,
            });
        }
        Ok(Self {
            n_kin: space.num_basis(),
            n_pres: pair.pressure.space.num_basis(),
            pair,
            elements,
            gauss_per_dir: nq,
        })
    }

    pub fn kinematic(&self) -> &SplineVolume {
        &self.pair.kinematic
    }

    /// Number of unknowns: three per kinematic function plus one per pressure function.
    pub fn num_dofs(&self) -> usize {
        3 * self.n_kin + self.n_pres
    }

    /// Whether `face` is a real boundary (not a periodic seam).
    pub fn is_boundary(&self, face: Face) -> bool {
        !self.pair.kinematic.space.periodic()[face.dir]
    }

    /// Quadrature point of element `e` closest to `xi` in parameter space.
    pub fn nearest_point(&self, e: usize, xi: [f64; 3]) -> usize {
        let d = |q: &QuadPoint| (0..3).map(|k| (q.xi[k] - xi[k]).powi(2)).sum::<f64>();
        let qps = &self.elements[e].qps;
        (0..qps.len()).min_by(|&a, &b| d(&qps[a]).total_cmp(&d(&qps[b]))).expect("element has quadrature points")
    }

    /// Global kinematic functions supported on `face`.
    pub fn face_functions(&self, face: Face) -> Vec<usize> {
        let space = &self.pair.kinematic.space;
        let d = space.dims();
        let fixed = if face.side == 0 { 0 } else { d[face.dir] - 1 };
        let (a, b) = ((face.dir + 1) % 3, (face.dir + 2) % 3);
        let mut out = Vec::new();
        for j in 0..d[b] {
            for i in 0..d[a] {
                let mut m = [0; 3];
                m[face.dir] = fixed;
                m[a] = i;
                m[b] = j;
                out.push(space.global_index(m));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Quadrature on a boundary face, with `N dA = det(J) J^{-T} N̂ dÂ`.
    pub fn face_quadrature(&self, face: Face) -> Result<Vec<FaceElement>, Error> {
        if !self.is_boundary(face) {
            return Err(Error::Config(format!("direction {} is periodic and has no boundary face", face.dir)));
        }
        let nq = self.gauss_per_dir;
        let (gx, gw) = gauss_legendre(nq);
        let space = &self.pair.kinematic.space;
        let counts = space.element_counts();
        let (da, db) = ((face.dir + 1) % 3, (face.dir + 2) % 3);
        let target = if face.side == 0 { 0 } else { counts[face.dir] - 1 };
        let sign = if face.side == 0 { -1.0 } else { 1.0 };
        let mut out = Vec::new();
        for (e, data) in self.elements.iter().enumerate() {
            let el = data.index;
            if el[face.dir] != target {
                continue;
            }
            let bnd = space.element_bounds(el);
            let mut points = Vec::with_capacity(nq * nq);
            for j in 0..nq {
                for i in 0..nq {
                    let mut xi = [0.0; 3];
                    xi[face.dir] = bnd[face.dir][face.side];
                    xi[da] = bnd[da][0] + (bnd[da][1] - bnd[da][0]) * gx[i];
                    xi[db] = bnd[db][0] + (bnd[db][1] - bnd[db][0]) * gx[j];
                    let (x, jac, nk, gk, np) = point_data(&self.pair, el, xi)?;
                    let (det, inv) = jac.det_inv()?;
                    let w = gw[i] * gw[j] * (bnd[da][1] - bnd[da][0]) * (bnd[db][1] - bnd[db][0]);
                    let mut nhat = [0.0; 3];
                    nhat[face.dir] = sign;
                    let n = inv.transpose().apply(&nhat);
                    points.push(FacePoint { normal_area: n.map(|c| c * det * w), xi, x, nk, gk, np });
                }
            }
            out.push(FaceElement { element: e, points });
        }
        Ok(out)
    }
}
