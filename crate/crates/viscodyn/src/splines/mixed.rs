use faer::prelude::*;
use faer::Mat;
use serde::{Deserialize, Serialize};

use super::knots::KnotVector;
use super::volume::{SplineVolume, TensorProductSpace};
use crate::Error;

/// Single-patch geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryTemplate {
    /// Axis-aligned box `origin + [0, lengths]`; parametric directions are x, y, z.
    Box { origin: [f64; 3], lengths: [f64; 3] },
    /// Hollow cylinder about the z axis, `z ∈ [0, length]`; parametric
    /// directions are radial (0 = inner face), circumferential, axial.
    Annulus { inner_radius: f64, outer_radius: f64, length: f64 },
}

/// Pressure space of degree p and the kinematic space of degree p+1 sharing
/// breakpoints and interior continuity, both carrying the same geometry.
#[derive(Clone, Debug)]
pub struct MixedSpacePair {
    pub degree: usize,
    pub pressure: SplineVolume,
    pub kinematic: SplineVolume,
}

type Homogeneous = [f64; 4];

struct CoarsePatch {
    knots: [KnotVector; 3],
    points: Vec<Homogeneous>,
    periodic: [bool; 3],
}

fn coarse_patch(template: &GeometryTemplate) -> Result<CoarsePatch, Error> {
    let linear = || KnotVector::new(1, vec![0.0, 0.0, 1.0, 1.0]);
    match *template {
        GeometryTemplate::Box { origin, lengths } => {
            if lengths.iter().any(|&l| !(l > 0.0)) {
                return Err(Error::Config("geometry.lengths must be positive".into()));
            }
            let mut points = Vec::with_capacity(8);
            for k in 0..2 {
                for j in 0..2 {
                    for i in 0..2 {
                        let c = [i, j, k];
                        let x = [0, 1, 2].map(|d| origin[d] + c[d] as f64 * lengths[d]);
                        points.push([x[0], x[1], x[2], 1.0]);
                    }
                }
            }
            Ok(CoarsePatch { knots: [linear()?, linear()?, linear()?], points, periodic: [false; 3] })
        }
        GeometryTemplate::Annulus { inner_radius, outer_radius, length } => {
            if !(inner_radius > 0.0 && outer_radius > inner_radius && length > 0.0) {
                return Err(Error::Config(
                    "annulus needs 0 < inner_radius < outer_radius and length > 0".into(),
                ));
            }
            let circle = KnotVector::new(
                2,
                vec![0.0, 0.0, 0.0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1.0, 1.0, 1.0],
            )?;
            let unit: [[f64; 2]; 9] = [
                [1.0, 0.0],
                [1.0, 1.0],
                [0.0, 1.0],
                [-1.0, 1.0],
                [-1.0, 0.0],
                [-1.0, -1.0],
                [0.0, -1.0],
                [1.0, -1.0],
                [1.0, 0.0],
            ];
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut points = Vec::with_capacity(36);
            for k in 0..2 {
                for (j, u) in unit.iter().enumerate() {
                    let w = if j % 2 == 1 { h } else { 1.0 };
                    for r in [inner_radius, outer_radius] {
                        let z = k as f64 * length;
                        points.push([w * r * u[0], w * r * u[1], w * z, w]);
                    }
                }
            }
            Ok(CoarsePatch { knots: [linear()?, circle, linear()?], points, periodic: [false, true, false] })
        }
    }
}

/// Target knot vector of degree `q` on `elements` uniform spans. Breakpoints of
/// the coarse vector keep its continuity; new ones get continuity `cont`.
fn refined_knots(coarse: &KnotVector, q: usize, elements: usize, cont: usize) -> Result<KnotVector, Error> {
    let coarse_breaks = coarse.breakpoints();
    for b in &coarse_breaks {
        let scaled = b * elements as f64;
        if (scaled - scaled.round()).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "element count {elements} does not align with the geometry breakpoint {b}"
            )));
        }
    }
    let breaks: Vec<f64> = (0..=elements).map(|i| i as f64 / elements as f64).collect();
    let ps = coarse.degree();
    let mult: Vec<usize> = breaks[1..elements]
        .iter()
        .map(|&b| {
            let hit = coarse_breaks.iter().find(|&&c| (c - b).abs() < 1e-12);
            let c = match hit {
                Some(&c) => cont.min(ps - coarse.multiplicity(c)),
                None => cont,
            };
            q - c
        })
        .collect();
    KnotVector::from_breakpoints(q, &breaks, &mult)
}

/// Coefficient transfer (target × source) by collocation at the target
/// Greville points; exact when the source space lies in the target space.
fn transfer_matrix(src: &KnotVector, dst: &KnotVector) -> Result<Mat<f64>, Error> {
    let g = dst.greville();
    let nt = dst.dim();
    let ns = src.dim();
    let mut a = Mat::<f64>::zeros(nt, nt);
    let mut b = Mat::<f64>::zeros(nt, ns);
    for (row, &x) in g.iter().enumerate() {
        let bt = dst.eval(x)?;
        for (r, v) in bt.values.iter().enumerate() {
            a[(row, bt.span - dst.degree() + r)] = *v;
        }
        let bs = src.eval(x)?;
        for (r, v) in bs.values.iter().enumerate() {
            b[(row, bs.span - src.degree() + r)] = *v;
        }
    }
    Ok(a.partial_piv_lu().solve(&b))
}

/// Apply a 1D transfer along direction `dir` of a raw tensor coefficient array.
fn apply_transfer(coef: &[Homogeneous], dims: [usize; 3], dir: usize, t: &Mat<f64>) -> (Vec<Homogeneous>, [usize; 3]) {
    let mut nd = dims;
    nd[dir] = t.nrows();
    let mut out = vec![[0.0; 4]; nd[0] * nd[1] * nd[2]];
    for k in 0..nd[2] {
        for j in 0..nd[1] {
            for i in 0..nd[0] {
                let dst = [i, j, k];
                let mut acc = [0.0; 4];
                for s in 0..dims[dir] {
                    let w = t[(dst[dir], s)];
                    if w == 0.0 {
                        continue;
                    }
                    let mut src = dst;
                    src[dir] = s;
                    let c = coef[src[0] + dims[0] * (src[1] + dims[1] * src[2])];
                    for m in 0..4 {
                        acc[m] += w * c[m];
                    }
                }
                out[i + nd[0] * (j + nd[1] * k)] = acc;
            }
        }
    }
    (out, nd)
}

fn transfer_volume(
    coef: &[Homogeneous],
    src: &[KnotVector; 3],
    dst: &[KnotVector; 3],
) -> Result<Vec<Homogeneous>, Error> {
    let mut dims = [src[0].dim(), src[1].dim(), src[2].dim()];
    let mut c = coef.to_vec();
    for d in 0..3 {
        let t = transfer_matrix(&src[d], &dst[d])?;
        let (next, nd) = apply_transfer(&c, dims, d, &t);
        c = next;
        dims = nd;
    }
    Ok(c)
}

fn to_volume(knots: [KnotVector; 3], coef: &[Homogeneous], periodic: [bool; 3]) -> Result<SplineVolume, Error> {
    let weights: Vec<f64> = coef.iter().map(|c| c[3]).collect();
    let control_points = coef.iter().map(|c| [c[0] / c[3], c[1] / c[3], c[2] / c[3]]).collect();
    let space = TensorProductSpace::new(knots, weights, periodic)?;
    Ok(SplineVolume { space, control_points })
}

/// Build the pressure/kinematic pair of degrees `p`/`p+1` on `elements` spans
/// per direction, with geometry transferred exactly from the template.
pub fn build_mixed_pair(p: usize, elements: [usize; 3], template: &GeometryTemplate) -> Result<MixedSpacePair, Error> {
    if p < 1 {
        return Err(Error::Config(format!("spline degree must be >= 1, got {p}")));
    }
    if elements.iter().any(|&n| n == 0) {
        return Err(Error::Config("element counts must be positive".into()));
    }
    let coarse = coarse_patch(template)?;
    for d in 0..3 {
        if coarse.knots[d].degree() > p {
            return Err(Error::Config(format!(
                "geometry needs degree >= {} in direction {d}",
                coarse.knots[d].degree()
            )));
        }
    }
    let refine = |q: usize| -> Result<[KnotVector; 3], Error> {
        Ok([
            refined_knots(&coarse.knots[0], q, elements[0], p - 1)?,
            refined_knots(&coarse.knots[1], q, elements[1], p - 1)?,
            refined_knots(&coarse.knots[2], q, elements[2], p - 1)?,
        ])
    };
    let pk = refine(p)?;
    let kk = refine(p + 1)?;

    let pcoef = transfer_volume(&coarse.points, &coarse.knots, &pk)?;
    let kcoef = transfer_volume(&pcoef, &pk, &kk)?;
    Ok(MixedSpacePair {
        degree: p,
        pressure: to_volume(pk, &pcoef, coarse.periodic)?,
        kinematic: to_volume(kk, &kcoef, coarse.periodic)?,
    })
}
