use super::knots::KnotVector;
use crate::tensors::Tensor2;
use crate::Error;

/// Univariate NURBS space.
#[derive(Clone, Debug, PartialEq)]
pub struct NurbsSpace1D {
    pub knots: KnotVector,
    pub weights: Vec<f64>,
}

impl NurbsSpace1D {
    pub fn new(knots: KnotVector, weights: Vec<f64>) -> Result<Self, Error> {
        if weights.len() != knots.dim() || weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Config("NURBS weights must be positive, one per basis function".into()));
        }
        Ok(Self { knots, weights })
    }

    /// Rational values and derivatives of the active functions at `xi`.
    pub fn eval(&self, xi: f64) -> Result<(usize, Vec<f64>, Vec<f64>), Error> {
        let b = self.knots.eval(xi)?;
        let p = self.knots.degree();
        let w = &self.weights[b.span - p..=b.span];
        let (mut wsum, mut dwsum) = (0.0, 0.0);
        for r in 0..=p {
            wsum += w[r] * b.values[r];
            dwsum += w[r] * b.derivs[r];
        }
        let vals: Vec<f64> = (0..=p).map(|r| w[r] * b.values[r] / wsum).collect();
        let ders = (0..=p)
            .map(|r| w[r] * (b.derivs[r] * wsum - b.values[r] * dwsum) / (wsum * wsum))
            .collect();
        Ok((b.span, vals, ders))
    }
}

/// Trivariate tensor-product NURBS space on the unit cube.
///
/// Raw basis functions are numbered `i + n0 (j + n1 k)`. A periodic direction
/// identifies its first and last function (closed seam).
#[derive(Clone, Debug)]
pub struct TensorProductSpace {
    knots: [KnotVector; 3],
    weights: Vec<f64>,
    periodic: [bool; 3],
    spans: [Vec<usize>; 3],
}

/// Basis functions supported on one element, evaluated at one point.
#[derive(Clone, Debug, Default)]
pub struct LocalBasis {
    pub values: Vec<f64>,
    /// Parametric gradients.
    pub grads: Vec<[f64; 3]>,
}

impl TensorProductSpace {
    pub fn new(knots: [KnotVector; 3], weights: Vec<f64>, periodic: [bool; 3]) -> Result<Self, Error> {
        let n: usize = knots.iter().map(|k| k.dim()).product();
        if weights.len() != n || weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Config("weights must be positive, one per basis function".into()));
        }
        let spans = [knots[0].spans(), knots[1].spans(), knots[2].spans()];
        Ok(Self { knots, weights, periodic, spans })
    }

    pub fn knots(&self, d: usize) -> &KnotVector {
        &self.knots[d]
    }

    pub fn degrees(&self) -> [usize; 3] {
        [self.knots[0].degree(), self.knots[1].degree(), self.knots[2].degree()]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn periodic(&self) -> [bool; 3] {
        self.periodic
    }

    /// Raw per-direction dimensions.
    pub fn dims(&self) -> [usize; 3] {
        [self.knots[0].dim(), self.knots[1].dim(), self.knots[2].dim()]
    }

    /// Per-direction dimensions after seam identification.
    pub fn reduced_dims(&self) -> [usize; 3] {
        let d = self.dims();
        [0, 1, 2].map(|i| if self.periodic[i] { d[i] - 1 } else { d[i] })
    }

    /// Number of distinct basis functions.
    pub fn num_basis(&self) -> usize {
        self.reduced_dims().iter().product()
    }

    pub fn raw_index(&self, ijk: [usize; 3]) -> usize {
        let d = self.dims();
        ijk[0] + d[0] * (ijk[1] + d[1] * ijk[2])
    }

    /// Global basis index of raw multi-index `ijk`.
    pub fn global_index(&self, ijk: [usize; 3]) -> usize {
        let d = self.dims();
        let r = self.reduced_dims();
        let mut m = ijk;
        for i in 0..3 {
            if self.periodic[i] && m[i] == d[i] - 1 {
                m[i] = 0;
            }
        }
        m[0] + r[0] * (m[1] + r[1] * m[2])
    }

    pub fn element_counts(&self) -> [usize; 3] {
        [self.spans[0].len(), self.spans[1].len(), self.spans[2].len()]
    }

    pub fn num_elements(&self) -> usize {
        self.element_counts().iter().product()
    }

    /// Element multi-index of linear element number `e`.
    pub fn element_index(&self, e: usize) -> [usize; 3] {
        let n = self.element_counts();
        [e % n[0], (e / n[0]) % n[1], e / (n[0] * n[1])]
    }

    /// Parametric extent `[lo, hi]` per direction.
    pub fn element_bounds(&self, el: [usize; 3]) -> [[f64; 2]; 3] {
        [0, 1, 2].map(|d| {
            let s = self.spans[d][el[d]];
            let u = self.knots[d].knots();
            [u[s], u[s + 1]]
        })
    }

    pub fn local_count(&self) -> usize {
        self.degrees().iter().map(|p| p + 1).product()
    }

    /// Raw multi-indices of the element's functions in local order
    /// `a = r0 + (p0+1)(r1 + (p1+1) r2)`.
    pub fn element_raw(&self, el: [usize; 3]) -> Vec<[usize; 3]> {
        let p = self.degrees();
        let s = [0, 1, 2].map(|d| self.spans[d][el[d]]);
        let mut out = Vec::with_capacity(self.local_count());
        for r2 in 0..=p[2] {
            for r1 in 0..=p[1] {
                for r0 in 0..=p[0] {
                    out.push([s[0] - p[0] + r0, s[1] - p[1] + r1, s[2] - p[2] + r2]);
                }
            }
        }
        out
    }

    /// Global indices of the element's functions in local order.
    pub fn element_connectivity(&self, el: [usize; 3]) -> Vec<usize> {
        self.element_raw(el).into_iter().map(|m| self.global_index(m)).collect()
    }

    /// Rational basis of element `el` at parametric point `xi`.
    pub fn eval_in_element(&self, el: [usize; 3], xi: [f64; 3]) -> LocalBasis {
        let p = self.degrees();
        let mut n1: [Vec<f64>; 3] = Default::default();
        let mut d1: [Vec<f64>; 3] = Default::default();
        for d in 0..3 {
            n1[d] = vec![0.0; p[d] + 1];
            d1[d] = vec![0.0; p[d] + 1];
            self.knots[d].eval_in_span(self.spans[d][el[d]], xi[d], &mut n1[d], &mut d1[d]);
        }
        let raw = self.element_raw(el);
        let nloc = raw.len();
        let mut values = Vec::with_capacity(nloc);
        let mut grads = Vec::with_capacity(nloc);
        let (mut wsum, mut dw) = (0.0, [0.0; 3]);
        let mut a = 0;
        for r2 in 0..=p[2] {
            for r1 in 0..=p[1] {
                for r0 in 0..=p[0] {
                    let w = self.weights[self.raw_index(raw[a])];
                    let v = n1[0][r0] * n1[1][r1] * n1[2][r2];
                    let g = [
                        d1[0][r0] * n1[1][r1] * n1[2][r2],
                        n1[0][r0] * d1[1][r1] * n1[2][r2],
                        n1[0][r0] * n1[1][r1] * d1[2][r2],
                    ];
                    values.push(w * v);
                    grads.push([w * g[0], w * g[1], w * g[2]]);
                    wsum += w * v;
                    for k in 0..3 {
                        dw[k] += w * g[k];
                    }
                    a += 1;
                }
            }
        }
        for a in 0..nloc {
            let r = values[a] / wsum;
            for k in 0..3 {
                grads[a][k] = (grads[a][k] - r * dw[k]) / wsum;
            }
            values[a] = r;
        }
        LocalBasis { values, grads }
    }

    /// Element containing `xi`.
    pub fn locate(&self, xi: [f64; 3]) -> Result<[usize; 3], Error> {
        let mut el = [0; 3];
        for d in 0..3 {
            let s = self.knots[d].find_span(xi[d])?;
            el[d] = self.spans[d].iter().position(|&x| x == s).expect("span of located point");
        }
        Ok(el)
    }

    /// Rational basis at `xi` with global indices of the active functions.
    pub fn eval(&self, xi: [f64; 3]) -> Result<(Vec<usize>, LocalBasis), Error> {
        let el = self.locate(xi)?;
        Ok((self.element_connectivity(el), self.eval_in_element(el, xi)))
    }
}

/// A tensor-product NURBS space carrying a geometry (control points indexed raw).
#[derive(Clone, Debug)]
pub struct SplineVolume {
    pub space: TensorProductSpace,
    pub control_points: Vec<[f64; 3]>,
}

impl SplineVolume {
    /// Physical point and parametric Jacobian `dX/dξ` inside element `el`.
    pub fn map_in_element(&self, el: [usize; 3], basis: &LocalBasis) -> ([f64; 3], Tensor2) {
        let raw = self.space.element_raw(el);
        let mut x = [0.0; 3];
        let mut jac = Tensor2::zero();
        for (a, m) in raw.iter().enumerate() {
            let cp = self.control_points[self.space.raw_index(*m)];
            for i in 0..3 {
                x[i] += basis.values[a] * cp[i];
                for j in 0..3 {
                    jac.0[i][j] += cp[i] * basis.grads[a][j];
                }
            }
        }
        (x, jac)
    }

    /// Geometry map at `xi`; fails with `DegenerateMapping` if `det ≤ 0`.
    pub fn geometry_map(&self, xi: [f64; 3]) -> Result<([f64; 3], Tensor2), Error> {
        let el = self.space.locate(xi)?;
        let basis = self.space.eval_in_element(el, xi);
        let (x, jac) = self.map_in_element(el, &basis);
        let det = jac.det();
        if !(det > 0.0) {
            return Err(Error::DegenerateMapping(det));
        }
        Ok((x, jac))
    }
}
