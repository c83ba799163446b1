//! Brute-force references for tests: hereditary-integral convolution,
//! finite-difference tangents and a dense Gaussian elimination.

use crate::kinematics::build_from_f;
use crate::materials::{Material, MaterialState};
use crate::tensors::{Tensor2, Tensor4};
use crate::Error;

/// Sampled history of `C̃`, starting at `t = 0`.
#[derive(Clone, Debug)]
pub struct StrainHistory {
    times: Vec<f64>,
    c_tilde: Vec<Tensor2>,
}

impl StrainHistory {
    pub fn new(times: Vec<f64>, c_tilde: Vec<Tensor2>) -> Result<Self, Error> {
        if times.len() != c_tilde.len() || times.len() < 2 {
            return Err(Error::Config("history needs matching times and samples".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("history times must be strictly increasing".into()));
        }
        if let Some(c) = c_tilde.iter().find(|c| (c.det() - 1.0).abs() > 1e-10) {
            return Err(Error::Config(format!("history sample with det = {}", c.det())));
        }
        Ok(Self { times, c_tilde })
    }

    /// Sample `f` on `n` uniform intervals of `[0, t_end]`.
    pub fn sample(t_end: f64, n: usize, f: impl Fn(f64) -> Tensor2) -> Result<Self, Error> {
        let times: Vec<f64> = (0..=n).map(|k| t_end * k as f64 / n as f64).collect();
        let c = times.iter().map(|&t| f(t)).collect();
        Self::new(times, c)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[Tensor2] {
        &self.c_tilde
    }
}

/// `Q(T) = ∫₀ᵀ exp(−(T−s)/τ) dS/ds ds` for sampled driving stresses, with
/// `Q₀ = O`, by the trapezoidal rule.
pub fn convolve_stress(times: &[f64], stresses: &[Tensor2], tau: f64) -> Tensor2 {
    let t_end = *times.last().unwrap();
    let kernel = |s: f64| (-(t_end - s) / tau).exp();
    let mut q = Tensor2::zero();
    for k in 0..times.len() - 1 {
        let w = 0.5 * (kernel(times[k]) + kernel(times[k + 1]));
        q += (stresses[k + 1] - stresses[k]).scale(w);
    }
    q
}

/// Hereditary integral for branch `alpha` of `material` along `history`.
pub fn convolve_q(material: &Material, alpha: usize, history: &StrainHistory) -> Tensor2 {
    let b = &material.branches[alpha];
    let drive: Vec<Tensor2> = history
        .c_tilde
        .iter()
        .map(|c| material.driving_stress(b, c, &material.equilibrium.stress(c)))
        .collect();
    convolve_stress(&history.times, &drive, b.tau)
}

/// Centered-difference tangent `2 ∂S/∂C` of a stress map, perturbing `C`
/// symmetrically in each index pair.
pub fn fd_tangent(stress: impl Fn(&Tensor2) -> Tensor2, c: &Tensor2, h: f64) -> Tensor4 {
    let mut out = Tensor4::zero();
    for k in 0..3 {
        for l in k..3 {
            let mut dc = Tensor2::zero();
            dc[(k, l)] += 0.5 * h;
            dc[(l, k)] += 0.5 * h;
            let sp = stress(&(*c + dc));
            let sm = stress(&(*c - dc));
            let d = (sp - sm).scale(1.0 / h);
            for i in 0..3 {
                for j in 0..3 {
                    out.set(i, j, k, l, d[(i, j)]);
                    out.set(i, j, l, k, d[(i, j)]);
                }
            }
        }
    }
    out
}

/// Upper-triangular `F` with `FᵀF = C` (Cholesky) for SPD `C`.
pub fn f_from_c(c: &Tensor2) -> Tensor2 {
    let mut l = Tensor2::zero();
    for i in 0..3 {
        for j in 0..=i {
            let mut s = c[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = if i == j { s.sqrt() } else { s / l[(j, j)] };
        }
    }
    l.transpose()
}

/// Relative distance between the isochoric tangent at `F` and the centered
/// finite difference of the isochoric stress.
pub fn tangent_error(material: &Material, state: &MaterialState, f: &Tensor2, dt: f64) -> Result<f64, Error> {
    let def = build_from_f(f)?;
    let st = material.stress_tangent(state, &def, dt);
    let fd = fd_tangent(
        |c| {
            let d = build_from_f(&f_from_c(c)).expect("perturbed metric stays admissible");
            material.stress_tangent(state, &d, dt).s_iso
        },
        &def.c,
        1e-6,
    );
    Ok((st.c_iso - fd).norm() / fd.norm())
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, Error> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col] == 0.0 {
            return Err(Error::LinearSolver(format!("zero pivot in column {col}")));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Ok(x)
}
