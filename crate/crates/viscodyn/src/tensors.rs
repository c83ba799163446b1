//! Dense second- and fourth-order tensors in three dimensions.
//!
//! Fourth-order tensors keep all 81 components; index `(i, j, k, l)` maps to
//! `27 i + 9 j + 3 k + l`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::Error;

/// Determinant magnitude at or below which a tensor is treated as singular.
pub const SINGULAR_DET: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Tensor2(pub [[f64; 3]; 3]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor4(pub [f64; 81]);

#[inline(always)]
fn idx(i: usize, j: usize, k: usize, l: usize) -> usize {
    27 * i + 9 * j + 3 * k + l
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

impl Tensor2 {
    pub const fn zero() -> Self {
        Tensor2([[0.0; 3]; 3])
    }

    pub const fn identity() -> Self {
        Tensor2([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Tensor2([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = f(i, j);
            }
        }
        t
    }

    /// Outer product `a ⊗ b`.
    pub fn outer(a: &[f64; 3], b: &[f64; 3]) -> Self {
        Self::from_fn(|i, j| a[i] * b[j])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn symmetrize(&self) -> Self {
        Self::from_fn(|i, j| 0.5 * (self.0[i][j] + self.0[j][i]))
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let a = &self.0;
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Determinant and inverse by cofactors.
    pub fn det_inv(&self) -> Result<(f64, Tensor2), Error> {
        let a = &self.0;
        let c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
        let c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
        let c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
        let det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
        if !(det.abs() > SINGULAR_DET) {
            return Err(Error::SingularTensor(det));
        }
        let r = 1.0 / det;
        let inv = Tensor2([
            [
                c00 * r,
                (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * r,
                (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * r,
            ],
            [
                c01 * r,
                (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * r,
                (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * r,
            ],
            [
                c02 * r,
                (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * r,
                (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * r,
            ],
        ]);
        Ok((det, inv))
    }

    /// Matrix product `self · b`.
    pub fn dot(&self, b: &Tensor2) -> Tensor2 {
        let mut c = Tensor2::zero();
        for i in 0..3 {
            for k in 0..3 {
                let aik = self.0[i][k];
                for j in 0..3 {
                    c.0[i][j] += aik * b.0[k][j];
                }
            }
        }
        c
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let a = &self.0;
        [
            a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
            a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
            a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
        ]
    }

    /// `A : B = Σ a_ij b_ij`.
    pub fn ddot(&self, b: &Tensor2) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * b.0[i][j];
            }
        }
        s
    }

    /// `tr[A Aᵀ]`.
    pub fn magnitude_sq(&self) -> f64 {
        self.ddot(self)
    }

    pub fn norm(&self) -> f64 {
        self.magnitude_sq().sqrt()
    }

    pub fn scale(&self, s: f64) -> Tensor2 {
        Self::from_fn(|i, j| s * self.0[i][j])
    }

    pub fn dyad(&self, b: &Tensor2) -> Tensor4 {
        Tensor4::dyad(self, b)
    }
}

impl Index<(usize, usize)> for Tensor2 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Tensor2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Tensor2 {
    type Output = Tensor2;
    fn add(self, b: Tensor2) -> Tensor2 {
        Tensor2::from_fn(|i, j| self.0[i][j] + b.0[i][j])
    }
}

impl Sub for Tensor2 {
    type Output = Tensor2;
    fn sub(self, b: Tensor2) -> Tensor2 {
        Tensor2::from_fn(|i, j| self.0[i][j] - b.0[i][j])
    }
}

impl Neg for Tensor2 {
    type Output = Tensor2;
    fn neg(self) -> Tensor2 {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Tensor2 {
    type Output = Tensor2;
    fn mul(self, s: f64) -> Tensor2 {
        self.scale(s)
    }
}

impl Mul<Tensor2> for f64 {
    type Output = Tensor2;
    fn mul(self, t: Tensor2) -> Tensor2 {
        t.scale(self)
    }
}

impl AddAssign for Tensor2 {
    fn add_assign(&mut self, b: Tensor2) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += b.0[i][j];
            }
        }
    }
}

impl SubAssign for Tensor2 {
    fn sub_assign(&mut self, b: Tensor2) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= b.0[i][j];
            }
        }
    }
}

impl Default for Tensor4 {
    fn default() -> Self {
        Self::zero()
    }
}

impl Tensor4 {
    pub const fn zero() -> Self {
        Tensor4([0.0; 81])
    }

    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        t.0[idx(i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    /// Symmetric identity `½(δ_ik δ_jl + δ_il δ_jk)`.
    pub fn sym_identity() -> Self {
        Self::from_fn(|i, j, k, l| 0.5 * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k)))
    }

    /// `(A ⊗ B)_ijkl = A_ij B_kl`.
    pub fn dyad(a: &Tensor2, b: &Tensor2) -> Self {
        Self::from_fn(|i, j, k, l| a.0[i][j] * b.0[k][l])
    }

    /// `(A ⊙ B)_ijkl = ½(A_ik B_jl + A_il B_jk)`.
    pub fn symdyad(a: &Tensor2, b: &Tensor2) -> Self {
        Self::from_fn(|i, j, k, l| 0.5 * (a.0[i][k] * b.0[j][l] + a.0[i][l] * b.0[j][k]))
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0[idx(i, j, k, l)]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.0[idx(i, j, k, l)] = v;
    }

    /// `(𝔸:𝔹)_ijkl = Σ_mn 𝔸_ijmn 𝔹_mnkl`.
    pub fn ddot4(&self, b: &Tensor4) -> Tensor4 {
        let mut c = Tensor4::zero();
        for ij in 0..9 {
            for mn in 0..9 {
                let a = self.0[9 * ij + mn];
                if a == 0.0 {
                    continue;
                }
                let brow = &b.0[9 * mn..9 * mn + 9];
                let crow = &mut c.0[9 * ij..9 * ij + 9];
                for kl in 0..9 {
                    crow[kl] += a * brow[kl];
                }
            }
        }
        c
    }

    /// `(𝔸:B)_ij = Σ_kl 𝔸_ijkl B_kl`.
    pub fn ddot2(&self, b: &Tensor2) -> Tensor2 {
        let mut c = Tensor2::zero();
        for ij in 0..9 {
            let mut s = 0.0;
            for kl in 0..9 {
                s += self.0[9 * ij + kl] * b.0[kl / 3][kl % 3];
            }
            c.0[ij / 3][ij % 3] = s;
        }
        c
    }

    /// `(B:𝔸)_kl = Σ_ij B_ij 𝔸_ijkl`.
    pub fn left_ddot2(&self, b: &Tensor2) -> Tensor2 {
        let mut c = Tensor2::zero();
        for ij in 0..9 {
            let bij = b.0[ij / 3][ij % 3];
            for kl in 0..9 {
                c.0[kl / 3][kl % 3] += bij * self.0[9 * ij + kl];
            }
        }
        c
    }

    /// Major transpose `𝔸ᵀ_ijkl = 𝔸_klij`.
    pub fn transpose(&self) -> Tensor4 {
        let mut t = Tensor4::zero();
        for ij in 0..9 {
            for kl in 0..9 {
                t.0[9 * kl + ij] = self.0[9 * ij + kl];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Tensor4 {
        let mut t = *self;
        t.0.iter_mut().for_each(|v| *v *= s);
        t
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Add for Tensor4 {
    type Output = Tensor4;
    fn add(mut self, b: Tensor4) -> Tensor4 {
        self += b;
        self
    }
}

impl Sub for Tensor4 {
    type Output = Tensor4;
    fn sub(mut self, b: Tensor4) -> Tensor4 {
        self -= b;
        self
    }
}

impl AddAssign for Tensor4 {
    fn add_assign(&mut self, b: Tensor4) {
        for (a, b) in self.0.iter_mut().zip(b.0.iter()) {
            *a += b;
        }
    }
}

impl SubAssign for Tensor4 {
    fn sub_assign(&mut self, b: Tensor4) {
        for (a, b) in self.0.iter_mut().zip(b.0.iter()) {
            *a -= b;
        }
    }
}

impl Mul<f64> for Tensor4 {
    type Output = Tensor4;
    fn mul(self, s: f64) -> Tensor4 {
        self.scale(s)
    }
}

impl Mul<Tensor4> for f64 {
    type Output = Tensor4;
    fn mul(self, t: Tensor4) -> Tensor4 {
        t.scale(self)
    }
}
