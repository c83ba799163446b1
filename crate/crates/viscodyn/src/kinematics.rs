//! Deformation measures and projection tensors at a material point.

use crate::tensors::{Tensor2, Tensor4};
use crate::Error;

/// Strain measures of `F = I + ∇U` with the isochoric/volumetric split.
#[derive(Clone, Debug)]
pub struct DeformationState {
    pub f: Tensor2,
    pub f_inv: Tensor2,
    pub j: f64,
    pub c: Tensor2,
    pub c_inv: Tensor2,
    /// `C̃ = J^{-2/3} C`.
    pub c_tilde: Tensor2,
    /// `ℙ = 𝕀 − ⅓ C⁻¹ ⊗ C`.
    pub proj: Tensor4,
    /// `ℙ̃ = C⁻¹ ⊙ C⁻¹ − ⅓ C⁻¹ ⊗ C⁻¹`.
    pub proj_tilde: Tensor4,
}

impl DeformationState {
    /// `J^{-2/3}`.
    pub fn j_m23(&self) -> f64 {
        self.j.powf(-2.0 / 3.0)
    }
}

/// Build the deformation state from a displacement gradient.
pub fn build_deformation(grad_u: &Tensor2) -> Result<DeformationState, Error> {
    build_from_f(&(Tensor2::identity() + *grad_u))
}

/// Build the deformation state from a deformation gradient.
pub fn build_from_f(f: &Tensor2) -> Result<DeformationState, Error> {
    let det = f.det();
    if !(det > 0.0) {
        return Err(Error::InvertedElement(det));
    }
    let (j, f_inv) = f.det_inv().map_err(|_| Error::InvertedElement(det))?;
    let c = f.transpose().dot(f).symmetrize();
    let c_inv = f_inv.dot(&f_inv.transpose()).symmetrize();
    let c_tilde = c.scale(j.powf(-2.0 / 3.0));
    let proj = Tensor4::sym_identity() - Tensor4::dyad(&c_inv, &c).scale(1.0 / 3.0);
    let proj_tilde = Tensor4::symdyad(&c_inv, &c_inv) - Tensor4::dyad(&c_inv, &c_inv).scale(1.0 / 3.0);
    Ok(DeformationState { f: *f, f_inv, j, c, c_inv, c_tilde, proj, proj_tilde })
}

/// `J^{-2/3} ℙ : S̃ = J^{-2/3}(S̃ − ⅓(S̃:C) C⁻¹)`.
pub fn project_deviatoric(state: &DeformationState, s_tilde: &Tensor2) -> Tensor2 {
    let tr = s_tilde.ddot(&state.c) / 3.0;
    (*s_tilde - state.c_inv.scale(tr)).scale(state.j_m23())
}
