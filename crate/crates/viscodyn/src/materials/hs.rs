use super::{assemble_isochoric_tangent, update_q, BranchState, Material, MaterialState, StressTangent};
use crate::kinematics::{project_deviatoric, DeformationState};
use crate::tensors::Tensor4;

/// Holzapfel–Simo model: `S̃^α_neq = Q^α`.
pub fn stress_tangent(mat: &Material, state: &MaterialState, def: &DeformationState, dt: f64) -> StressTangent {
    let ct = &def.c_tilde;
    let s_inf = mat.equilibrium.stress(ct);
    let j_m43 = def.j.powf(-4.0 / 3.0);
    let mut c_fict = mat.equilibrium.dstress().scale(2.0 * j_m43);
    let mut s_tilde = s_inf;
    let mut s_neq = Vec::with_capacity(mat.branches.len());
    let mut next = Vec::with_capacity(mat.branches.len());
    for (b, h) in mat.branches.iter().zip(&state.branches) {
        let s_alpha = mat.driving_stress(b, ct, &s_inf);
        let q = update_q(b, dt, &h.s_alpha, &s_alpha, &h.q);
        s_tilde += q;
        s_neq.push(q);
        c_fict += Tensor4::sym_identity().scale(2.0 * b.mu * b.half_decay(dt) * j_m43);
        next.push(BranchState { q, s_alpha, s_hat0: h.s_hat0 });
    }
    let s_iso = project_deviatoric(def, &s_tilde);
    let c_iso = assemble_isochoric_tangent(def, &c_fict, &s_tilde, &s_iso);
    StressTangent { s_iso, c_iso, s_tilde, s_neq, state: MaterialState { branches: next } }
}
