use super::{assemble_isochoric_tangent, update_q, BranchState, Material, MaterialState, StressTangent};
use crate::kinematics::{project_deviatoric, DeformationState};

/// Modified identical-polymer-chain model:
/// `S̃^α_neq = (J^{4/3} β / 2μ) C̃^∞ : Q^α`.
pub fn stress_tangent(mat: &Material, state: &MaterialState, def: &DeformationState, dt: f64) -> StressTangent {
    let ct = &def.c_tilde;
    let eq = &mat.equilibrium;
    let s_inf = eq.stress(ct);
    let jf = def.j.powf(4.0 / 3.0);
    let c_inf = eq.dstress().scale(2.0 / jf);
    let c_inf_sq = c_inf.ddot4(&c_inf);
    let mut c_fict = c_inf;
    let mut s_tilde = s_inf;
    let mut s_neq = Vec::with_capacity(mat.branches.len());
    let mut next = Vec::with_capacity(mat.branches.len());
    for (b, h) in mat.branches.iter().zip(&state.branches) {
        let s_alpha = mat.driving_stress(b, ct, &s_inf);
        let q = update_q(b, dt, &h.s_alpha, &s_alpha, &h.q);
        let k = jf * b.beta / (2.0 * b.mu);
        let sn = c_inf.ddot2(&q).scale(k);
        s_tilde += sn;
        s_neq.push(sn);
        let delta = b.beta * b.half_decay(dt);
        // third-derivative term 2 J^{-4/3} (β/μ) (∂²S̃^∞/∂C̃² : Q)
        c_fict += eq.third_derivative_contraction(ct, &q).scale(4.0 * k / (jf * jf));
        c_fict += c_inf_sq.scale(delta * k);
        next.push(BranchState { q, s_alpha, s_hat0: h.s_hat0 });
    }
    let s_iso = project_deviatoric(def, &s_tilde);
    let c_iso = assemble_isochoric_tangent(def, &c_fict, &s_tilde, &s_iso);
    StressTangent { s_iso, c_iso, s_tilde, s_neq, state: MaterialState { branches: next } }
}
