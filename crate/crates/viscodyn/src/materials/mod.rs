//! Isothermal finite linear viscoelasticity on a Mooney–Rivlin equilibrium
//! energy: the stress recurrence and the IPC, HS and MIPC stress/tangent
//! algorithms.

mod hs;
mod ipc;
mod mipc;

use serde::{Deserialize, Serialize};

use crate::kinematics::{project_deviatoric, DeformationState};
use crate::tensors::{Tensor2, Tensor4};
use crate::Error;

pub use hs::stress_tangent as stress_tangent_hs;
pub use ipc::stress_tangent as stress_tangent_ipc;
pub use mipc::stress_tangent as stress_tangent_mipc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "IPC")]
    Ipc,
    #[serde(rename = "HS")]
    Hs,
    #[serde(rename = "MIPC")]
    Mipc,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Ipc => "IPC",
            ModelKind::Hs => "HS",
            ModelKind::Mipc => "MIPC",
        })
    }
}

/// `G = c₁/2 (Ĩ₁ − 3) + c₂/2 (Ĩ₂ − 3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquilibriumModel {
    pub c1: f64,
    pub c2: f64,
}

/// Energy, fictitious stress and its derivative at one `C̃`.
#[derive(Clone, Debug)]
pub struct MrDerivatives {
    pub energy: f64,
    /// `S̃^∞ = 2 ∂G/∂C̃`.
    pub stress: Tensor2,
    /// `∂S̃^∞/∂C̃`.
    pub dstress: Tensor4,
}

impl EquilibriumModel {
    pub fn new(c1: f64, c2: f64) -> Result<Self, Error> {
        if !(c1 >= 0.0 && c2 >= 0.0 && c1 + c2 > 0.0) {
            return Err(Error::Config(format!(
                "Mooney-Rivlin moduli must be non-negative and not both zero (c1 = {c1}, c2 = {c2})"
            )));
        }
        Ok(Self { c1, c2 })
    }

    pub fn energy(&self, ct: &Tensor2) -> f64 {
        let i1 = ct.trace();
        let i2 = 0.5 * (i1 * i1 - ct.dot(ct).trace());
        0.5 * self.c1 * (i1 - 3.0) + 0.5 * self.c2 * (i2 - 3.0)
    }

    pub fn stress(&self, ct: &Tensor2) -> Tensor2 {
        Tensor2::identity().scale(self.c1 + self.c2 * ct.trace()) - ct.scale(self.c2)
    }

    /// `c₂ (I ⊗ I − 𝕀)`; independent of `C̃`.
    pub fn dstress(&self) -> Tensor4 {
        let i = Tensor2::identity();
        (Tensor4::dyad(&i, &i) - Tensor4::sym_identity()).scale(self.c2)
    }

    /// `(∂²S̃^∞/∂C̃²) : A`; zero for this energy.
    pub fn third_derivative_contraction(&self, _ct: &Tensor2, _a: &Tensor2) -> Tensor4 {
        Tensor4::zero()
    }

    pub fn mr_derivatives(&self, ct: &Tensor2) -> MrDerivatives {
        MrDerivatives { energy: self.energy(ct), stress: self.stress(ct), dstress: self.dstress() }
    }
}

/// One relaxation process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViscousBranch {
    /// Energy fraction; unused by HS.
    pub beta: f64,
    pub mu: f64,
    pub tau: f64,
}

impl ViscousBranch {
    pub fn eta(&self) -> f64 {
        self.mu * self.tau
    }

    /// `e^ξ` with `ξ = −Δt / 2τ`.
    pub fn half_decay(&self, dt: f64) -> f64 {
        (-dt / (2.0 * self.tau)).exp()
    }
}

/// History of one branch at one material point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchState {
    pub q: Tensor2,
    /// Driving stress `S̃^α_iso` at the committed level.
    pub s_alpha: Tensor2,
    /// `Ŝ^α_0 = S̃^α_iso,0 − Q^α_0`.
    pub s_hat0: Tensor2,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct MaterialState {
    pub branches: Vec<BranchState>,
}

#[derive(Clone, Debug)]
pub struct StressTangent {
    pub s_iso: Tensor2,
    pub c_iso: Tensor4,
    /// Total fictitious stress `S̃^∞ + Σ S̃^α_neq`.
    pub s_tilde: Tensor2,
    pub s_neq: Vec<Tensor2>,
    pub state: MaterialState,
}

/// Second-order recurrence for `Q`:
/// `Q_{n+1} = e^ξ S_{n+1} + e^ξ (e^ξ Q_n − S_n)` with driving stresses `S`.
pub fn update_q(branch: &ViscousBranch, dt: f64, s_prev: &Tensor2, s_next: &Tensor2, q_prev: &Tensor2) -> Tensor2 {
    let e = branch.half_decay(dt);
    s_next.scale(e) + (q_prev.scale(e) - *s_prev).scale(e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Material {
    pub kind: ModelKind,
    pub equilibrium: EquilibriumModel,
    pub branches: Vec<ViscousBranch>,
    /// Reference density `ρ₀`.
    pub density: f64,
}

impl Material {
    pub fn new(kind: ModelKind, equilibrium: EquilibriumModel, branches: Vec<ViscousBranch>, density: f64) -> Result<Self, Error> {
        if !(density > 0.0) {
            return Err(Error::Config(format!("density must be positive, got {density}")));
        }
        for (i, b) in branches.iter().enumerate() {
            if !(b.mu > 0.0 && b.tau > 0.0) {
                return Err(Error::Config(format!("branch {i}: mu and tau must be positive")));
            }
            if kind != ModelKind::Hs && !(b.beta > 0.0) {
                return Err(Error::Config(format!("branch {i}: beta must be positive for {kind}")));
            }
        }
        Ok(Self { kind, equilibrium, branches, density })
    }

    /// Driving stress `S̃^α_iso`: `β S̃^∞` for IPC/MIPC, `μ(C̃ − I)` for HS.
    pub fn driving_stress(&self, branch: &ViscousBranch, ct: &Tensor2, s_inf: &Tensor2) -> Tensor2 {
        match self.kind {
            ModelKind::Hs => (*ct - Tensor2::identity()).scale(branch.mu),
            ModelKind::Ipc | ModelKind::Mipc => s_inf.scale(branch.beta),
        }
    }

    /// History at `C̃₀` with initial `Q₀` per branch.
    pub fn initial_state_with(&self, ct0: &Tensor2, q0: &[Tensor2]) -> MaterialState {
        let s_inf = self.equilibrium.stress(ct0);
        let branches = self
            .branches
            .iter()
            .zip(q0)
            .map(|(b, q)| {
                let s_alpha = self.driving_stress(b, ct0, &s_inf);
                BranchState { q: *q, s_alpha, s_hat0: s_alpha - *q }
            })
            .collect();
        MaterialState { branches }
    }

    /// History of the undeformed body with `Q₀ = O`.
    pub fn initial_state(&self) -> MaterialState {
        self.initial_state_with(&Tensor2::identity(), &vec![Tensor2::zero(); self.branches.len()])
    }

    /// Stress and isochoric tangent for the current deformation, advancing the
    /// history by `dt` from `state`.
    pub fn stress_tangent(&self, state: &MaterialState, def: &DeformationState, dt: f64) -> StressTangent {
        match self.kind {
            ModelKind::Ipc => ipc::stress_tangent(self, state, def, dt),
            ModelKind::Hs => hs::stress_tangent(self, state, def, dt),
            ModelKind::Mipc => mipc::stress_tangent(self, state, def, dt),
        }
    }

    /// Stress only; same values as [`Material::stress_tangent`].
    pub fn stress(&self, state: &MaterialState, def: &DeformationState, dt: f64) -> (Tensor2, MaterialState) {
        let ct = &def.c_tilde;
        let s_inf = self.equilibrium.stress(ct);
        let d = self.equilibrium.dstress();
        let jf = def.j.powf(4.0 / 3.0);
        let c_inf = d.scale(2.0 / jf);
        let mut s_tilde = s_inf;
        let mut next = Vec::with_capacity(self.branches.len());
        for (b, h) in self.branches.iter().zip(&state.branches) {
            let s_alpha = self.driving_stress(b, ct, &s_inf);
            let q = update_q(b, dt, &h.s_alpha, &s_alpha, &h.q);
            s_tilde += match self.kind {
                ModelKind::Hs => q,
                ModelKind::Mipc => c_inf.ddot2(&q).scale(jf * b.beta / (2.0 * b.mu)),
                ModelKind::Ipc => {
                    s_inf.scale(b.beta)
                        - c_inf.ddot2(&(s_alpha - h.s_hat0 - q)).scale(b.beta * jf / (2.0 * b.mu))
                }
            };
            next.push(BranchState { q, s_alpha, s_hat0: h.s_hat0 });
        }
        (project_deviatoric(def, &s_tilde), MaterialState { branches: next })
    }

    /// Equilibrium energy density `G^∞_iso(C̃)`.
    pub fn equilibrium_energy(&self, def: &DeformationState) -> f64 {
        self.equilibrium.energy(&def.c_tilde)
    }

    /// `Σ_α Υ^α` with `Γ^α` recovered from `Q^α`; `state` must hold `Q` at
    /// the same instant as `def`.
    pub fn branch_energy(&self, state: &MaterialState, def: &DeformationState) -> f64 {
        let ct = &def.c_tilde;
        let s_inf = self.equilibrium.stress(ct);
        let g_inf = self.equilibrium.energy(ct);
        let mut total = 0.0;
        for (b, h) in self.branches.iter().zip(&state.branches) {
            let s_alpha = self.driving_stress(b, ct, &s_inf);
            // (Γ − I)/2
            let e = (s_alpha - h.s_hat0 - h.q).scale(1.0 / (2.0 * b.mu));
            let f = match self.kind {
                ModelKind::Ipc => b.beta * g_inf,
                ModelKind::Hs | ModelKind::Mipc => (s_alpha - h.s_hat0).magnitude_sq() / (4.0 * b.mu),
            };
            total += b.mu * e.magnitude_sq() + (h.s_hat0 - s_alpha).ddot(&e) + f;
        }
        total
    }

    /// Dissipation rate density `Σ_α |Q^α|² / 2η^α`.
    pub fn dissipation_rate(&self, state: &MaterialState) -> f64 {
        self.branches
            .iter()
            .zip(&state.branches)
            .map(|(b, h)| h.q.magnitude_sq() / (2.0 * b.eta()))
            .sum()
    }
}

/// `ℙ : C̃ : ℙᵀ + ⅔ (J^{-2/3} S̃ : C) ℙ̃ − ⅔ (C⁻¹ ⊗ S_iso + S_iso ⊗ C⁻¹)`.
pub(crate) fn assemble_isochoric_tangent(def: &DeformationState, c_fict: &Tensor4, s_tilde: &Tensor2, s_iso: &Tensor2) -> Tensor4 {
    let tr = def.j_m23() * s_tilde.ddot(&def.c);
    let mut c = def.proj.ddot4(c_fict).ddot4(&def.proj.transpose());
    c += def.proj_tilde.scale(2.0 / 3.0 * tr);
    c -= (Tensor4::dyad(&def.c_inv, s_iso) + Tensor4::dyad(s_iso, &def.c_inv)).scale(2.0 / 3.0);
    c
}
