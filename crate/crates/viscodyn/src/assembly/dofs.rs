//! Unknown numbering and Dirichlet data.

use super::mesh::{Face, Mesh};

/// Prescribed rigid motion of a face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Motion {
    Clamp,
    /// `U = amplitude · sin(ω t)`.
    Sine { amplitude: [f64; 3], omega: f64 },
}

impl Motion {
    pub fn value(&self, t: f64) -> [f64; 3] {
        match *self {
            Motion::Clamp => [0.0; 3],
            Motion::Sine { amplitude, omega } => amplitude.map(|a| a * (omega * t).sin()),
        }
    }

    pub fn rate(&self, t: f64) -> [f64; 3] {
        match *self {
            Motion::Clamp => [0.0; 3],
            Motion::Sine { amplitude, omega } => amplitude.map(|a| a * omega * (omega * t).cos()),
        }
    }

    pub fn accel(&self, t: f64) -> [f64; 3] {
        match *self {
            Motion::Clamp => [0.0; 3],
            Motion::Sine { amplitude, omega } => amplitude.map(|a| -a * omega * omega * (omega * t).sin()),
        }
    }
}

/// Prescribed kinematic dof with its motion and component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prescribed {
    pub dof: usize,
    pub component: usize,
    pub motion: usize,
}

/// Layout: `3a + i` for kinematic function `a`, component `i`, then one
/// pressure per pressure function.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub n_kin: usize,
    pub n_pres: usize,
    pub motions: Vec<Motion>,
    pub prescribed: Vec<Prescribed>,
    /// Constrained pressure dof (pure-Dirichlet problems only).
    pub pinned_pressure: Option<usize>,
    mask: Vec<bool>,
}

impl DofMap {
    pub fn new(mesh: &Mesh, faces: &[(Face, Motion)], pin_pressure: bool) -> Self {
        let n_kin = mesh.n_kin;
        let n = mesh.num_dofs();
        let mut owner = vec![None; 3 * n_kin];
        let mut motions = Vec::new();
        for (face, motion) in faces {
            let m = motions.len();
            motions.push(*motion);
            for a in mesh.face_functions(*face) {
                for i in 0..3 {
                    owner[3 * a + i] = Some(m);
                }
            }
        }
        let prescribed: Vec<Prescribed> = owner
            .iter()
            .enumerate()
            .filter_map(|(dof, m)| m.map(|motion| Prescribed { dof, component: dof % 3, motion }))
            .collect();
        let pinned_pressure = pin_pressure.then_some(3 * n_kin);
        let mut mask = vec![false; n];
        for p in &prescribed {
            mask[p.dof] = true;
        }
        if let Some(p) = pinned_pressure {
            mask[p] = true;
        }
        Self { n_kin, n_pres: mesh.n_pres, motions, prescribed, pinned_pressure, mask }
    }

    pub fn num_dofs(&self) -> usize {
        3 * self.n_kin + self.n_pres
    }

    pub fn pressure_offset(&self) -> usize {
        3 * self.n_kin
    }

    /// True for rows replaced by identity in the Newton system.
    pub fn is_constrained(&self, dof: usize) -> bool {
        self.mask[dof]
    }

    pub fn constrained_mask(&self) -> &[bool] {
        &self.mask
    }

    /// Prescribed `(dof, U, V, V̇)` at time `t`.
    pub fn apply_dirichlet(&self, t: f64) -> Vec<(usize, f64, f64, f64)> {
        self.prescribed
            .iter()
            .map(|p| {
                let m = &self.motions[p.motion];
                let c = p.component;
                (p.dof, m.value(t)[c], m.rate(t)[c], m.accel(t)[c])
            })
            .collect()
    }
}
