//! Quick self-checks of the constitutive, spline and assembly layers.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::assembly::{Coefficients, Fields, Mesh, Problem};
use crate::kinematics::{build_deformation, build_from_f};
use crate::materials::{EquilibriumModel, Material, ModelKind, ViscousBranch};
use crate::oracle::tangent_error;
use crate::splines::{build_mixed_pair, GeometryTemplate};
use crate::timeint::derive_parameters;
use crate::Tensor2;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.into(), passed, detail }
}

const MODELS: [ModelKind; 3] = [ModelKind::Ipc, ModelKind::Hs, ModelKind::Mipc];

fn three_branch(kind: ModelKind, c2_ratio: f64) -> Material {
    let c1 = 1.7e7 / 6.0;
    let branches = vec![
        ViscousBranch { beta: 0.7, mu: c1, tau: 0.1 },
        ViscousBranch { beta: 0.2, mu: c1, tau: 0.5 },
        ViscousBranch { beta: 0.1, mu: c1, tau: 1.0 },
    ];
    Material::new(kind, EquilibriumModel::new(c1, c2_ratio * c1).expect("valid"), branches, 1100.0).expect("valid")
}

/// Random `F = I + A` with `|A_ij| ≤ s` and `det F > 0.3`.
pub fn random_f(rng: &mut StdRng, s: f64) -> Tensor2 {
    loop {
        let f = Tensor2::identity() + Tensor2::from_fn(|_, _| rng.random_range(-s..s));
        if f.det() > 0.3 {
            return f;
        }
    }
}

pub fn random_sym(rng: &mut StdRng, s: f64) -> Tensor2 {
    Tensor2::from_fn(|_, _| rng.random_range(-s..s)).symmetrize()
}

/// History one step away from rest plus a random `Q` offset.
pub fn random_history(material: &Material, rng: &mut StdRng) -> crate::materials::MaterialState {
    let d = build_from_f(&random_f(rng, 0.3)).expect("admissible");
    let mut st = material.stress_tangent(&material.initial_state(), &d, rng.random_range(0.005..0.5)).state;
    for b in st.branches.iter_mut() {
        b.q += random_sym(rng, 1e6);
    }
    st
}

fn tangent_checks(rng: &mut StdRng) -> Vec<Check> {
    MODELS
        .iter()
        .map(|&kind| {
            let mat = three_branch(kind, 1.0);
            let worst = (0..10)
                .map(|_| {
                    let h = random_history(&mat, rng);
                    let f = random_f(rng, 0.3);
                    tangent_error(&mat, &h, &f, rng.random_range(0.005..0.5)).unwrap_or(f64::INFINITY)
                })
                .fold(0.0, f64::max);
            check(&format!("{kind} tangent vs finite differences"), worst <= 1e-5, format!("max rel err {worst:.2e}"))
        })
        .collect()
}

fn hs_identity(rng: &mut StdRng) -> Check {
    let mat = three_branch(ModelKind::Hs, 1.0);
    let ok = (0..100).all(|_| {
        let h = random_history(&mat, rng);
        let d = build_from_f(&random_f(rng, 0.3)).expect("admissible");
        let st = mat.stress_tangent(&h, &d, rng.random_range(0.005..0.5));
        st.s_neq.iter().zip(&st.state.branches).all(|(s, b)| *s == b.q)
    });
    check("HS non-equilibrium stress equals Q", ok, "100 states, bitwise".into())
}

fn neo_hookean(rng: &mut StdRng) -> Check {
    let mat = three_branch(ModelKind::Mipc, 0.0);
    let worst = (0..20)
        .map(|_| {
            let h = random_history(&mat, rng);
            let d = build_from_f(&random_f(rng, 0.3)).expect("admissible");
            let st = mat.stress_tangent(&h, &d, 0.1);
            st.s_neq.iter().map(|s| s.norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    check("MIPC with c2 = 0 has no viscous stress", worst == 0.0, format!("max |S_neq| {worst:.1e}"))
}

fn projection(rng: &mut StdRng) -> Check {
    let worst = (0..100)
        .map(|_| {
            let d = build_deformation(&(random_f(rng, 0.4) - Tensor2::identity())).expect("admissible");
            let a = rng.random_range(-1e3..1e3);
            d.proj.ddot2(&d.c_inv.scale(a)).norm() / (1.0 + f64::abs(a))
        })
        .fold(0.0, f64::max);
    check("projection annihilates the inverse metric", worst <= 1e-12, format!("max {worst:.1e}"))
}

fn parameters() -> Check {
    let close = |r: f64, m: f64, f: f64| {
        derive_parameters(r)
            .map(|p| (p.alpha_m - m).abs() < 1e-15 && (p.alpha_f - f).abs() < 1e-15 && p.gamma == p.alpha_f)
            .unwrap_or(false)
    };
    let ok = close(1.0, 0.5, 0.5) && close(0.0, 1.5, 1.0) && close(0.5, 5.0 / 6.0, 2.0 / 3.0) && derive_parameters(1.5).is_err();
    check("generalized-alpha parameters", ok, "rho_inf in {0, 0.5, 1}".into())
}

fn splines() -> Check {
    let g = GeometryTemplate::Annulus { inner_radius: 0.1, outer_radius: 0.25, length: 0.2 };
    let pair = match build_mixed_pair(2, [2, 4, 1], &g) {
        Ok(p) => p,
        Err(e) => return check("annulus geometry is exact", false, e.to_string()),
    };
    let mut worst: f64 = 0.0;
    for k in 0..=20 {
        let xi = [0.0, k as f64 / 20.0, 0.5];
        if let Ok((x, _)) = pair.kinematic.geometry_map(xi) {
            worst = worst.max(((x[0] * x[0] + x[1] * x[1]).sqrt() - 0.1).abs());
        } else {
            worst = f64::INFINITY;
        }
        if let Ok((_, b)) = pair.kinematic.space.eval(xi) {
            worst = worst.max((b.values.iter().sum::<f64>() - 1.0).abs());
        }
    }
    check("annulus geometry is exact, partition of unity", worst <= 1e-12, format!("max err {worst:.1e}"))
}

/// Assembled Newton matrix of a one-element MIPC block against central
/// differences of the residual, sampled every seventh column.
pub fn global_tangent(rng: &mut StdRng) -> Check {
    let g = GeometryTemplate::Box { origin: [0.0; 3], lengths: [1.0, 1.0, 1.0] };
    let mesh = match build_mixed_pair(1, [1, 1, 1], &g).and_then(Mesh::new) {
        Ok(m) => m,
        Err(e) => return check("global tangent vs finite differences", false, e.to_string()),
    };
    let pb = Problem::new(mesh, three_branch(ModelKind::Mipc, 1.0), &[], &[], [0.0; 3], false).expect("valid problem");
    let nk = 3 * pb.mesh.n_kin;
    let np = pb.mesh.n_pres;
    let u: Vec<f64> = (0..nk).map(|_| rng.random_range(-0.05..0.05)).collect();
    let v: Vec<f64> = (0..nk).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a: Vec<f64> = (0..nk).map(|_| rng.random_range(-10.0..10.0)).collect();
    let p: Vec<f64> = (0..np).map(|_| rng.random_range(-1e6..1e6)).collect();
    let hist = pb.initial_history();
    let c = Coefficients::UNIT;
    let Ok(base) = pb.assemble(Fields { u: &u, v: &v, v_dot: &a, p: &p }, &hist, 0.05, Some(&c)) else {
        return check("global tangent vs finite differences", false, "assembly failed".into());
    };
    let k = pb.pattern.matrix(base.matrix.expect("tangent")).to_dense();
    let mut worst: f64 = 0.0;
    for col in (0..nk + np).step_by(7) {
        let h = if col < nk { 1e-6 } else { 1e-1 };
        let eval = |s: f64| {
            let (mut u2, mut v2, mut a2, mut p2) = (u.clone(), v.clone(), a.clone(), p.clone());
            if col < nk {
                u2[col] += s;
                v2[col] += s;
                a2[col] += s;
            } else {
                p2[col - nk] += s;
            }
            pb.assemble(Fields { u: &u2, v: &v2, v_dot: &a2, p: &p2 }, &hist, 0.05, None).map(|o| o.residual)
        };
        let (Ok(rp), Ok(rm)) = (eval(h), eval(-h)) else { return check("global tangent vs finite differences", false, "assembly failed".into()) };
        let fd: Vec<f64> = rp.iter().zip(&rm).map(|(x, y)| (x - y) / (2.0 * h)).collect();
        let scale = fd.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-30);
        for r in 0..nk + np {
            worst = worst.max((fd[r] - k[(r, col)]).abs() / scale);
        }
    }
    check("global tangent vs finite differences", worst <= 1e-5, format!("max rel err {worst:.2e}"))
}

/// All checks with a fixed seed.
pub fn run_checks() -> Vec<Check> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut out = vec![parameters(), splines(), projection(&mut rng)];
    out.extend(tangent_checks(&mut rng));
    out.push(hs_identity(&mut rng));
    out.push(neo_hookean(&mut rng));
    out.push(global_tangent(&mut rng));
    out
}
