use viscodyn::assembly::{Coefficients, Face, Fields, Mesh, Motion, Problem, TractionLoad};
use viscodyn::materials::{EquilibriumModel, Material, ModelKind, ViscousBranch};
use viscodyn::splines::{build_mixed_pair, GeometryTemplate};

fn material(kind: ModelKind) -> Material {
    let c1 = 1.7e7 / 6.0;
    let branches = vec![
        ViscousBranch { beta: 0.7, mu: c1, tau: 0.1 },
        ViscousBranch { beta: 0.2, mu: 3.0 * c1, tau: 0.5 },
    ];
    Material::new(kind, EquilibriumModel::new(c1, 0.5 * c1).unwrap(), branches, 1100.0).unwrap()
}

fn box_mesh(p: usize, el: [usize; 3]) -> Mesh {
    let g = GeometryTemplate::Box { origin: [-0.5, -0.5, 0.0], lengths: [1.0, 1.0, 2.0] };
    Mesh::new(build_mixed_pair(p, el, &g).unwrap()).unwrap()
}

fn free_problem(kind: ModelKind, p: usize, el: [usize; 3]) -> Problem {
    Problem::new(box_mesh(p, el), material(kind), &[], &[], [0.0; 3], false).unwrap()
}

/// Deterministic pseudo-random values in `[-1, 1]`.
fn noise(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect()
}

fn control_points(pb: &Problem) -> Vec<[f64; 3]> {
    pb.mesh.kinematic().control_points.clone()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn rest_state_has_zero_residual() {
    for kind in [ModelKind::Ipc, ModelKind::Hs, ModelKind::Mipc] {
        let pb = free_problem(kind, 1, [1, 1, 2]);
        let nk = 3 * pb.mesh.n_kin;
        let z = vec![0.0; nk];
        let zp = vec![0.0; pb.mesh.n_pres];
        let f = Fields { u: &z, v: &z, v_dot: &z, p: &zp };
        let out = pb.assemble(f, &pb.initial_history(), 0.01, None).unwrap();
        assert!(out.residual.iter().all(|r| r.abs() < 1e-9), "{kind}");
    }
}

#[test]
fn rigid_velocity_is_divergence_free_at_any_deformation() {
    let pb = free_problem(ModelKind::Mipc, 1, [1, 1, 2]);
    let x = control_points(&pb);
    let nk = pb.mesh.n_kin;
    let u: Vec<f64> = noise(3 * nk, 3).iter().map(|v| 0.05 * v).collect();
    let (c, w) = ([0.3, -1.0, 2.0], [0.4, -0.7, 1.1]);
    let mut v = vec![0.0; 3 * nk];
    for a in 0..nk {
        let phi = [0, 1, 2].map(|i| x[a][i] + u[3 * a + i]);
        let wx = [w[1] * phi[2] - w[2] * phi[1], w[2] * phi[0] - w[0] * phi[2], w[0] * phi[1] - w[1] * phi[0]];
        for i in 0..3 {
            v[3 * a + i] = c[i] + wx[i];
        }
    }
    let z = vec![0.0; 3 * nk];
    let p = vec![0.0; pb.mesh.n_pres];
    let out = pb.assemble(Fields { u: &u, v: &v, v_dot: &z, p: &p }, &pb.initial_history(), 0.0, None).unwrap();
    let rp = &out.residual[3 * nk..];
    assert!(norm(rp) < 1e-12 * norm(&v), "{}", norm(rp));
}

#[test]
fn hydrostatic_pressure_balances_traction() {
    let p0 = 2.5e4;
    let faces: Vec<(Face, TractionLoad)> =
        (0..3).flat_map(|d| (0..2).map(move |s| (Face::new(d, s), TractionLoad::Pressure(p0)))).collect();
    let pb = Problem::new(box_mesh(2, [2, 1, 2]), material(ModelKind::Hs), &[], &faces, [0.0; 3], false).unwrap();
    let nk = 3 * pb.mesh.n_kin;
    let z = vec![0.0; nk];
    let p = vec![p0; pb.mesh.n_pres];
    let out = pb.assemble(Fields { u: &z, v: &z, v_dot: &z, p: &p }, &pb.initial_history(), 0.0, None).unwrap();
    let r = norm(&out.residual);
    assert!(r < 1e-9 * p0, "{r}");
}

#[test]
fn rigid_modes_annihilate_momentum_residual() {
    for kind in [ModelKind::Ipc, ModelKind::Hs, ModelKind::Mipc] {
        let pb = free_problem(kind, 1, [1, 2, 2]);
        let x = control_points(&pb);
        let nk = pb.mesh.n_kin;
        let u: Vec<f64> = noise(3 * nk, 11).iter().map(|v| 0.08 * v).collect();
        let v = noise(3 * nk, 12);
        let p: Vec<f64> = noise(pb.mesh.n_pres, 13).iter().map(|v| 1e5 * v).collect();
        let z = vec![0.0; 3 * nk];
        let out = pb.assemble(Fields { u: &u, v: &v, v_dot: &z, p: &p }, &pb.initial_history(), 0.05, None).unwrap();
        let rm = &out.residual[..3 * nk];
        let scale = rm.iter().map(|r| r.abs()).sum::<f64>();
        for i in 0..3 {
            let t: f64 = (0..nk).map(|a| rm[3 * a + i]).sum();
            assert!(t.abs() < 1e-10 * scale, "{kind} translation {i}: {t}");
            let e = [0, 1, 2].map(|k| if k == i { 1.0 } else { 0.0 });
            let rot: f64 = (0..nk)
                .map(|a| {
                    let phi = [0, 1, 2].map(|k| x[a][k] + u[3 * a + k]);
                    let m = [e[1] * phi[2] - e[2] * phi[1], e[2] * phi[0] - e[0] * phi[2], e[0] * phi[1] - e[1] * phi[0]];
                    (0..3).map(|k| m[k] * rm[3 * a + k]).sum::<f64>()
                })
                .sum();
            assert!(rot.abs() < 1e-10 * scale, "{kind} rotation {i}: {rot}");
        }
    }
}

#[test]
fn global_tangent_matches_finite_differences() {
    let coef = Coefficients { mass: 1.7, vel: 0.6, disp: 0.35, pres: 0.8 };
    for kind in [ModelKind::Ipc, ModelKind::Hs, ModelKind::Mipc] {
        let pb = free_problem(kind, 1, [1, 1, 1]);
        let nk = 3 * pb.mesh.n_kin;
        let np = pb.mesh.n_pres;
        let n = nk + np;
        let u: Vec<f64> = noise(nk, 21).iter().map(|v| 0.06 * v).collect();
        let v = noise(nk, 22);
        let a: Vec<f64> = noise(nk, 23).iter().map(|v| 10.0 * v).collect();
        let p: Vec<f64> = noise(np, 24).iter().map(|v| 1e6 * v).collect();
        let hist = pb.initial_history();
        let dt = 0.03;
        let base = pb.assemble(Fields { u: &u, v: &v, v_dot: &a, p: &p }, &hist, dt, Some(&coef)).unwrap();
        let mat = pb.pattern.matrix(base.matrix.unwrap());
        let dense = mat.to_dense();
        let eval = |x: &[f64]| {
            let (mut u2, mut v2, mut a2, mut p2) = (u.clone(), v.clone(), a.clone(), p.clone());
            for k in 0..nk {
                u2[k] += coef.disp * x[k];
                v2[k] += coef.vel * x[k];
                a2[k] += coef.mass * x[k];
            }
            for k in 0..np {
                p2[k] += coef.pres * x[nk + k];
            }
            pb.assemble(Fields { u: &u2, v: &v2, v_dot: &a2, p: &p2 }, &hist, dt, None).unwrap().residual
        };
        // per block (momentum/mass rows × velocity/pressure columns)
        let blk = |i: usize| usize::from(i >= nk);
        let mut err = [[0.0f64; 2]; 2];
        let mut mag = [[0.0f64; 2]; 2];
        for c in 0..n {
            let h = if c < nk { 1e-6 } else { 1e-1 };
            let mut x = vec![0.0; n];
            x[c] = h;
            let rp = eval(&x);
            x[c] = -h;
            let rm = eval(&x);
            for r in 0..n {
                let fd = (rp[r] - rm[r]) / (2.0 * h);
                let e = &mut err[blk(r)][blk(c)];
                *e = e.max((fd - dense[(r, c)]).abs());
                let m = &mut mag[blk(r)][blk(c)];
                *m = m.max(dense[(r, c)].abs());
            }
        }
        for (rb, cb) in [(0, 0), (0, 1), (1, 0)] {
            assert!(err[rb][cb] <= 1e-5 * mag[rb][cb], "{kind} block {rb}{cb}: {:e} vs {:e}", err[rb][cb], mag[rb][cb]);
        }
        assert_eq!(mag[1][1], 0.0);
    }
}

#[test]
fn reference_coupling_is_discrete_divergence() {
    let pb = free_problem(ModelKind::Hs, 2, [1, 1, 2]);
    let nk = 3 * pb.mesh.n_kin;
    let z = vec![0.0; nk];
    let zp = vec![0.0; pb.mesh.n_pres];
    let coef = Coefficients { mass: 0.0, vel: 1.0, disp: 1.0, pres: 1.0 };
    let out = pb.assemble(Fields { u: &z, v: &z, v_dot: &z, p: &zp }, &pb.initial_history(), 0.0, Some(&coef)).unwrap();
    let k = pb.pattern.matrix(out.matrix.unwrap()).to_dense();
    let mut div = vec![vec![0.0; pb.mesh.n_pres]; nk];
    for el in &pb.mesh.elements {
        for qp in &el.qps {
            for (a, g) in el.kin.iter().zip(&qp.gk) {
                for (c, n) in el.pres.iter().zip(&qp.np) {
                    for i in 0..3 {
                        div[3 * a + i][*c] += qp.weight * g[i] * n;
                    }
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for r in 0..nk {
        for c in 0..pb.mesh.n_pres {
            err = err.max((k[(r, nk + c)] + div[r][c]).abs());
            err = err.max((k[(nk + c, r)] - div[r][c]).abs());
        }
    }
    assert!(err < 1e-12, "{err}");
}

#[test]
fn clamped_face_constrains_all_its_control_points() {
    let mesh = box_mesh(1, [1, 1, 3]);
    let pb = Problem::new(mesh, material(ModelKind::Hs), &[(Face::new(2, 0), Motion::Clamp)], &[], [0.0; 3], false).unwrap();
    let d = pb.mesh.kinematic().space.dims();
    assert_eq!(pb.dofs.prescribed.len(), 3 * d[0] * d[1]);
    assert!(pb.dofs.apply_dirichlet(0.7).iter().all(|&(_, u, v, a)| u == 0.0 && v == 0.0 && a == 0.0));
    let x = control_points(&pb);
    assert!(pb.dofs.prescribed.iter().all(|p| x[p.dof / 3][2] == 0.0));
}

#[test]
fn sine_motion_peaks_at_quarter_period() {
    let u0 = 5.625e-3;
    let omega = 10.0;
    let m = Motion::Sine { amplitude: [u0, 0.0, 0.0], omega };
    let t = std::f64::consts::PI / (2.0 * omega);
    assert!((m.value(t)[0] - u0).abs() < 1e-18);
    assert!(m.rate(t)[0].abs() < 1e-15);
    assert_eq!(Motion::Sine { amplitude: [u0, 0.0, 0.0], omega: 0.0 }.value(3.0), [0.0; 3]);
}
