use viscodyn::cli::{Scenario, ScenarioConfig};
use viscodyn::materials::ModelKind;
use viscodyn::cli::config::InitialCondition;
use viscodyn::timeint::{derive_parameters, linear_decay_step, update, NewtonOptions, SolutionState, Stepper};
use viscodyn::splines::GeometryTemplate;
use viscodyn::Error;

mod common;

use common::bundled;

/// Coarse 1 x 1 x 2 beam, clamped at the bottom.
fn small_beam(model: &str) -> ScenarioConfig {
    let mut cfg = bundled(&format!("beam_bending_{model}.cfg"));
    cfg.geometry = GeometryTemplate::Box { origin: [-0.5, -0.5, 0.0], lengths: [1.0, 1.0, 2.0] };
    cfg.discretization.elements = [2, 2, 2];
    cfg.time.dt = 1e-2;
    cfg
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn parameter_table() {
    for (rho, am, af) in [(1.0, 0.5, 0.5), (0.0, 1.5, 1.0), (0.5, 5.0 / 6.0, 2.0 / 3.0)] {
        let p = derive_parameters(rho).unwrap();
        assert!(close(p.alpha_m, am, 1e-15) && close(p.alpha_f, af, 1e-15) && close(p.gamma, af, 1e-15), "{p:?}");
    }
    for bad in [-0.1, 1.5, f64::NAN] {
        assert!(matches!(derive_parameters(bad), Err(Error::Config(_))));
    }
}

#[test]
fn scalar_decay_is_second_order() {
    for rho in [0.0, 0.5, 1.0] {
        let p = derive_parameters(rho).unwrap();
        let lambda = 1.0;
        let err = |n: usize| {
            let dt = 1.0 / n as f64;
            let (mut y, mut yd) = (1.0, -lambda);
            for _ in 0..n {
                (y, yd) = linear_decay_step(&p, lambda, dt, y, yd);
            }
            (y - (-lambda).exp()).abs()
        };
        let e: Vec<f64> = [40, 80, 160, 320].iter().map(|&n| err(n)).collect();
        for w in e.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((order - 2.0).abs() < 0.1, "rho = {rho}: order {order}");
        }
    }
}

#[test]
fn zero_data_stays_zero() {
    let mut cfg = small_beam("hs");
    cfg.initial = InitialCondition::Rest;
    let sc = Scenario::build(cfg).unwrap();
    let mut st = sc.stepper().unwrap();
    for _ in 0..10 {
        st.step(1e-2).unwrap();
    }
    let s = &st.state;
    let max = [&s.u, &s.v, &s.p, &s.u_dot, &s.v_dot, &s.p_dot].iter().flat_map(|f| f.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(max < 1e-14, "{max}");
    assert!(close(s.t, 0.1, 1e-14));
}

#[test]
fn rigid_free_flight() {
    let mut cfg = small_beam("mipc");
    cfg.boundary.dirichlet.clear();
    let v0 = [0.3, -0.2, 0.7];
    cfg.initial = InitialCondition::Uniform { velocity: v0 };
    let sc = Scenario::build(cfg).unwrap();
    let mut st = sc.stepper().unwrap();
    for _ in 0..20 {
        st.step(5e-2).unwrap();
    }
    let s = &st.state;
    let t = s.t;
    for a in 0..s.u.len() / 3 {
        for i in 0..3 {
            assert!(close(s.u[3 * a + i], v0[i] * t, 1e-10), "u");
            assert!(close(s.v[3 * a + i], v0[i], 1e-10), "v");
        }
    }
    assert!(s.p.iter().all(|p| p.abs() < 1e-6));
}

#[test]
fn committed_states_satisfy_update_rules() {
    let sc = Scenario::build(small_beam("hs")).unwrap();
    let mut st = sc.stepper().unwrap();
    let mask = sc.problem.dofs.constrained_mask().to_vec();
    let dt = 1e-2;
    for _ in 0..5 {
        let prev = st.state.clone();
        st.step(dt).unwrap();
        let (s, p) = (&st.state, &st.params);
        for k in 0..s.u.len() {
            assert!(close(s.v[k], update(p, dt, prev.v[k], prev.v_dot[k], s.v_dot[k]), 1e-12));
            assert!(close(s.u[k], update(p, dt, prev.u[k], prev.u_dot[k], s.u_dot[k]), 1e-12));
            if !mask[k] {
                let v_af = prev.v[k] + p.alpha_f * (s.v[k] - prev.v[k]);
                let ud = prev.u_dot[k] + (v_af - prev.u_dot[k]) / p.alpha_m;
                assert!(close(s.u_dot[k], ud, 1e-10 * (1.0 + ud.abs())));
            }
        }
        for k in 0..s.p.len() {
            assert!(close(s.p[k], update(p, dt, prev.p[k], prev.p_dot[k], s.p_dot[k]), 1e-9 * (1.0 + s.p[k].abs())));
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let run = || {
        let sc = Scenario::build(small_beam("mipc")).unwrap();
        let mut st = sc.stepper().unwrap();
        for _ in 0..10 {
            st.step(1e-2).unwrap();
        }
        (st.state.clone(), st.history.clone())
    };
    let (a, ha) = run();
    let (b, hb) = run();
    assert_eq!(a, b);
    assert_eq!(ha, hb);
}

#[test]
fn mirror_symmetry_is_preserved() {
    let sc = Scenario::build(small_beam("hs")).unwrap();
    let mut st = sc.stepper().unwrap();
    for _ in 0..5 {
        st.step(2e-2).unwrap();
    }
    let x = &sc.problem.mesh.kinematic().control_points;
    let s = &st.state;
    let scale = s.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(scale > 1e-4);
    let mut pairs = 0;
    for a in 0..x.len() {
        let b = (0..x.len())
            .find(|&b| (x[b][0] - x[a][0]).abs() < 1e-12 && (x[b][1] + x[a][1]).abs() < 1e-12 && (x[b][2] - x[a][2]).abs() < 1e-12)
            .expect("mirror partner");
        for (i, sign) in [(0, 1.0), (1, -1.0), (2, 1.0)] {
            assert!(close(s.u[3 * a + i], sign * s.u[3 * b + i], 1e-10 * scale), "u[{a}].{i}");
        }
        pairs += 1;
    }
    assert_eq!(pairs, x.len());
}

#[test]
fn failed_step_restores_state() {
    let sc = Scenario::build(small_beam("hs")).unwrap();
    let opts = NewtonOptions { max_iterations: 0, max_halvings: 2, ..NewtonOptions::default() };
    let mut st = Stepper::start(&sc.problem, sc.params, opts, sc.initial_velocity().unwrap()).unwrap();
    let before: SolutionState = st.state.clone();
    match st.step(1e-2) {
        Err(Error::StepFailed { reason, .. }) => assert!(reason.contains("converge"), "{reason}"),
        other => panic!("expected step failure, got {other:?}"),
    }
    assert_eq!(st.state, before);
    assert!(matches!(st.step(0.0), Err(Error::Config(_))));
}

#[test]
fn shear_ramp_converges_at_second_order() {
    let (order, e) = common::shear_ramp_order(ModelKind::Mipc);
    assert!((order - 2.0).abs() <= 0.2, "order {order}, errors {e:?}");
}
