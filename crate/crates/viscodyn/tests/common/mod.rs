#![allow(dead_code)]

use std::path::Path;

use viscodyn::cli::config::{BoundaryConfig, BranchConfig, DirichletConfig, Discretization, InitialCondition, MaterialConfig, MotionKind, OutputConfig, SolverConfig, TimeConfig};
use viscodyn::cli::{load_scenario, Scenario, ScenarioConfig};
use viscodyn::materials::ModelKind;
use viscodyn::splines::GeometryTemplate;

pub fn bundled(name: &str) -> ScenarioConfig {
    load_scenario(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)).unwrap()
}

pub const TAU: f64 = 0.4;
pub const RAMP: f64 = 0.05;

/// Unit cube clamped at z = 0 with the top face sheared by a quarter sine
/// reaching `RAMP` at `t = 2τ`; the initial velocity matches the top rate.
/// Soft enough that every mesh mode is resolved at `Δt = τ/25`.
pub fn shear_ramp(model: ModelKind, dt: f64) -> ScenarioConfig {
    let e = 1.2e3;
    let c1 = e / 6.0;
    let omega = std::f64::consts::PI / (4.0 * TAU);
    let mu = if model == ModelKind::Ipc { 0.5 * c1 } else { 4.0 * c1 };
    ScenarioConfig {
        name: None,
        geometry: GeometryTemplate::Box { origin: [-0.5, -0.5, 0.0], lengths: [1.0, 1.0, 1.0] },
        discretization: Discretization { degree: 1, elements: [1, 1, 2] },
        material: MaterialConfig {
            model,
            density: 1100.0,
            youngs_modulus: Some(e),
            c1: None,
            c2: None,
            branches: vec![BranchConfig { beta: 1.0, mu: Some(mu), mu_over_c1: None, tau: TAU }],
        },
        initial: InitialCondition::Bending { v0: RAMP * omega, reference_length: 1.0 },
        boundary: BoundaryConfig {
            dirichlet: vec![
                DirichletConfig { face: "zmin".into(), motion: MotionKind::Clamp, amplitude: None, omega: None },
                DirichletConfig { face: "zmax".into(), motion: MotionKind::Sine, amplitude: Some([RAMP, 0.0, 0.0]), omega: Some(omega) },
            ],
            traction: vec![],
            body_force: None,
        },
        time: TimeConfig { dt, t_end: 2.0 * TAU, rho_inf: 0.5 },
        output: OutputConfig::default(),
        solver: SolverConfig { rtol: 1e-12, ..SolverConfig::default() },
    }
}

/// Displacement at `t_end`.
pub fn final_fields(cfg: ScenarioConfig) -> Vec<f64> {
    let sc = Scenario::build(cfg).unwrap();
    let mut st = sc.stepper().unwrap();
    for _ in 0..sc.num_steps() {
        st.step(sc.config.time.dt).unwrap();
    }
    st.state.u.clone()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_order(h: &[f64], e: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Observed temporal order over `Δt = τ/{25, 50, 100, 200}` against `τ/3200`.
pub fn shear_ramp_order(model: ModelKind) -> (f64, Vec<f64>) {
    let reference = final_fields(shear_ramp(model, TAU / 3200.0));
    let h: Vec<f64> = [25.0, 50.0, 100.0, 200.0].iter().map(|n| TAU / n).collect();
    let e: Vec<f64> = h.iter().map(|&dt| distance(&final_fields(shear_ramp(model, dt)), &reference)).collect();
    (fitted_order(&h, &e), e)
}
