//! Generalized-α stepping of the first-order mixed system.

use faer::prelude::*;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::Col;

use crate::assembly::{Coefficients, Fields, Problem};
use crate::materials::MaterialState;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaParameters {
    pub rho_inf: f64,
    pub alpha_m: f64,
    pub alpha_f: f64,
    pub gamma: f64,
}

/// `α_m = ½(3 − ϱ∞)/(1 + ϱ∞)`, `α_f = γ = 1/(1 + ϱ∞)`.
pub fn derive_parameters(rho_inf: f64) -> Result<AlphaParameters, Error> {
    if !(0.0..=1.0).contains(&rho_inf) {
        return Err(Error::Config(format!("rho_inf = {rho_inf} outside [0, 1]")));
    }
    let alpha_f = 1.0 / (1.0 + rho_inf);
    Ok(AlphaParameters { rho_inf, alpha_m: 0.5 * (3.0 - rho_inf) / (1.0 + rho_inf), alpha_f, gamma: alpha_f })
}

/// `y_{n+1} = y_n + Δt ẏ_n + γΔt(ẏ_{n+1} − ẏ_n)`.
#[inline]
pub fn update(params: &AlphaParameters, dt: f64, y: f64, y_dot: f64, y_dot_next: f64) -> f64 {
    y + dt * y_dot + params.gamma * dt * (y_dot_next - y_dot)
}

/// One step of `ẏ = −λ y` with the same collocation as the mechanical system:
/// `ẏ_{n+α_m} = −λ y_{n+α_f}`.
pub fn linear_decay_step(params: &AlphaParameters, lambda: f64, dt: f64, y: f64, y_dot: f64) -> (f64, f64) {
    let AlphaParameters { alpha_m: am, alpha_f: af, gamma: g, .. } = *params;
    // (1 − α_m) ẏ_n + α_m x = −λ(y_n + α_f Δt ẏ_n + α_f γ Δt (x − ẏ_n))
    let a = am + lambda * af * g * dt;
    let b = -lambda * (y + af * dt * y_dot - af * g * dt * y_dot) - (1.0 - am) * y_dot;
    let x = b / a;
    (update(params, dt, y, y_dot, x), x)
}

/// `(U, P, V)` and their rates at one time level.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    pub u_dot: Vec<f64>,
    pub v_dot: Vec<f64>,
    pub p_dot: Vec<f64>,
}

impl SolutionState {
    pub fn zeros(problem: &Problem) -> Self {
        let nk = 3 * problem.mesh.n_kin;
        let np = problem.mesh.n_pres;
        Self {
            t: 0.0,
            u: vec![0.0; nk],
            v: vec![0.0; nk],
            p: vec![0.0; np],
            u_dot: vec![0.0; nk],
            v_dot: vec![0.0; nk],
            p_dot: vec![0.0; np],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub rtol: f64,
    pub atol: f64,
    pub max_halvings: usize,
    /// Keep the factorized matrix across iterations and steps, refreshing it
    /// when the residual contracts by less than 4× per iteration.
    pub reuse_tangent: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { max_iterations: 20, rtol: 1e-8, atol: 1e-11, max_halvings: 3, reuse_tangent: false }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepReport {
    pub substeps: usize,
    pub iterations: usize,
    /// `∫ Σ|Q|²/2η dΩ · Δt` summed over substeps, with the committed history.
    pub dissipation: f64,
}

/// Collocated fields for a trial `(V̇_{n+1}, Ṗ_{n+1})`.
struct Trial {
    next: SolutionState,
    u_af: Vec<f64>,
    v_af: Vec<f64>,
    v_dot_am: Vec<f64>,
    p_af: Vec<f64>,
}

pub struct Stepper<'a> {
    problem: &'a Problem,
    pub params: AlphaParameters,
    pub options: NewtonOptions,
    pub state: SolutionState,
    /// Committed history and the time it refers to.
    pub history: Vec<MaterialState>,
    pub t_hist: f64,
    symbolic: SymbolicLu<usize>,
    /// Factorization and the step size it was built for.
    cached: Option<(f64, Lu<usize, f64>)>,
}

fn lin_err(e: impl std::fmt::Debug) -> Error {
    Error::LinearSolver(format!("{e:?}"))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl<'a> Stepper<'a> {
    pub fn new(problem: &'a Problem, params: AlphaParameters, options: NewtonOptions, state: SolutionState) -> Result<Self, Error> {
        let symbolic = SymbolicLu::try_new(problem.pattern.symbolic().as_ref()).map_err(lin_err)?;
        let t_hist = state.t;
        Ok(Self { problem, params, options, history: problem.initial_history(), t_hist, state, symbolic, cached: None })
    }

    /// Start from rest displacement with velocity `v0`: Dirichlet data
    /// overrides `v0`, `U̇₀ = V₀`, `Ṗ₀ = 0` and `V̇₀` solves the momentum
    /// residual.
    pub fn start(problem: &'a Problem, params: AlphaParameters, options: NewtonOptions, v0: Vec<f64>) -> Result<Self, Error> {
        let mut s = SolutionState::zeros(problem);
        s.v = v0;
        let bc = problem.dofs.apply_dirichlet(0.0);
        for &(d, g, gd, _) in &bc {
            s.u[d] = g;
            s.v[d] = gd;
        }
        s.u_dot = s.v.clone();
        let history = problem.initial_history();
        let r = problem
            .assemble(Fields { u: &s.u, v: &s.v, v_dot: &s.v_dot, p: &s.p }, &history, 0.0, None)?
            .residual;
        let nk = 3 * problem.mesh.n_kin;
        let rho = problem.material.density;
        let rhs: Vec<f64> = r[..nk].iter().map(|x| -x / rho).collect();
        let fixed: Vec<(usize, f64)> = bc.iter().map(|&(d, _, _, a)| (d, a)).collect();
        s.v_dot = problem.solve_mass_with(&rhs, &fixed)?;
        Self::new(problem, params, options, s)
    }

    pub fn problem(&self) -> &Problem {
        self.problem
    }

    fn coefficients(&self, dt: f64) -> Coefficients {
        let AlphaParameters { alpha_m, alpha_f, gamma, .. } = self.params;
        let agd = alpha_f * gamma * dt;
        Coefficients { mass: alpha_m, vel: agd, disp: agd * agd / alpha_m, pres: agd }
    }

    fn derive(&self, dt: f64, v_dot: Vec<f64>, p_dot: Vec<f64>, bc: &[(usize, f64, f64, f64)]) -> Trial {
        let AlphaParameters { alpha_m: am, alpha_f: af, gamma: g, .. } = self.params;
        let s = &self.state;
        let upd = |y: f64, yd: f64, yd1: f64| update(&self.params, dt, y, yd, yd1);
        let rate = |y: f64, yd: f64, y1: f64| yd + (y1 - y - dt * yd) / (g * dt);
        let mut v_dot = v_dot;
        let mut v: Vec<f64> = (0..s.v.len()).map(|k| upd(s.v[k], s.v_dot[k], v_dot[k])).collect();
        for &(d, _, gd, _) in bc {
            v[d] = gd;
            v_dot[d] = rate(s.v[d], s.v_dot[d], gd);
        }
        let v_af: Vec<f64> = (0..v.len()).map(|k| s.v[k] + af * (v[k] - s.v[k])).collect();
        let mut u_dot: Vec<f64> = (0..v.len()).map(|k| s.u_dot[k] + (v_af[k] - s.u_dot[k]) / am).collect();
        let mut u: Vec<f64> = (0..v.len()).map(|k| upd(s.u[k], s.u_dot[k], u_dot[k])).collect();
        for &(d, gv, _, _) in bc {
            u[d] = gv;
            u_dot[d] = rate(s.u[d], s.u_dot[d], gv);
        }
        let u_af = (0..u.len()).map(|k| s.u[k] + af * (u[k] - s.u[k])).collect();
        let v_dot_am = (0..v.len()).map(|k| s.v_dot[k] + am * (v_dot[k] - s.v_dot[k])).collect();
        let p: Vec<f64> = (0..s.p.len()).map(|k| upd(s.p[k], s.p_dot[k], p_dot[k])).collect();
        let p_af = (0..p.len()).map(|k| s.p[k] + af * (p[k] - s.p[k])).collect();
        Trial { next: SolutionState { t: s.t + dt, u, v, p, u_dot, v_dot, p_dot }, u_af, v_af, v_dot_am, p_af }
    }

    /// One Newton-converged step of size `dt` without committing.
    fn try_step(&mut self, dt: f64, reuse: bool) -> Result<(SolutionState, Vec<MaterialState>, usize), Error> {
        let pb = self.problem;
        let t_next = self.state.t + dt;
        let t_af = self.state.t + self.params.alpha_f * dt;
        let dt_hist = t_af - self.t_hist;
        let bc = pb.dofs.apply_dirichlet(t_next);
        let coef = self.coefficients(dt);
        let nk = 3 * pb.mesh.n_kin;
        let fail = |reason: String| Error::StepFailed { t: t_next, reason };
        let mut trial = self.derive(dt, self.state.v_dot.clone(), self.state.p_dot.clone(), &bc);
        let (mut r0, mut prev) = (0.0, f64::INFINITY);
        let mut fresh = false;
        let mut settled = false;
        for it in 0..=self.options.max_iterations {
            let fields = Fields { u: &trial.u_af, v: &trial.v_af, v_dot: &trial.v_dot_am, p: &trial.p_af };
            let mut out = pb.assemble(fields, &self.history, dt_hist, None)?;
            pb.constrain(&mut out.residual, None);
            let rn = norm(&out.residual);
            if !rn.is_finite() {
                return Err(fail("non-finite residual".into()));
            }
            if it == 0 {
                r0 = rn;
            }
            let stagnated = fresh && it >= 2 && rn <= 1e-6 * r0 && rn > 0.5 * prev;
            if rn <= (self.options.rtol * r0).max(self.options.atol) || stagnated || settled {
                return Ok((trial.next, out.history, it));
            }
            if it == self.options.max_iterations {
                break;
            }
            let stale = match &self.cached {
                Some((h, _)) => *h != dt || rn > 0.25 * prev,
                None => true,
            };
            prev = rn;
            fresh = !reuse || stale;
            if fresh {
                self.cached = None;
                let mut full = pb.assemble(fields, &self.history, dt_hist, Some(&coef))?;
                pb.constrain(&mut full.residual, full.matrix.as_mut());
                let mat = pb.pattern.matrix(full.matrix.take().expect("tangent requested"));
                let lu = Lu::try_new_with_symbolic(self.symbolic.clone(), mat.as_ref()).map_err(lin_err)?;
                self.cached = Some((dt, lu));
            }
            let (_, lu) = self.cached.as_ref().expect("factorization available");
            let mut x = Col::<f64>::from_fn(out.residual.len(), |i| -out.residual[i]);
            lu.solve_in_place(x.as_mut());
            if !reuse {
                self.cached = None;
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(fail("singular Newton matrix".into()));
            }
            let mut v_dot = trial.next.v_dot;
            let mut p_dot = trial.next.p_dot;
            for (k, vd) in v_dot.iter_mut().enumerate() {
                *vd += x[k];
            }
            for (k, pd) in p_dot.iter_mut().enumerate() {
                *pd += x[nk + k];
            }
            let next = self.derive(dt, v_dot, p_dot, &bc);
            // Increments at roundoff level: the residual is at its noise floor.
            let small = |a: &[f64], b: &[f64]| {
                let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                d <= 1e-12 * norm(b)
            };
            settled = small(&trial.next.u, &next.next.u) && small(&trial.next.v, &next.next.v);
            trial = next;
        }
        Err(fail(format!("Newton did not converge in {} iterations", self.options.max_iterations)))
    }

    fn advance(&mut self, dt: f64, depth: usize, report: &mut StepReport) -> Result<(), Error> {
        let mut attempt = self.try_step(dt, self.options.reuse_tangent);
        if attempt.is_err() && self.options.reuse_tangent {
            self.cached = None;
            attempt = self.try_step(dt, false);
        }
        match attempt {
            Ok((next, history, its)) => {
                self.state = next;
                self.history = history;
                self.t_hist = self.state.t - (1.0 - self.params.alpha_f) * dt;
                report.substeps += 1;
                report.iterations += its;
                report.dissipation += dt * crate::diagnostics::dissipation_rate(self.problem, &self.history);
                Ok(())
            }
            Err(e) if depth < self.options.max_halvings => {
                let _ = e;
                self.advance(0.5 * dt, depth + 1, report)?;
                self.advance(0.5 * dt, depth + 1, report)
            }
            Err(Error::StepFailed { reason, .. }) => Err(Error::StepFailed { t: self.state.t + dt, reason }),
            Err(e) => Err(Error::StepFailed { t: self.state.t + dt, reason: e.to_string() }),
        }
    }

    /// Advance by `dt`, halving up to the configured depth on failure.
    pub fn step(&mut self, dt: f64) -> Result<StepReport, Error> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        let mut report = StepReport::default();
        let saved = (self.state.clone(), self.history.clone(), self.t_hist);
        if let Err(e) = self.advance(dt, 0, &mut report) {
            (self.state, self.history, self.t_hist) = saved;
            return Err(e);
        }
        Ok(report)
    }

    /// History advanced from the committed level to the current time.
    pub fn probe_history(&self) -> Result<Vec<MaterialState>, Error> {
        self.problem.advance_history(&self.state.u, &self.history, self.state.t - self.t_hist)
    }
}
