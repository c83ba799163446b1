//! Isogeometric mixed finite elements for incompressible finite-strain
//! viscoelastodynamics.
//!
//! Constitutive models (IPC, HS, MIPC) sit on a Mooney–Rivlin equilibrium
//! energy; the kinematic fields use NURBS one degree above the pressure, and
//! time stepping is the generalized-α method with Newton iterations.

pub mod assembly;
pub mod cli;
pub mod diagnostics;
pub mod kinematics;
pub mod materials;
pub mod oracle;
pub mod splines;
pub mod tensors;
pub mod timeint;

pub use tensors::{Tensor2, Tensor4};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("singular tensor (det = {0:e})")]
    SingularTensor(f64),
    #[error("parametric coordinate {0} outside [0, 1]")]
    Domain(f64),
    #[error("degenerate geometry mapping (det = {0:e})")]
    DegenerateMapping(f64),
    #[error("inverted element (det F = {0:e})")]
    InvertedElement(f64),
    #[error("config error: {0}")]
    Config(String),
    #[error("linear solver failed: {0}")]
    LinearSolver(String),
    #[error("step failed at t = {t}: {reason}")]
    StepFailed { t: f64, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
