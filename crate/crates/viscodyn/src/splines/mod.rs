//! B-spline and NURBS bases, tensor-product spaces and the mixed
//! pressure/kinematic space pair.

mod knots;
mod mixed;
mod volume;

pub use knots::{gauss_legendre, BasisEval, KnotVector};
pub use mixed::{build_mixed_pair, GeometryTemplate, MixedSpacePair};
pub use volume::{LocalBasis, NurbsSpace1D, SplineVolume, TensorProductSpace};
