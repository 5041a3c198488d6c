//! Finite-dimensional real Hilbert-space primitives: points, convex sets
//! with metric projection, strongly positive operators, and the map
//! contracts the iterations are built from.

mod linalg;
mod maps;
mod point;
mod set;

pub use linalg::{
    damped_operator_norm_bound, strong_positivity_coefficient, symmetric_eigenvalues, Matrix,
    StrongPositiveOp, JACOBI_TOL, SYMMETRY_TOL,
};
pub use maps::{lipschitz_estimate, sample_box, ContractionMap, NonexpansiveMap, Operator};
pub use point::{inner, Point};
pub use set::{project, ConvexSet, Shape};
