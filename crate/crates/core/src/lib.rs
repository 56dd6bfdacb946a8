//! Exact symbolic computation on charts of Z-graded manifolds.
//!
//! Sections are polynomial bodies over exact rationals tensored with a
//! word-length-truncated graded symmetric algebra. On top of that sit graded
//! vector fields, their commutators, and homological vector fields encoding
//! Lie algebras, L∞ algebras and Lie algebroids.

pub mod body;
pub mod calculus;
pub mod cli;
pub mod error;
pub mod graded_linear;
pub mod q_structures;
pub mod symmetric_algebra;

pub use body::{rat, ratio, BodyPolynomial, Rational};
pub use calculus::{TangentVector, VectorField};
pub use error::{Error, Result};
pub use graded_linear::{koszul_sign, Degree, GradedDimension, Sign};
pub use q_structures::{
    algebroid_q, chevalley_eilenberg, derived_bracket, exterior_differential_chart,
    extract_linfinity, homotopy_jacobi_residual, is_homological, levi_civita, AlgebroidChartData,
    HomologicalCheck, LInfinityBrackets, LieAlgebraData,
};
pub use symmetric_algebra::{normalize, Chart, ChartMorphism, Coord, Monomial, Point, Section};
