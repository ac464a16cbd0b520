//! Numerical verification of tensor identities on pseudo-Riemannian charts
//! and the metric cones over them.
//!
//! The library evaluates closed-form geometries through truncated Taylor
//! (jet) arithmetic, so covariant derivatives up to third order are exact up
//! to floating-point rounding.  On top of that it builds:
//!
//! * the covariant calculus of a chart: Christoffel symbols, curvature,
//!   covariant derivatives, Lie derivatives ([`geometry`]);
//! * the cone `(r, x) -> dr^2 + r^2 g` with its connection, curvature and
//!   parallel-tensor identities ([`cone`]);
//! * residual operators for the overdetermined third-order equation
//!   `DDDa + c(2 Da(Z)g(X,Y) + Da(X)g(Z,Y) + Da(Y)g(Z,X)) = 0`, the Hessian
//!   eigenfunction equation `DDa + a g = 0`, and the geodesic-equivalence
//!   equation on symmetric (0,2)-tensors ([`equations`]);
//! * numerical geodesics, parallel transport, holonomy sampling and
//!   invariant-subspace analysis of matrix sets ([`transport`]);
//! * a corpus of model geometries with known verdicts ([`corpus`]), and the
//!   acceptance battery over it ([`acceptance`]).
//!
//! Everything is deterministic: samplers are seeded, and all per-point work
//! is pure.

// Indexed loops are the natural notation for the tensor contractions here.
#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod casefile;
pub mod chart;
pub mod checks;
pub mod cone;
pub mod corpus;
pub mod equations;
pub mod error;
pub mod expr;
pub mod fd;
pub mod fields;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod report;
pub mod transport;

pub use chart::Chart;
pub use cone::ConeChart;
pub use error::{Error, Result};
pub use fields::{MetricField, ScalarField, TensorField, VectorFieldOnChart};
pub use jet::Jet;
pub use report::{ResidualReport, Verdict};
