//! Optimization on the indefinite Stiefel manifold {X ∈ ℝⁿˣᵏ : XᵀAX = J}.
//!
//! A is symmetric nonsingular and J symmetric involutory. The crate provides
//! the manifold structure, Euclidean/tractable/generalized canonical metrics
//! with their projections and gradients, the quasi-geodesic retraction, a
//! nonmonotone Barzilai–Borwein descent, and two benchmark problems.

pub mod bench;
pub mod error;
pub mod fixtures;
pub mod geodesics;
pub mod linalg;
pub mod manifold;
pub mod matio;
pub mod metrics;
pub mod optimizer;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use geodesics::{retract_qgeo, QuasiGeodesic, QuasiGeodesicRetraction, Retraction};
pub use linalg::{Inertia, Mat};
pub use manifold::{make_spec, ManifoldSpec, Point, TangentVector};
pub use metrics::{riemannian_gradient, Gamma3Choice, GradientReport, MetricKind};
pub use optimizer::{minimize, Objective, RunResult, SolverConfig, Status};
