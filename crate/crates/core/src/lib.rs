//! Cores, shell indices and degeneracy of graphons given as step functions.
//!
//! The central type is [`StepGraphon`], a symmetric kernel that is constant on
//! the cells of a finite product partition of the unit square. Every κ-core of
//! such a kernel is a union of whole blocks, so the iterative core
//! construction, the greedy peeling and the cut norm are all computed exactly
//! (up to floating point) on the block level.
//!
//! Modules:
//! - [`graphon`]: the step-graphon data model and integral operators.
//! - [`analytic`]: named analytic families and their discretization.
//! - [`kcore`]: κ-core iteration, peeling, shells and degeneracy.
//! - [`cutmetric`]: exact cut norm and cut-distance bounds.
//! - [`finite`]: finite-graph cores, sampling and the graph embedding.
//! - [`constructions`]: closed-form example families and checks.
//! - [`verify`]: seeded property sweeps over all of the above.

pub mod analytic;
pub mod constructions;
pub mod cutmetric;
pub mod error;
pub mod finite;
pub mod graphon;
pub mod kcore;
pub mod random;
pub mod verify;

pub use analytic::AnalyticGraphon;
pub use error::{GraphonError, Result};
pub use finite::FiniteGraph;
pub use graphon::{ActiveSet, Kernel, StepGraphon};
pub use kcore::{CoreDecomposition, CoreTrace};

/// Comparison tolerance for degree thresholds and set membership tests.
pub const TOL: f64 = 1e-12;

/// Tolerance for end-to-end numerical assertions.
pub const ASSERT_TOL: f64 = 1e-9;
