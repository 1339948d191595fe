//! Finite-dimensional operational probabilistic models: test spaces,
//! convex state sets, symmetry groups, and the machinery to verify the
//! symmetric-cone structure they induce.
//!
//! The crate represents a physical system as a pair (test space, convex
//! set of states), builds the ordered linear spaces V and V* it
//! generates, constructs group-invariant inner products, embeds outcomes
//! as orthonormal vectors, and runs a battery of verdicts: symmetry,
//! sharpness, correlation, filtering, self-duality, and homogeneity,
//! ending in a machine-checkable certificate that the effect cone is
//! symmetric. Two entropy functionals and a one-parameter family of
//! invariant forms on operator coordinates round out the toolkit.
//!
//! Exact rational arithmetic backs every polyhedral verdict; analytic
//! routes cover quantum (operator coordinates) and ball models.
//!
//! The `parallel` feature (default on) runs Monte-Carlo loops and batch
//! checks on rayon with deterministic chunked seeding; disabling it
//! falls back to sequential execution with bit-identical results.

pub mod axioms;
pub mod cone;
pub mod embedding;
pub mod entropy;
pub mod herm;
pub mod linrep;
pub mod lp;
pub mod model;
pub mod modelfile;
pub mod par;
pub mod pipeline;
pub mod rat;
pub mod symmetry;
pub mod tol;
pub mod zoo;

pub use model::{KindTag, Model, StateVec, TestSpace};
pub use tol::Tolerances;
