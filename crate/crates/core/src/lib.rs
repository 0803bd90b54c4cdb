//! Continuous-time quantum-walk search on Johnson graphs J(n,k).
//!
//! The walk evolves under H = −γA − |w⟩⟨w| from the uniform superposition over all
//! k-subsets of {1,…,n}. Because J(n,k) is distance-transitive, the evolution stays
//! inside a (k+1)-dimensional invariant subspace, and [`spectral`] writes H there in
//! closed form. [`coupling`] computes the critical rate γ° and [`dynamics`] evolves
//! the reduced model exactly. [`johnson`] builds the full N-dimensional graph, used
//! only as an oracle for small N, and [`validation`] compares the two and measures
//! the asymptotic trends toward success probability one at t ≈ π√N/2.

pub mod cli;
pub mod coupling;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod johnson;
pub mod matrix;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use johnson::{GraphParams, VertexId, VertexSet, DEFAULT_FULL_CAP};
pub use matrix::SymMatrix;
