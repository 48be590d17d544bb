//! Statistical verification of Haar-like randomness for quantum state
//! ensembles, seen through the eigenvalue moments of a fixed observable.

pub mod cli;
pub mod dirichlet;
pub mod ensembles;
pub mod error;
pub mod moments;
pub mod mub;
pub mod seed;
pub mod special;
pub mod spectrum;
pub mod stats;
pub mod unitary;
pub mod verify;

pub use dirichlet::{DirichletParams, SimplexPoint};
pub use ensembles::{EnsembleKind, EnsembleSpec, StateVector};
pub use error::{Error, Result};
pub use moments::{exact_moment, moment_bounds, required_samples, MomentBounds, MomentValue};
pub use mub::{mub_complete_set, MubBasis, MubSet};
pub use spectrum::{EigenAssignment, Permutation, Spectrum};
pub use unitary::UnitaryMatrix;
pub use verify::{Observable, RandomnessReport, Tier, Verdict};
