//! Exact computation with finitely generated nilpotent groups given by
//! consistent polycyclic presentations, generalized free products of such
//! groups, and machine-checkable evidence of residual solvability.

pub mod abelian;
pub mod amalgam;
pub mod central;
pub mod certificate;
pub mod error;
pub mod malcev;
pub mod pc;
pub mod residual;
pub mod target;
pub mod word;
pub mod workspace;
pub mod zmatrix;

pub use error::{Error, Result};

/// Commutator and conjugation conventions used everywhere in this crate.
pub const CONVENTION: &str = "[u,v] = u^-1*v^-1*u*v; u^v = v^-1*u*v";
