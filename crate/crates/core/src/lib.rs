//! Finite-element procedures for reaction–diffusion systems, enzymatic mechanisms,
//! chemical reaction networks and flux-balance analysis over spatial domains.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`]: domain, shape functions, exact element integration
//! * [`elem_integrals`]: element mass, diffusion and reaction operators
//! * [`network`]: species, mass-action steps, mechanism catalog, knowledge-base files
//! * [`assembly`]: global transient and Kronecker flux systems
//! * [`solvers`]: θ-scheme stepping, sparse solves, null spaces, LP and min-norm flux solves
//! * [`phenotype`]: extreme pathways, pathway coordinates, field statistics
//! * [`io`] and [`run`]: config files, VTK/CSV writers and the batch pipelines

pub mod assembly;
pub mod elem_integrals;
pub mod error;
pub mod io;
pub mod mesh;
pub mod network;
pub mod phenotype;
pub mod run;
pub mod solvers;
pub mod sparse;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
