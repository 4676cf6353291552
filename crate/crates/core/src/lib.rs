//! Subgrid finite-volume solver for the two-dimensional shallow water
//! equations on unstructured triangular meshes.
//!
//! Conserved variables `(h, hu, hv)` live on a coarse triangle mesh, while
//! the bathymetry is stored piecewise constant on a uniform subtriangulation
//! of every coarse cell. Fluxes are evaluated once per subgrid face lying on
//! a coarse edge, so the per-step work grows with `n_sg` rather than
//! `n_sg²`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and the
//! benchmark cases live in the `subswe` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod face_recon;
pub mod math;
pub mod mesh;
pub mod riemann;
pub mod sources;
pub mod state;
pub mod stepper;
pub mod weno;

pub use error::{Error, Result};
pub use mesh::{
    build_rect_mesh, sample_bathymetry, subdivide, BathymetryField, BoundaryTag, CoarseMesh,
    Neighbor, SubgridPartition,
};
pub use state::{Conserved, WetState};
pub use stepper::{BoundaryKind, BoundarySpec, Solver, StepConfig};

/// Gravitational acceleration in m/s².
pub const GRAVITY: f64 = 9.81;

/// Default velocity cut-off depth in m.
pub const DEFAULT_DRY_TOLERANCE: f64 = 1e-4;
