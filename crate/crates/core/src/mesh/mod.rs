//! Two-level mesh: unstructured coarse triangles, their uniform
//! subtriangulation, and the piecewise-constant subgrid bathymetry.

mod bathymetry;
mod coarse;
mod subgrid;

pub use bathymetry::{sample_bathymetry, BathymetryField};
pub use coarse::{build_rect_mesh, BoundaryTag, CoarseMesh, Neighbor};
pub use subgrid::{subdivide, SubgridFace, SubgridPartition};
