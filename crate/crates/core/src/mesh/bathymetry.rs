use alloc::vec::Vec;

use super::{CoarseMesh, SubgridPartition};
use crate::error::{Error, Result};
use crate::math::Vec2;

/// Piecewise-constant bathymetry (positive downward) on the subgrid, plus
/// the area-weighted coarse averages.
#[derive(Debug, Clone)]
pub struct BathymetryField {
    subcell: Vec<f64>,
    mean: Vec<f64>,
}

impl BathymetryField {
    /// Wrap per-subcell values (indexed by global subcell index).
    pub fn from_values(
        mesh: &CoarseMesh,
        partition: &SubgridPartition,
        subcell: Vec<f64>,
    ) -> Result<Self> {
        assert_eq!(subcell.len(), partition.num_subcells());
        if let Some(bad) = subcell.iter().position(|d| !d.is_finite()) {
            return Err(Error::NonFiniteBathymetry { subcell: bad });
        }
        let areas = partition.areas();
        let mean = (0..mesh.num_cells())
            .map(|m| {
                let weighted: f64 = partition.subcells(m).map(|l| areas[l] * subcell[l]).sum();
                weighted / mesh.area(m)
            })
            .collect();
        Ok(BathymetryField { subcell, mean })
    }

    #[inline]
    pub fn subcell(&self, l: usize) -> f64 {
        self.subcell[l]
    }

    pub fn subcells(&self) -> &[f64] {
        &self.subcell
    }

    /// Raw coarse average `d̄_m`.
    #[inline]
    pub fn mean(&self, cell: usize) -> f64 {
        self.mean[cell]
    }

    pub fn means(&self) -> &[f64] {
        &self.mean
    }
}

/// Evaluate `field` at every subcell centroid.
pub fn sample_bathymetry<F>(
    mesh: &CoarseMesh,
    partition: &SubgridPartition,
    field: F,
) -> Result<BathymetryField>
where
    F: Fn(Vec2) -> f64,
{
    let values = partition.centroids().iter().map(|&p| field(p)).collect();
    BathymetryField::from_values(mesh, partition, values)
}
