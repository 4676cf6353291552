//! Conserved coarse averages, wet/dry classification, and the free-surface
//! inversion that keeps coarse and subgrid volumes equal.

use alloc::vec::Vec;

use crate::math::Vec2;
use crate::mesh::{BathymetryField, CoarseMesh, Neighbor, SubgridPartition};

/// Cells with `h̄` at or below this depth (m) are classified dry.
pub const DRY_VOLUME_DEPTH: f64 = 1e-14;

const NEWTON_MAX_ITERATIONS: u32 = 50;
const BISECTION_MAX_ITERATIONS: u32 = 200;

/// Coarse integral averages `(h̄, h̄u, h̄v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conserved {
    pub h: Vec<f64>,
    pub hu: Vec<f64>,
    pub hv: Vec<f64>,
}

impl Conserved {
    pub fn zeros(n: usize) -> Self {
        Conserved { h: alloc::vec![0.0; n], hu: alloc::vec![0.0; n], hv: alloc::vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// `Σ |T̃_m| h̄_m`.
    pub fn total_volume(&self, mesh: &CoarseMesh) -> f64 {
        self.h.iter().zip(mesh.areas()).map(|(h, a)| h * a).sum()
    }

    /// First cell holding a NaN or infinity.
    pub fn first_non_finite(&self) -> Option<usize> {
        (0..self.len())
            .find(|&m| !(self.h[m].is_finite() && self.hu[m].is_finite() && self.hv[m].is_finite()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WetState {
    Dry,
    Partial,
    Wet,
}

impl WetState {
    /// Wet or partially wet.
    pub fn has_water(self) -> bool {
        self != WetState::Dry
    }

    pub fn code(self) -> u8 {
        match self {
            WetState::Dry => 0,
            WetState::Partial => 1,
            WetState::Wet => 2,
        }
    }
}

/// Subgrid data of one coarse cell needed by the inversion.
#[derive(Debug, Clone, Copy)]
pub struct CellSubgrid<'a> {
    /// Coarse area `|T̃_m|`.
    pub area: f64,
    pub sub_areas: &'a [f64],
    /// Subcell bathymetry `d_ℓ(m,k)`.
    pub bathymetry: &'a [f64],
    /// Subcell centroid minus coarse centroid.
    pub offsets: &'a [Vec2],
    /// Raw coarse bathymetry average `d̄_m`.
    pub mean_bathymetry: f64,
}

impl<'a> CellSubgrid<'a> {
    pub fn new(
        mesh: &CoarseMesh,
        partition: &'a SubgridPartition,
        bathymetry: &'a BathymetryField,
        offsets: &'a [Vec2],
        cell: usize,
    ) -> Self {
        let range = partition.subcells(cell);
        CellSubgrid {
            area: mesh.area(cell),
            sub_areas: &partition.areas()[range.clone()],
            bathymetry: &bathymetry.subcells()[range.clone()],
            offsets: &offsets[range],
            mean_bathymetry: bathymetry.mean(cell),
        }
    }

    #[inline]
    fn shifted_bed(&self, k: usize, gradient: Vec2) -> f64 {
        self.bathymetry[k] + gradient.dot(self.offsets[k])
    }

    fn volume_and_wet_area(&self, eta: f64, gradient: Vec2) -> (f64, f64) {
        let mut volume = 0.0;
        let mut wet_area = 0.0;
        for k in 0..self.sub_areas.len() {
            let depth = eta + self.shifted_bed(k, gradient);
            if depth > 0.0 {
                volume += self.sub_areas[k] * depth;
                wet_area += self.sub_areas[k];
            }
        }
        (volume, wet_area)
    }
}

/// Result of [`invert_free_surface`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    /// Free-surface plane value at the coarse centroid.
    pub eta: f64,
    pub state: WetState,
    pub newton_iterations: u32,
    pub used_bisection: bool,
}

/// Find `η̄` such that `|T̃| h̄ = Σ_k |T_k| max(0, η̄ + ∇η·(x_k − x_m) + d_k)`.
///
/// Fully wet cells return `h̄ − d̄` in closed form. Otherwise Newton's method
/// runs on the convex, piecewise-linear volume function starting right of the
/// root, so iterates decrease monotonically; bisection is the fallback.
/// `None` signals non-convergence.
pub fn invert_free_surface(cell: &CellSubgrid<'_>, h_mean: f64, gradient: Vec2) -> Option<Inversion> {
    if !h_mean.is_finite() || !gradient.is_finite() {
        return None;
    }
    let n = cell.sub_areas.len();
    if h_mean <= DRY_VOLUME_DEPTH {
        let highest = (0..n).map(|k| cell.shifted_bed(k, gradient)).fold(f64::MIN, f64::max);
        return Some(Inversion { eta: -highest, state: WetState::Dry, newton_iterations: 0, used_bisection: false });
    }

    let mean_bed = if gradient == Vec2::ZERO {
        cell.mean_bathymetry
    } else {
        (0..n).map(|k| cell.sub_areas[k] * cell.shifted_bed(k, gradient)).sum::<f64>() / cell.area
    };
    let eta_wet = h_mean - mean_bed;
    if (0..n).all(|k| eta_wet + cell.shifted_bed(k, gradient) > 0.0) {
        return Some(Inversion { eta: eta_wet, state: WetState::Wet, newton_iterations: 0, used_bisection: false });
    }

    let target = cell.area * h_mean;
    // Relative target plus the rounding floor of summing `|T_k| (η + d_k)`.
    let bed_scale = (0..n).map(|k| cell.shifted_bed(k, gradient).abs()).fold(h_mean, f64::max);
    let tol = 1e-12 * target + 8.0 * f64::EPSILON * cell.area * bed_scale;
    let min_area = cell.sub_areas.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut eta = eta_wet;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < NEWTON_MAX_ITERATIONS {
        let (volume, wet_area) = cell.volume_and_wet_area(eta, gradient);
        let residual = target - volume;
        if residual.abs() <= tol {
            converged = true;
            break;
        }
        iterations += 1;
        let next = eta + residual / wet_area.max(min_area);
        if next == eta {
            break;
        }
        eta = next;
    }

    let mut used_bisection = false;
    if !converged {
        used_bisection = true;
        let beds = (0..n).map(|k| cell.shifted_bed(k, gradient));
        let (lowest, highest) = beds.fold((f64::MAX, f64::MIN), |(lo, hi), e| (lo.min(e), hi.max(e)));
        let (mut lo, mut hi) = (-highest, -lowest + target / min_area);
        for _ in 0..BISECTION_MAX_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            let residual = target - cell.volume_and_wet_area(mid, gradient).0;
            if residual.abs() <= tol {
                lo = mid;
                hi = mid;
                break;
            }
            if residual > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        eta = 0.5 * (lo + hi);
        if (target - cell.volume_and_wet_area(eta, gradient).0).abs() > tol {
            return None;
        }
    }

    let state = if (0..n).all(|k| eta + cell.shifted_bed(k, gradient) > 0.0) {
        WetState::Wet
    } else {
        WetState::Partial
    };
    Some(Inversion { eta, state, newton_iterations: iterations, used_bisection })
}

/// `h_ℓ(m,k) = max(0, η̄ + ∇η·(x_k − x_m) + d_k)` for every subcell.
pub fn subgrid_depths(cell: &CellSubgrid<'_>, eta: f64, gradient: Vec2, out: &mut [f64]) {
    for (k, h) in out.iter_mut().enumerate() {
        *h = (eta + cell.shifted_bed(k, gradient)).max(0.0);
    }
}

/// Coarse velocity with the thin-film cut-off: zero when `h̄ < ε_dry`.
#[inline]
pub fn cutoff_velocity(h: f64, hu: f64, hv: f64, dry_tolerance: f64) -> (f64, f64) {
    if h < dry_tolerance {
        (0.0, 0.0)
    } else {
        (hu / h, hv / h)
    }
}

/// Outcome of [`redistribute_negative_depths`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Redistribution {
    /// Cells that were negative.
    pub events: usize,
    /// Volume (m³) that could not be drawn from neighbors and was created
    /// by clamping to zero.
    pub unbalanced_volume: f64,
}

/// Lift negative coarse depths to zero by drawing the deficit from
/// face-neighbors that hold water, in proportion to their volume.
pub fn redistribute_negative_depths(h: &mut [f64], mesh: &CoarseMesh) -> Redistribution {
    let mut report = Redistribution::default();
    for m in 0..h.len() {
        if h[m] >= 0.0 {
            continue;
        }
        report.events += 1;
        let deficit = -h[m] * mesh.area(m);
        let donors = mesh.neighbors(m).map(|nb| match nb {
            Neighbor::Cell { cell, .. } if cell != m && h[cell] > 0.0 => Some(cell),
            _ => None,
        });
        let available: f64 = donors.iter().flatten().map(|&j| h[j] * mesh.area(j)).sum();
        let taken = deficit.min(available);
        if available > 0.0 {
            let keep = 1.0 - taken / available;
            for &j in donors.iter().flatten() {
                h[j] *= keep;
            }
        }
        h[m] = 0.0;
        report.unbalanced_volume += deficit - taken;
    }
    report
}
