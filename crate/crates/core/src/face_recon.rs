//! Wet/dry classification and hydrostatic reconstruction at subgrid faces.

use crate::math::Vec2;
use crate::weno::ReconstructionPlanes;

/// Values extrapolated from one cell to a subgrid face midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RawSide {
    pub eta: f64,
    /// Bathymetry of the subcell adjacent to the face.
    pub d: f64,
    /// `max(0, η + d)`.
    pub h: f64,
    pub u: f64,
    pub v: f64,
    /// Whether the adjacent subcell holds water.
    pub wet: bool,
}

/// Coarse fallback values used when the face subcell is dry.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoarseSide {
    pub eta: f64,
    /// Wet-area bathymetry average `d̄^wet`.
    pub d: f64,
}

/// Reconstruction case at a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceCase {
    /// Both wet, bathymetry jump below the depths.
    WetSmooth,
    /// Both wet, bathymetry jump exceeds a depth.
    WetStep,
    /// One dry side above the wet free surface; walls on both sides.
    WallPartial,
    /// One dry side below the wet free surface; handled as a wet face.
    Overflow,
    /// Both dry; walls on both sides.
    DryDry,
}

impl FaceCase {
    pub const ALL: [FaceCase; 5] =
        [FaceCase::WetSmooth, FaceCase::WetStep, FaceCase::WallPartial, FaceCase::Overflow, FaceCase::DryDry];

    pub fn label(self) -> &'static str {
        match self {
            FaceCase::WetSmooth => "C11",
            FaceCase::WetStep => "C12",
            FaceCase::WallPartial => "C21",
            FaceCase::Overflow => "C22",
            FaceCase::DryDry => "C3",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Whether each side sees a wall instead of a Riemann problem.
    pub fn is_wall(self) -> bool {
        matches!(self, FaceCase::WallPartial | FaceCase::DryDry)
    }
}

/// Reconstructed face values, ready for the flux evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceTrace {
    pub case: FaceCase,
    pub d_left: f64,
    pub d_right: f64,
    pub h_left: f64,
    pub h_right: f64,
    pub u_left: f64,
    pub v_left: f64,
    pub u_right: f64,
    pub v_right: f64,
}

impl FaceTrace {
    pub fn eta_left(&self) -> f64 {
        self.h_left - self.d_left
    }

    pub fn eta_right(&self) -> f64 {
        self.h_right - self.d_right
    }
}

/// Evaluate the planes of `cell` at `offset` (face midpoint minus centroid,
/// in the cell's own frame).
pub fn extrapolate_raw(
    planes: &ReconstructionPlanes,
    cell: usize,
    offset: Vec2,
    d: f64,
    subcell_depth: f64,
) -> RawSide {
    let eta = planes.eta[cell].eval(offset);
    RawSide {
        eta,
        d,
        h: (eta + d).max(0.0),
        u: planes.u[cell].eval(offset),
        v: planes.v[cell].eval(offset),
        wet: subcell_depth > 0.0,
    }
}

fn both_wet(l: RawSide, r: RawSide, case_override: Option<FaceCase>) -> FaceTrace {
    let jump = (l.d - r.d).abs();
    let (case, d, h_l, h_r) = if l.h < jump || r.h < jump {
        let d = l.d.min(r.d).max(-l.eta.min(r.eta));
        (FaceCase::WetStep, d, (l.eta + d).min(l.h).max(0.0), (r.eta + d).min(r.h).max(0.0))
    } else {
        let d = 0.5 * (l.d + r.d);
        (FaceCase::WetSmooth, d, (l.eta + d).max(0.0), (r.eta + d).max(0.0))
    };
    FaceTrace {
        case: case_override.unwrap_or(case),
        d_left: d,
        d_right: d,
        h_left: h_l,
        h_right: h_r,
        u_left: l.u,
        v_left: l.v,
        u_right: r.u,
        v_right: r.v,
    }
}

fn walls(case: FaceCase, d_l: f64, h_l: f64, d_r: f64, h_r: f64) -> FaceTrace {
    FaceTrace {
        case,
        d_left: d_l,
        d_right: d_r,
        h_left: h_l,
        h_right: h_r,
        u_left: 0.0,
        v_left: 0.0,
        u_right: 0.0,
        v_right: 0.0,
    }
}

fn wall_partial(wet: RawSide, dry: CoarseSide) -> (f64, f64, f64, f64) {
    (wet.d, wet.h, dry.d, (dry.eta + dry.d).max(0.0))
}

fn promote(dry: RawSide) -> RawSide {
    RawSide { eta: -dry.d, d: dry.d, h: 0.0, u: 0.0, v: 0.0, wet: false }
}

/// Classify a face from its two raw sides and build the reconstructed
/// bathymetry and depths. Dry sides use the coarse fallback values.
pub fn classify_and_reconstruct(
    left: RawSide,
    right: RawSide,
    coarse_left: CoarseSide,
    coarse_right: CoarseSide,
) -> FaceTrace {
    match (left.wet, right.wet) {
        (true, true) => both_wet(left, right, None),
        (true, false) => {
            if left.eta < -right.d {
                let (d_l, h_l, d_r, h_r) = wall_partial(left, coarse_right);
                walls(FaceCase::WallPartial, d_l, h_l, d_r, h_r)
            } else {
                both_wet(left, promote(right), Some(FaceCase::Overflow))
            }
        }
        (false, true) => {
            if right.eta < -left.d {
                let (d_r, h_r, d_l, h_l) = wall_partial(right, coarse_left);
                walls(FaceCase::WallPartial, d_l, h_l, d_r, h_r)
            } else {
                both_wet(promote(left), right, Some(FaceCase::Overflow))
            }
        }
        (false, false) => walls(
            FaceCase::DryDry,
            coarse_left.d,
            (coarse_left.eta + coarse_left.d).max(0.0),
            coarse_right.d,
            (coarse_right.eta + coarse_right.d).max(0.0),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn side(eta: f64, d: f64) -> RawSide {
        let h = (eta + d).max(0.0);
        RawSide { eta, d, h, u: 0.0, v: 0.0, wet: h > 0.0 }
    }

    const NO_COARSE: CoarseSide = CoarseSide { eta: 0.0, d: 0.0 };

    #[test]
    fn step_case_example() {
        let t = classify_and_reconstruct(side(-0.8, 1.0), side(0.6, -0.5), NO_COARSE, NO_COARSE);
        assert_eq!(t.case, FaceCase::WetStep);
        assert!((t.d_left - 0.8).abs() < 1e-15);
        assert!(t.h_left.abs() < 1e-15);
        assert!((t.h_right - 0.1).abs() < 1e-15);
    }

    #[test]
    fn smooth_case_averages_bathymetry() {
        let t = classify_and_reconstruct(side(0.1, 2.0), side(0.1, 1.8), NO_COARSE, NO_COARSE);
        assert_eq!(t.case, FaceCase::WetSmooth);
        assert!((t.d_left - 1.9).abs() < 1e-15);
        assert!((t.h_left - 2.0).abs() < 1e-14 && (t.h_right - 2.0).abs() < 1e-14);
    }

    #[test]
    fn wall_when_dry_side_above_surface() {
        let dry = RawSide { eta: -0.5, d: 0.2, h: 0.0, u: 1.0, v: 1.0, wet: false };
        let coarse = CoarseSide { eta: -0.3, d: 0.4 };
        let t = classify_and_reconstruct(side(-0.5, 1.0), dry, NO_COARSE, coarse);
        assert_eq!(t.case, FaceCase::WallPartial);
        assert!((t.h_left - 0.5).abs() < 1e-15 && (t.eta_left() + 0.5).abs() < 1e-15);
        assert!((t.d_right - 0.4).abs() < 1e-15 && (t.h_right - 0.1).abs() < 1e-15);
        assert_eq!(t.u_right, 0.0);
    }

    #[test]
    fn overflow_promotes_dry_side() {
        let dry = RawSide { eta: 0.0, d: 0.6, h: 0.0, u: 0.0, v: 0.0, wet: false };
        let t = classify_and_reconstruct(side(-0.5, 1.0), dry, NO_COARSE, NO_COARSE);
        assert_eq!(t.case, FaceCase::Overflow);
        assert_eq!(t.d_left, t.d_right);
        assert!(t.h_left > 0.0 && t.h_right == 0.0);
    }

    #[test]
    fn dry_dry_uses_coarse_values() {
        let dry = RawSide::default();
        let l = CoarseSide { eta: -0.2, d: 0.1 };
        let r = CoarseSide { eta: 0.3, d: 0.5 };
        let t = classify_and_reconstruct(dry, dry, l, r);
        assert_eq!(t.case, FaceCase::DryDry);
        assert_eq!((t.h_left, t.d_left), (0.0, 0.1));
        assert!((t.h_right - 0.8).abs() < 1e-15);
    }

    #[test]
    fn lake_at_rest_keeps_surface() {
        let t = classify_and_reconstruct(side(-0.4, 1.0), side(-0.4, 0.3), NO_COARSE, NO_COARSE);
        assert_eq!(t.case, FaceCase::WallPartial);
        let t = classify_and_reconstruct(side(-0.4, 1.0), side(-0.4, 0.5), NO_COARSE, NO_COARSE);
        assert_eq!(t.case, FaceCase::WetStep);
        assert!((t.eta_left() + 0.4).abs() < 1e-15 && (t.eta_right() + 0.4).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn reconstruction_nonnegative_and_symmetric(
            eta_l in -2.0f64..2.0, d_l in -2.0f64..2.0, eta_r in -2.0f64..2.0, d_r in -2.0f64..2.0,
            ce in -1.0f64..1.0, cd in -1.0f64..1.0)
        {
            let l = side(eta_l, d_l);
            let r = side(eta_r, d_r);
            let c = CoarseSide { eta: ce, d: cd };
            let a = classify_and_reconstruct(l, r, c, c);
            let b = classify_and_reconstruct(r, l, c, c);
            prop_assert!(a.h_left >= 0.0 && a.h_right >= 0.0);
            prop_assert_eq!(a.case, b.case);
            prop_assert!((a.h_left - b.h_right).abs() < 1e-14);
            prop_assert!((a.d_left - b.d_right).abs() < 1e-14);
            if !a.case.is_wall() {
                prop_assert_eq!(a.d_left, a.d_right);
            }
            if a.case == FaceCase::WetStep {
                prop_assert!(a.h_left <= l.h + 1e-14 && a.h_right <= r.h + 1e-14);
                prop_assert!(a.eta_left() + a.d_left >= 0.0);
            }
        }
    }
}
