//! Numerical fluxes at subgrid faces: HLLC with dry-bed wave speeds and the
//! impermeable-wall flux, both returning the starred face values that the
//! gravity source reuses.

use crate::math::{sqrt, Vec2};
use crate::GRAVITY;

/// Depth and Cartesian velocity on one side of a face.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SideState {
    pub h: f64,
    pub u: f64,
    pub v: f64,
}

impl SideState {
    pub const fn new(h: f64, u: f64, v: f64) -> Self {
        SideState { h, u, v }
    }
}

/// Flux through a face per unit length, with the unified starred values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxResult {
    /// `(mass, x-momentum, y-momentum)` in the Cartesian frame.
    pub flux: [f64; 3],
    pub h_star: f64,
    pub eta_star: f64,
    pub d_star: f64,
    pub s_left: f64,
    pub s_right: f64,
    /// Weight of the right state in the unified depth.
    pub alpha: f64,
}

/// Gravity part of the normal momentum flux, `½ g (η² + 2 η d)`.
#[inline]
pub fn hydrostatic_pressure(eta: f64, d: f64) -> f64 {
    0.5 * GRAVITY * (eta * eta + 2.0 * eta * d)
}

/// Physical flux `F(U)·n` (Cartesian) for a state over bathymetry `d`.
pub fn physical_flux(state: SideState, d: f64, normal: Vec2) -> [f64; 3] {
    let un = state.u * normal.x + state.v * normal.y;
    let q = state.h * un;
    let p = hydrostatic_pressure(state.h - d, d);
    [q, q * state.u + p * normal.x, q * state.v + p * normal.y]
}

/// HLL/HLLC wave speed estimates in the face-normal frame, `(S_L, S_R, S*)`.
///
/// Wet/wet uses the two-rarefaction depth estimate with shock correction;
/// a dry side uses the exact dry-front speed of the wet side.
pub fn wave_speeds(h_l: f64, u_l: f64, h_r: f64, u_r: f64) -> (f64, f64, f64) {
    let c_l = sqrt(GRAVITY * h_l.max(0.0));
    let c_r = sqrt(GRAVITY * h_r.max(0.0));
    if h_r <= 0.0 {
        let s_r = u_l + 2.0 * c_l;
        return (u_l - c_l, s_r, s_r);
    }
    if h_l <= 0.0 {
        let s_l = u_r - 2.0 * c_r;
        return (s_l, u_r + c_r, s_l);
    }
    let root = (0.5 * (c_l + c_r) + 0.25 * (u_l - u_r)).max(0.0);
    let h_mid = root * root / GRAVITY;
    let q = |h_k: f64| {
        if h_mid > h_k {
            sqrt(0.5 * (h_mid + h_k) * h_mid / (h_k * h_k))
        } else {
            1.0
        }
    };
    let s_l = u_l - c_l * q(h_l);
    let s_r = u_r + c_r * q(h_r);
    let denom = h_r * (u_r - s_r) - h_l * (u_l - s_l);
    let s_star = if denom != 0.0 {
        (s_l * h_r * (u_r - s_r) - s_r * h_l * (u_l - s_l)) / denom
    } else {
        0.5 * (u_l + u_r)
    };
    (s_l, s_r, s_star)
}

/// HLLC flux across a face with common reconstructed bathymetry `d`.
///
/// The momentum flux uses `½ g (h² − d²)`, which equals `½ g (η² + 2ηd)`
/// since both sides share `d`. When both depths vanish the flux reduces to
/// the zero-depth hydrostatic term `−½ g d² n`.
pub fn hllc_flux(left: SideState, right: SideState, d: f64, normal: Vec2) -> FluxResult {
    let (nx, ny) = (normal.x, normal.y);
    let h_l = left.h.max(0.0);
    let h_r = right.h.max(0.0);
    let un_l = left.u * nx + left.v * ny;
    let ut_l = -left.u * ny + left.v * nx;
    let un_r = right.u * nx + right.v * ny;
    let ut_r = -right.u * ny + right.v * nx;
    let half_g = 0.5 * GRAVITY;

    if h_l <= 0.0 && h_r <= 0.0 {
        let p = -half_g * d * d;
        return FluxResult {
            flux: [0.0, p * nx, p * ny],
            h_star: 0.0,
            eta_star: -d,
            d_star: d,
            s_left: 0.0,
            s_right: 0.0,
            alpha: 0.5,
        };
    }

    let normal_flux = |h: f64, un: f64, ut: f64| {
        let q = h * un;
        [q, q * un + half_g * (h * h - d * d), q * ut]
    };
    let f_l = normal_flux(h_l, un_l, ut_l);
    let f_r = normal_flux(h_r, un_r, ut_r);
    let (s_l, s_r, s_star) = wave_speeds(h_l, un_l, h_r, un_r);

    let (f, alpha) = if s_l >= 0.0 {
        (f_l, 0.0)
    } else if s_r <= 0.0 {
        (f_r, 1.0)
    } else {
        let inv = 1.0 / (s_r - s_l);
        let mass = (s_r * f_l[0] - s_l * f_r[0] + s_l * s_r * (h_r - h_l)) * inv;
        let mom = (s_r * f_l[1] - s_l * f_r[1] + s_l * s_r * (h_r * un_r - h_l * un_l)) * inv;
        let ut = if s_star >= 0.0 { ut_l } else { ut_r };
        ([mass, mom, mass * ut], s_r * inv)
    };

    let h_star = sqrt(alpha * h_r * h_r + (1.0 - alpha) * h_l * h_l);
    FluxResult {
        flux: [f[0], f[1] * nx - f[2] * ny, f[1] * ny + f[2] * nx],
        h_star,
        eta_star: h_star - d,
        d_star: d,
        s_left: s_l,
        s_right: s_r,
        alpha,
    }
}

/// Impermeable wall seen from one side: no mass flux and the hydrostatic
/// momentum flux `½ g (η² + 2ηd) n` with `η = h − d`.
pub fn wall_flux(h: f64, d: f64, normal: Vec2) -> FluxResult {
    let eta = h - d;
    let p = hydrostatic_pressure(eta, d);
    FluxResult {
        flux: [0.0, p * normal.x, p * normal.y],
        h_star: h,
        eta_star: eta,
        d_star: d,
        s_left: 0.0,
        s_right: 0.0,
        alpha: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn lake_at_rest_face() {
        let s = SideState::new(1.3, 0.0, 0.0);
        let n = Vec2::new(0.6, 0.8);
        let r = hllc_flux(s, s, 0.9, n);
        assert_eq!(r.flux[0], 0.0);
        assert!((r.alpha - 0.5).abs() < 1e-15);
        assert!((r.h_star - 1.3).abs() < 1e-15);
        assert!((r.eta_star - 0.4).abs() < 1e-15);
        let p = hydrostatic_pressure(0.4, 0.9);
        assert!((r.flux[1] - p * 0.6).abs() < 1e-14);
        assert!((r.flux[2] - p * 0.8).abs() < 1e-14);
    }

    #[test]
    fn dam_break_dry_right_speeds() {
        let r = hllc_flux(SideState::new(1.0, 0.0, 0.0), SideState::new(0.0, 0.0, 0.0), 0.0, Vec2::new(1.0, 0.0));
        let c = sqrt(9.81);
        assert!((r.s_left + 3.1321).abs() < 1e-4);
        assert!((r.s_right - 6.2642).abs() < 1e-4);
        assert!((r.s_left + c).abs() < 1e-12 && (r.s_right - 2.0 * c).abs() < 1e-12);
        // HLL closed form: mass = -S_L S_R h_L / (S_R - S_L) = 2c/3.
        assert!((r.flux[0] - 2.0 * c / 3.0).abs() < 1e-12);
    }

    #[test]
    fn wall_flux_values() {
        let n = Vec2::new(1.0, 0.0);
        let r = wall_flux(1.5, 1.0, n);
        assert_eq!(r.flux[0], 0.0);
        assert!((r.flux[1] - 6.13125).abs() < 1e-12);
        assert!((0.5 * 9.81 * (1.5f64 * 1.5 - 1.0) - 6.13125).abs() < 1e-12);
        let z = wall_flux(0.7, 0.7, Vec2::new(0.0, 1.0));
        assert_eq!(z.flux, [0.0, 0.0, 0.0]);
        let d = 0.8;
        let dry = wall_flux(0.0, d, n);
        assert!((dry.flux[1] + 0.5 * 9.81 * d * d).abs() < 1e-12);
    }

    #[test]
    fn both_dry_degenerates() {
        let r = hllc_flux(SideState::default(), SideState::default(), 0.5, Vec2::new(0.0, 1.0));
        assert_eq!(r.flux[0], 0.0);
        assert_eq!(r.h_star, 0.0);
        assert!((r.flux[2] + 0.5 * 9.81 * 0.25).abs() < 1e-14);
    }

    #[test]
    fn supersonic_is_upwind() {
        let l = SideState::new(1.0, 8.0, 0.3);
        let r = SideState::new(0.5, 7.0, -0.2);
        let n = Vec2::new(1.0, 0.0);
        let res = hllc_flux(l, r, 0.0, n);
        assert_eq!(res.alpha, 0.0);
        let exact = physical_flux(l, 0.0, n);
        for q in 0..3 {
            assert!(close(res.flux[q], exact[q], 1e-14));
        }
        assert_eq!(res.h_star, 1.0);
    }

    #[test]
    fn purely_normal_flow_has_no_tangential_flux() {
        let n = Vec2::new(0.0, 1.0);
        let res = hllc_flux(SideState::new(1.0, 0.0, 0.5), SideState::new(0.7, 0.0, 0.1), 0.2, n);
        assert_eq!(res.flux[1], 0.0);
    }

    proptest! {
        #[test]
        fn consistency(h in 0.01f64..5.0, u in -3.0f64..3.0, v in -3.0f64..3.0,
                       theta in 0.0f64..6.283, d in -1.0f64..2.0) {
            let n = Vec2::new(libm::cos(theta), libm::sin(theta));
            let s = SideState::new(h, u, v);
            let res = hllc_flux(s, s, d, n);
            let exact = physical_flux(s, d, n);
            for q in 0..3 {
                prop_assert!((res.flux[q] - exact[q]).abs() <= 1e-12 * (1.0 + exact[q].abs()));
            }
        }

        #[test]
        fn unified_depth_positive(hl in 0.0f64..3.0, hr in 0.0f64..3.0, ul in -4.0f64..4.0, ur in -4.0f64..4.0) {
            prop_assume!(hl > 0.0 || hr > 0.0);
            let res = hllc_flux(SideState::new(hl, ul, 0.0), SideState::new(hr, ur, 0.0), 0.3, Vec2::new(1.0, 0.0));
            prop_assert!((0.0..=1.0).contains(&res.alpha));
            prop_assert!(res.h_star >= 0.0 && res.h_star.is_finite());
            prop_assert!(res.flux.iter().all(|f| f.is_finite()));
        }

        #[test]
        fn mirror_antisymmetry(hl in 0.01f64..3.0, hr in 0.01f64..3.0, ul in -2.0f64..2.0, ur in -2.0f64..2.0,
                               vl in -1.0f64..1.0, vr in -1.0f64..1.0) {
            let n = Vec2::new(0.6, -0.8);
            let l = SideState::new(hl, ul, vl);
            let r = SideState::new(hr, ur, vr);
            let a = hllc_flux(l, r, 0.1, n);
            let b = hllc_flux(r, l, 0.1, -n);
            prop_assert!((a.flux[0] + b.flux[0]).abs() < 1e-12 * (1.0 + a.flux[0].abs()));
            prop_assert!((a.h_star - b.h_star).abs() < 1e-12);
        }

        #[test]
        fn pressure_forms_agree(h in 0.0f64..5.0, d in -2.0f64..2.0) {
            let eta = h - d;
            let a = hydrostatic_pressure(eta, d);
            let b = 0.5 * GRAVITY * (h * h - d * d);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }
}
