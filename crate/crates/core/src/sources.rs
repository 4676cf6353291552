//! Bathymetry and friction source terms.

use crate::math::{cbrt, sqrt, Vec2};
use crate::GRAVITY;

/// Starred values and geometry of one subgrid face as seen from a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarredFace {
    pub eta: f64,
    pub d: f64,
    pub length: f64,
    /// Outward unit normal.
    pub normal: Vec2,
}

/// Contribution `½ g (η* + η̄)(d* − d̄) |E| n` of one face to the gravity
/// source integral (not yet divided by the cell area).
#[inline]
pub fn gravity_face_term(eta_star: f64, d_star: f64, eta_mean: f64, d_mean: f64, length: f64, normal: Vec2) -> Vec2 {
    normal * (0.5 * GRAVITY * (eta_star + eta_mean) * (d_star - d_mean) * length)
}

/// Cell gravity source from the boundary integral of the starred values.
pub fn gravity_source(area: f64, eta_mean: f64, d_mean: f64, faces: &[StarredFace]) -> Vec2 {
    let mut s = Vec2::ZERO;
    for f in faces {
        s += gravity_face_term(f.eta, f.d, eta_mean, d_mean, f.length, f.normal);
    }
    s * (1.0 / area)
}

/// Hydrostatic part of the momentum flux divergence,
/// `(1/A) Σ ½ g (η*² + 2 η* d*) |E| n`.
pub fn hydrostatic_flux_sum(area: f64, faces: &[StarredFace]) -> Vec2 {
    let mut s = Vec2::ZERO;
    for f in faces {
        s += f.normal * (0.5 * GRAVITY * (f.eta * f.eta + 2.0 * f.eta * f.d) * f.length);
    }
    s * (1.0 / area)
}

/// Cell-averaged friction coefficient `g / (M² h^{1/3})` over wet subcells,
/// with `h` the subgrid depth and `M` the Manning–Strickler coefficient.
/// `None` when no subcell is wet.
pub fn friction_coefficient(sub_areas: &[f64], sub_depths: &[f64], strickler: &[f64]) -> Option<f64> {
    let mut weighted = 0.0;
    let mut wet_area = 0.0;
    for ((&a, &h), &m) in sub_areas.iter().zip(sub_depths).zip(strickler) {
        if h > 0.0 {
            weighted += a * GRAVITY / (m * m * cbrt(h));
            wet_area += a;
        }
    }
    (wet_area > 0.0).then(|| weighted / wet_area)
}

/// Converts a Manning roughness `n` (s/m^{1/3}) to the Strickler value `1/n`.
#[inline]
pub fn strickler_from_manning(n: f64) -> f64 {
    1.0 / n
}

/// Quadratic friction `−c |u| u` for velocity `u`.
#[inline]
pub fn friction_source(u: Vec2, c: f64) -> Vec2 {
    u * (-c * u.norm())
}

/// Result of [`implicit_friction_correct`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionCorrection {
    pub velocity: Vec2,
    pub iterations: u32,
    /// `false` when Newton did not converge and the closed-form ray solution
    /// was used instead.
    pub converged: bool,
}

const FRICTION_MAX_ITERATIONS: u32 = 30;

/// Solve `u = u* + Δu + Δt S_f(u)` with `S_f(u) = −c |u| u` by Newton's method,
/// where `u*` is the old momentum over the new depth and `Δu` the explicit
/// flux and gravity increment.
pub fn implicit_friction_correct(u_star: Vec2, increment: Vec2, c: f64, dt: f64) -> FrictionCorrection {
    let target = u_star + increment;
    let k = c * dt;
    if k <= 0.0 || target == Vec2::ZERO {
        return FrictionCorrection { velocity: target, iterations: 0, converged: true };
    }
    let tol = 1e-13 * (1.0 + target.norm());
    let mut u = target;
    for it in 1..=FRICTION_MAX_ITERATIONS {
        let speed = u.norm();
        let residual = target - u - u * (k * speed);
        if speed == 0.0 {
            break;
        }
        let (a, b, c2) = (
            1.0 + k * (speed + u.x * u.x / speed),
            k * u.x * u.y / speed,
            1.0 + k * (speed + u.y * u.y / speed),
        );
        let det = a * c2 - b * b;
        let step = Vec2::new((c2 * residual.x - b * residual.y) / det, (a * residual.y - b * residual.x) / det);
        u += step;
        if !u.is_finite() {
            break;
        }
        if step.norm() <= tol {
            return FrictionCorrection { velocity: u, iterations: it, converged: true };
        }
    }
    let a = k * target.norm();
    let scale = 2.0 / (1.0 + sqrt(1.0 + 4.0 * a));
    FrictionCorrection { velocity: target * scale, iterations: FRICTION_MAX_ITERATIONS, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn friction_coefficient_example() {
        let c = friction_coefficient(&[1.0, 1.0], &[1.0, 8.0], &[20.0, 20.0]).unwrap();
        assert!((c - 0.0183937).abs() < 1e-6);
        assert!(friction_coefficient(&[1.0], &[0.0], &[20.0]).is_none());
        let partial = friction_coefficient(&[1.0, 3.0], &[0.0, 1.0], &[10.0, 10.0]).unwrap();
        assert!((partial - 9.81 / 100.0).abs() < 1e-15);
    }

    #[test]
    fn implicit_friction_example() {
        let r = implicit_friction_correct(Vec2::new(1.0, 0.0), Vec2::ZERO, 0.5, 1.0);
        assert!(r.converged);
        assert!((r.velocity.x - (sqrt(3.0) - 1.0)).abs() < 1e-10);
        assert!((r.velocity.x - 0.7320508).abs() < 1e-6);
        assert_eq!(r.velocity.y, 0.0);
    }

    #[test]
    fn zero_friction_is_identity() {
        let r = implicit_friction_correct(Vec2::new(0.3, -0.1), Vec2::new(0.1, 0.2), 0.0, 1.0);
        assert_eq!(r.velocity, Vec2::new(0.4, 0.1));
    }

    #[test]
    fn gravity_source_flat_bed_vanishes() {
        let faces = [
            StarredFace { eta: 0.3, d: 1.0, length: 1.0, normal: Vec2::new(0.0, -1.0) },
            StarredFace { eta: 0.7, d: 1.0, length: 1.4142135623730951, normal: Vec2::new(0.7071067811865476, 0.7071067811865476) },
            StarredFace { eta: 0.1, d: 1.0, length: 1.0, normal: Vec2::new(-1.0, 0.0) },
        ];
        assert_eq!(gravity_source(0.5, 0.5, 1.0, &faces), Vec2::ZERO);
    }

    #[test]
    fn lake_at_rest_balance_on_triangle() {
        // Closed triangle with varying starred bathymetry, constant surface.
        let pts = [Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0), Vec2::new(0.5, 1.5)];
        let area = 0.5 * (pts[1] - pts[0]).cross(pts[2] - pts[0]);
        let ds = [0.8, 1.3, 0.95];
        let eta = -0.2;
        let faces: [StarredFace; 3] = core::array::from_fn(|e| {
            let t = pts[(e + 1) % 3] - pts[e];
            StarredFace { eta, d: ds[e], length: t.norm(), normal: Vec2::new(t.y, -t.x) * (1.0 / t.norm()) }
        });
        let total = hydrostatic_flux_sum(area, &faces) - gravity_source(area, eta, 1.07, &faces);
        assert!(total.norm() < 1e-13);
    }

    proptest! {
        #[test]
        fn implicit_friction_solves_equation(ux in -5.0f64..5.0, uy in -5.0f64..5.0,
                                            dx in -1.0f64..1.0, dy in -1.0f64..1.0,
                                            c in 0.0f64..50.0, dt in 1e-4f64..10.0) {
            let r = implicit_friction_correct(Vec2::new(ux, uy), Vec2::new(dx, dy), c, dt);
            let target = Vec2::new(ux + dx, uy + dy);
            let residual = target + friction_source(r.velocity, c) * dt - r.velocity;
            prop_assert!(residual.norm() <= 1e-9 * (1.0 + target.norm()));
            prop_assert!(r.velocity.norm() <= target.norm() + 1e-12);
            prop_assert!(r.velocity.dot(target) >= 0.0);
        }

        #[test]
        fn gravity_identity_for_constant_surface(eta in -1.0f64..1.0, d0 in -1.0f64..2.0,
                                                 d1 in -1.0f64..2.0, d2 in -1.0f64..2.0, dm in -1.0f64..2.0) {
            let pts = [Vec2::new(0.1, 0.0), Vec2::new(1.0, 0.3), Vec2::new(0.2, 0.9)];
            let area = 0.5 * (pts[1] - pts[0]).cross(pts[2] - pts[0]);
            let ds = [d0, d1, d2];
            let faces: [StarredFace; 3] = core::array::from_fn(|e| {
                let t = pts[(e + 1) % 3] - pts[e];
                StarredFace { eta, d: ds[e], length: t.norm(), normal: Vec2::new(t.y, -t.x) * (1.0 / t.norm()) }
            });
            let total = hydrostatic_flux_sum(area, &faces) - gravity_source(area, eta, dm, &faces);
            prop_assert!(total.norm() < 1e-12);
        }
    }
}
