//! Analytic and manufactured solutions of the benchmark cases.

use std::f64::consts::PI;

use subswe_core::math::Vec2;
use subswe_core::GRAVITY;

/// MacDonald-type steady flow: channel length, discharge and roughness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacDonald {
    pub length: f64,
    pub discharge: f64,
    pub manning: f64,
}

impl Default for MacDonald {
    fn default() -> Self {
        MacDonald { length: 5000.0, discharge: 2.0, manning: 0.03 }
    }
}

impl MacDonald {
    /// Manufactured depth `h_e(x) = 9/8 + ¼ sin(πx/500)`.
    pub fn depth(&self, x: f64) -> f64 {
        9.0 / 8.0 + 0.25 * (PI * x / 500.0).sin()
    }

    pub fn depth_slope(&self, x: f64) -> f64 {
        0.25 * PI / 500.0 * (PI * x / 500.0).cos()
    }

    /// Bed slope `d'(x)` that keeps `(h_e, q)` steady under Manning friction.
    pub fn bed_slope(&self, x: f64) -> f64 {
        let h = self.depth(x);
        let q = self.discharge;
        let n = self.manning;
        self.depth_slope(x) * (1.0 - q * q / (GRAVITY * h * h * h)) + n * n * q * q / h.powf(10.0 / 3.0)
    }

    /// Integrate the bed with classical RK4 at spacing `dx`, `d(0) = 0`.
    pub fn bathymetry(&self, dx: f64) -> BedProfile {
        let steps = (self.length / dx).ceil() as usize;
        let dx = self.length / steps as f64;
        let mut d = Vec::with_capacity(steps + 1);
        let mut value = 0.0;
        d.push(value);
        for i in 0..steps {
            let x = i as f64 * dx;
            let k1 = self.bed_slope(x);
            let k2 = self.bed_slope(x + 0.5 * dx);
            let k4 = self.bed_slope(x + dx);
            value += dx / 6.0 * (k1 + 4.0 * k2 + k4);
            d.push(value);
        }
        BedProfile { dx, values: d }
    }
}

/// Bathymetry `d(x)` tabulated on a uniform grid starting at `x = 0`,
/// evaluated by linear interpolation and clamped at the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct BedProfile {
    pub dx: f64,
    pub values: Vec<f64>,
}

impl BedProfile {
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        let s = (x / self.dx).clamp(0.0, last as f64);
        let i = (s.floor() as usize).min(last.saturating_sub(1));
        let t = s - i as f64;
        self.values[i] * (1.0 - t) + self.values[(i + 1).min(last)] * t
    }
}

/// Radially symmetric periodic solution in a paraboloid bowl
/// `d = b0 (1 − r²/a²)` centered in a square of side `side`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thacker {
    pub a: f64,
    pub b0: f64,
    pub r0: f64,
    pub side: f64,
}

impl Default for Thacker {
    fn default() -> Self {
        Thacker { a: 1.0, b0: 0.1, r0: 0.8, side: 4.0 }
    }
}

impl Thacker {
    pub fn amplitude_factor(&self) -> f64 {
        let (a2, r2) = (self.a * self.a, self.r0 * self.r0);
        (a2 - r2) / (a2 + r2)
    }

    pub fn omega(&self) -> f64 {
        (8.0 * GRAVITY * self.b0).sqrt() / self.a
    }

    /// Period of the analytic solution, `2π/ω`.
    pub fn natural_period(&self) -> f64 {
        2.0 * PI / self.omega()
    }

    /// Simulation period convention `3·2π/ω`.
    pub fn run_period(&self) -> f64 {
        3.0 * self.natural_period()
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(0.5 * self.side, 0.5 * self.side)
    }

    fn r2(&self, p: Vec2) -> f64 {
        (p - self.center()).norm2()
    }

    pub fn bathymetry(&self, p: Vec2) -> f64 {
        self.b0 * (1.0 - self.r2(p) / (self.a * self.a))
    }

    pub fn eta(&self, p: Vec2, t: f64) -> f64 {
        let aa = self.amplitude_factor();
        let den = 1.0 - aa * (self.omega() * t).cos();
        let s = (1.0 - aa * aa).sqrt();
        self.b0 * (s / den - 1.0 - self.r2(p) / (self.a * self.a) * ((1.0 - aa * aa) / (den * den) - 1.0))
    }

    pub fn depth(&self, p: Vec2, t: f64) -> f64 {
        (self.eta(p, t) + self.bathymetry(p)).max(0.0)
    }

    pub fn velocity(&self, p: Vec2, t: f64) -> Vec2 {
        let aa = self.amplitude_factor();
        let w = self.omega();
        let f = 0.5 * w * aa * (w * t).sin() / (1.0 - aa * (w * t).cos());
        (p - self.center()) * f
    }
}

/// Floodplain with a meandering channel and two deep end basins; returns
/// the bed elevation `z` (the bathymetry is `d = −z`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floodplain {
    pub shift: f64,
    pub amplitude: f64,
    pub wavelength: f64,
    pub channel_width: f64,
}

impl Default for Floodplain {
    fn default() -> Self {
        Floodplain { shift: -3.2, amplitude: 100.0, wavelength: 1000.0, channel_width: 20.0 }
    }
}

impl Floodplain {
    pub fn channel_center(&self, x: f64) -> f64 {
        self.amplitude * ((x + 0.25 * self.wavelength) * 2.0 * PI / self.wavelength).sin() + 500.0
    }

    pub fn in_channel(&self, p: Vec2) -> bool {
        (p.y - self.channel_center(p.x)).abs() <= 0.5 * self.channel_width
    }

    pub fn elevation(&self, p: Vec2) -> f64 {
        if p.x <= 500.0 || p.x >= 5500.0 {
            -2.0 + self.shift
        } else if self.in_channel(p) {
            -1e-4 * (p.x - 6000.0) - 2.0 + self.shift
        } else {
            -1e-4 * (p.x - 6000.0) + 1e-5 * (p.y - 500.0) * (p.y - 500.0) + self.shift
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn macdonald_depth_values() {
        let m = MacDonald::default();
        assert!((m.depth(250.0) - 1.375).abs() < 1e-14);
        assert!((m.depth(1000.0) - 1.125).abs() < 1e-14);
        assert!((m.depth(5000.0) - 1.125).abs() < 1e-12);
    }

    #[test]
    fn macdonald_bed_is_self_consistent() {
        let m = MacDonald::default();
        let bed = m.bathymetry(1.0);
        let q = m.discharge;
        // Discrete steady momentum balance on a 10 m stencil.
        for i in 1..499 {
            let x = i as f64 * 10.0;
            let (xa, xb) = (x - 5.0, x + 5.0);
            let h = m.depth(x);
            let flux = |x: f64| q * q / m.depth(x) + 0.5 * GRAVITY * m.depth(x).powi(2);
            let residual = (flux(xb) - flux(xa)) / 10.0 - GRAVITY * h * (bed.eval(xb) - bed.eval(xa)) / 10.0
                + GRAVITY * m.manning * m.manning * q * q / h.powf(7.0 / 3.0);
            assert!(residual.abs() < 1e-4, "x = {x}: {residual}");
        }
    }

    #[test]
    fn thacker_initial_center_and_velocity() {
        let t = Thacker::default();
        let aa = t.amplitude_factor();
        let expect = t.b0 * ((1.0 - aa * aa).sqrt() / (1.0 - aa) - 1.0);
        assert!((t.eta(t.center(), 0.0) - expect).abs() < 1e-15);
        assert_eq!(t.velocity(Vec2::new(3.0, 1.0), 0.0), Vec2::ZERO);
    }

    fn wet_volume(t: &Thacker, time: f64, n: usize) -> f64 {
        let h = t.side / n as f64;
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                let p = Vec2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                v += t.depth(p, time) * h * h;
            }
        }
        v
    }

    #[test]
    fn thacker_mass_is_time_invariant() {
        let t = Thacker::default();
        let v0 = wet_volume(&t, 0.0, 2000);
        let v1 = wet_volume(&t, 0.5 * t.natural_period(), 2000);
        let exact = |time: f64| {
            // Closed form of the paraboloid volume: π/2 · H · R² with
            // H the central depth and R the shoreline radius.
            let c = t.center();
            let hc = t.depth(c, time);
            let curvature = (t.depth(c + Vec2::new(0.1, 0.0), time) - hc) / 0.01;
            let r2 = -hc / curvature;
            0.5 * PI * hc * r2
        };
        assert!((exact(0.0) - exact(0.5 * t.natural_period())).abs() < 1e-12);
        assert!((v0 - exact(0.0)).abs() < 1e-6, "{v0} {}", exact(0.0));
        assert!((v1 - exact(0.0)).abs() < 1e-6, "{v1}");
    }

    #[test]
    fn floodplain_channel_and_ends() {
        let f = Floodplain::default();
        assert!((f.channel_center(250.0) - 500.0).abs() < 1e-9);
        assert!(f.in_channel(Vec2::new(1250.0, 491.0)));
        assert_eq!(f.elevation(Vec2::new(500.0, 100.0)), -5.2);
        assert_eq!(f.elevation(Vec2::new(5500.0, 900.0)), -5.2);
        assert!(f.elevation(Vec2::new(501.0, 100.0)) > -5.2);
        let x = 3000.0;
        let y = f.channel_center(x);
        assert!(f.elevation(Vec2::new(x, y)) < f.elevation(Vec2::new(x, y + 15.0)));
    }
}
