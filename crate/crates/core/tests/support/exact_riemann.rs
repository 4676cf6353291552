//! Exact solution of the one-dimensional shallow water Riemann problem on a
//! flat bed, sampled on the interface `x/t = 0`.

#![allow(dead_code)]

pub const G: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub h: f64,
    pub u: f64,
    /// Passive tangential velocity.
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waves {
    /// Leftmost signal speed (rarefaction head or shock).
    pub left: f64,
    /// Rightmost signal speed.
    pub right: f64,
    pub h_star: f64,
    pub u_star: f64,
}

fn f_k(h: f64, h_k: f64) -> (f64, f64) {
    let c_k = (G * h_k).sqrt();
    if h <= h_k {
        let c = (G * h).sqrt();
        (2.0 * (c - c_k), G / c)
    } else {
        let s = (0.5 * G * (h + h_k) / (h * h_k)).sqrt();
        let ds = s - G * (h - h_k) / (4.0 * s * h * h);
        ((h - h_k) * s, ds)
    }
}

/// Star region of a wet/wet problem without a generated dry zone.
fn star(h_l: f64, u_l: f64, h_r: f64, u_r: f64) -> (f64, f64) {
    let (c_l, c_r) = ((G * h_l).sqrt(), (G * h_r).sqrt());
    let mut h = (0.5 * (c_l + c_r) + 0.25 * (u_l - u_r)).powi(2) / G;
    h = h.max(1e-8);
    for _ in 0..200 {
        let (fl, dl) = f_k(h, h_l);
        let (fr, dr) = f_k(h, h_r);
        let f = fl + fr + u_r - u_l;
        let next = (h - f / (dl + dr)).max(0.5 * h);
        if (next - h).abs() <= 1e-15 * h {
            h = next;
            break;
        }
        h = next;
    }
    let u = 0.5 * (u_l + u_r) + 0.5 * (f_k(h, h_r).0 - f_k(h, h_l).0);
    (h, u)
}

/// Wave structure of the problem.
pub fn waves(h_l: f64, u_l: f64, h_r: f64, u_r: f64) -> Waves {
    let (c_l, c_r) = ((G * h_l).sqrt(), (G * h_r).sqrt());
    if h_r <= 0.0 {
        return Waves { left: u_l - c_l, right: u_l + 2.0 * c_l, h_star: 0.0, u_star: u_l + 2.0 * c_l };
    }
    if h_l <= 0.0 {
        return Waves { left: u_r - 2.0 * c_r, right: u_r + c_r, h_star: 0.0, u_star: u_r - 2.0 * c_r };
    }
    if 2.0 * (c_l + c_r) <= u_r - u_l {
        return Waves { left: u_l - c_l, right: u_r + c_r, h_star: 0.0, u_star: 0.5 * (u_l + u_r) };
    }
    let (h, u) = star(h_l, u_l, h_r, u_r);
    let left = if h > h_l { u_l - c_l * (0.5 * (h + h_l) * h / (h_l * h_l)).sqrt() } else { u_l - c_l };
    let right = if h > h_r { u_r + c_r * (0.5 * (h + h_r) * h / (h_r * h_r)).sqrt() } else { u_r + c_r };
    Waves { left, right, h_star: h, u_star: u }
}

fn left_fan(u_l: f64, c_l: f64) -> (f64, f64) {
    let c = (u_l + 2.0 * c_l) / 3.0;
    (c * c / G, c)
}

fn right_fan(u_r: f64, c_r: f64) -> (f64, f64) {
    let c = (-u_r + 2.0 * c_r) / 3.0;
    (c * c / G, -c)
}

/// State on `x/t = 0`.
pub fn sample(h_l: f64, u_l: f64, v_l: f64, h_r: f64, u_r: f64, v_r: f64) -> Sample {
    let (c_l, c_r) = ((G * h_l.max(0.0)).sqrt(), (G * h_r.max(0.0)).sqrt());
    let left_state = Sample { h: h_l, u: u_l, v: v_l };
    let right_state = Sample { h: h_r, u: u_r, v: v_r };
    let dry = |v| Sample { h: 0.0, u: 0.0, v };

    let sample_left_rarefaction_to_dry = || {
        if u_l - c_l >= 0.0 {
            left_state
        } else if u_l + 2.0 * c_l > 0.0 {
            let (h, u) = left_fan(u_l, c_l);
            Sample { h, u, v: v_l }
        } else {
            dry(v_l)
        }
    };
    let sample_right_rarefaction_to_dry = || {
        if u_r + c_r <= 0.0 {
            right_state
        } else if u_r - 2.0 * c_r < 0.0 {
            let (h, u) = right_fan(u_r, c_r);
            Sample { h, u, v: v_r }
        } else {
            dry(v_r)
        }
    };

    if h_l <= 0.0 && h_r <= 0.0 {
        return dry(0.0);
    }
    if h_r <= 0.0 {
        return sample_left_rarefaction_to_dry();
    }
    if h_l <= 0.0 {
        return sample_right_rarefaction_to_dry();
    }
    if 2.0 * (c_l + c_r) <= u_r - u_l {
        if u_l + 2.0 * c_l >= 0.0 {
            return sample_left_rarefaction_to_dry();
        }
        if u_r - 2.0 * c_r <= 0.0 {
            return sample_right_rarefaction_to_dry();
        }
        return dry(0.0);
    }

    let (h_s, u_s) = star(h_l, u_l, h_r, u_r);
    let c_s = (G * h_s).sqrt();
    if u_s >= 0.0 {
        if h_s > h_l {
            let s = u_l - c_l * (0.5 * (h_s + h_l) * h_s / (h_l * h_l)).sqrt();
            if s >= 0.0 { left_state } else { Sample { h: h_s, u: u_s, v: v_l } }
        } else if u_l - c_l >= 0.0 {
            left_state
        } else if u_s - c_s <= 0.0 {
            Sample { h: h_s, u: u_s, v: v_l }
        } else {
            let (h, u) = left_fan(u_l, c_l);
            Sample { h, u, v: v_l }
        }
    } else if h_s > h_r {
        let s = u_r + c_r * (0.5 * (h_s + h_r) * h_s / (h_r * h_r)).sqrt();
        if s <= 0.0 { right_state } else { Sample { h: h_s, u: u_s, v: v_r } }
    } else if u_r + c_r <= 0.0 {
        right_state
    } else if u_s + c_s >= 0.0 {
        Sample { h: h_s, u: u_s, v: v_r }
    } else {
        let (h, u) = right_fan(u_r, c_r);
        Sample { h, u, v: v_r }
    }
}

/// Godunov flux `(hu, hu² + ½gh², huv)` of the exact interface state.
pub fn exact_flux(h_l: f64, u_l: f64, v_l: f64, h_r: f64, u_r: f64, v_r: f64) -> [f64; 3] {
    let s = sample(h_l, u_l, v_l, h_r, u_r, v_r);
    let q = s.h * s.u;
    [q, q * s.u + 0.5 * G * s.h * s.h, q * s.v]
}
