//! Discrete error norms over coarse cell centers.

use subswe_core::{CoarseMesh, Conserved};

use super::SolutionFn;

/// Errors of the depth and the x-discharge.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub linf_h: f64,
    pub l2_h: f64,
    pub linf_hu: f64,
    pub l2_hu: f64,
    pub steps: usize,
    pub wall_clock: f64,
}

/// Evaluate `(h, hu, hv)` of a solution at every coarse centroid.
pub fn reference_at_centers(mesh: &CoarseMesh, solution: &SolutionFn, t: f64) -> Conserved {
    let mut out = Conserved::zeros(mesh.num_cells());
    for m in 0..mesh.num_cells() {
        let (h, hu, hv) = solution(mesh.centroid(m), t);
        out.h[m] = h;
        out.hu[m] = hu;
        out.hv[m] = hv;
    }
    out
}

/// `L_∞` and `L_2 = √(Σ |T| (q − q_ref)²)`; with `normalize` the `L_2` values
/// are divided by `√|Ω|`, giving a root-mean-square error.
pub fn error_norms(mesh: &CoarseMesh, state: &Conserved, reference: &Conserved, normalize: bool) -> ErrorReport {
    let mut r = ErrorReport::default();
    let (mut sh, mut shu) = (0.0, 0.0);
    for m in 0..mesh.num_cells() {
        let a = mesh.area(m);
        let eh = (state.h[m] - reference.h[m]).abs();
        let ehu = (state.hu[m] - reference.hu[m]).abs();
        r.linf_h = r.linf_h.max(eh);
        r.linf_hu = r.linf_hu.max(ehu);
        sh += a * eh * eh;
        shu += a * ehu * ehu;
    }
    let scale = if normalize { 1.0 / mesh.total_area().sqrt() } else { 1.0 };
    r.l2_h = sh.sqrt() * scale;
    r.l2_hu = shu.sqrt() * scale;
    r
}
