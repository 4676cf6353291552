//! Second-order WENO reconstruction of `(η, u, v)` on the coarse mesh.
//!
//! Each cell carries one central stencil (itself plus its face-neighbors) and
//! up to three sector stencils, one per edge, built from neighbors whose
//! centroids lie in the wedge spanned by the edge's vertices as seen from the
//! cell centroid. Gradients are least-squares fits; the blend uses
//! smoothness-based nonlinear weights favoring the central stencil.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::Vec2;
use crate::mesh::{CoarseMesh, Neighbor};
use crate::state::WetState;

/// Linear weight of the central stencil; sectors weigh 1.
pub const CENTRAL_WEIGHT: f64 = 1e5;
pub const WENO_EPSILON: f64 = 1e-14;
pub const WENO_POWER: i32 = 4;
/// Least-squares systems above this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e8;
const SECTOR_DEPTH: usize = 3;
const SECTOR_SIZE: usize = 3;

/// One least-squares stencil: member cells with their centroid offsets in the
/// owner's frame and the gradient weights `∇q ≈ Σ w_j (q_j − q_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub cells: Vec<usize>,
    pub offsets: Vec<Vec2>,
    pub weights: Vec<Vec2>,
}

impl Stencil {
    fn fit(cells: Vec<usize>, offsets: Vec<Vec2>, scale: f64) -> Option<Stencil> {
        if cells.len() < 2 {
            return None;
        }
        let inv = 1.0 / scale;
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for o in &offsets {
            let (x, y) = (o.x * inv, o.y * inv);
            a += x * x;
            b += x * y;
            c += y * y;
        }
        let det = a * c - b * b;
        let trace = a + c;
        let disc = crate::math::sqrt(((a - c) * (a - c) + 4.0 * b * b).max(0.0));
        let (hi, lo) = (0.5 * (trace + disc), 0.5 * (trace - disc));
        if !(det > 0.0) || lo <= 0.0 || hi / lo > MAX_CONDITION {
            return None;
        }
        let weights = offsets
            .iter()
            .map(|o| {
                let (x, y) = (o.x * inv, o.y * inv);
                Vec2::new((c * x - b * y) / det * inv, (a * y - b * x) / det * inv)
            })
            .collect();
        Some(Stencil { cells, offsets, weights })
    }

    /// Least-squares gradient of `q` with owner value `q_m`.
    pub fn gradient(&self, q: &[f64], q_m: f64) -> Vec2 {
        let mut g = Vec2::ZERO;
        for (&j, &w) in self.cells.iter().zip(&self.weights) {
            g += w * (q[j] - q_m);
        }
        g
    }
}

/// Stencils of one cell: index 0 is central, 1..=3 are the edge sectors.
pub type CellStencils = [Option<Stencil>; 4];

/// All stencils of a mesh.
#[derive(Debug, Clone)]
pub struct StencilSet {
    cells: Vec<CellStencils>,
}

impl StencilSet {
    pub fn cell(&self, m: usize) -> &CellStencils {
        &self.cells[m]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of cells with `k` available stencils, `k = 0..=4`.
    pub fn availability_histogram(&self) -> [usize; 5] {
        let mut hist = [0; 5];
        for c in &self.cells {
            hist[c.iter().filter(|s| s.is_some()).count()] += 1;
        }
        hist
    }
}

fn in_wedge(a: Vec2, b: Vec2, w: Vec2) -> bool {
    a.cross(w) > 0.0 && w.cross(b) > 0.0
}

/// Breadth-first neighborhood of `m` up to `SECTOR_DEPTH` face hops, as
/// `(depth, distance², cell, offset)` sorted by depth then distance.
fn neighborhood(mesh: &CoarseMesh, m: usize) -> Vec<(usize, f64, usize, Vec2)> {
    let mut seen = alloc::collections::BTreeSet::new();
    seen.insert(m);
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    queue.push_back((m, 0usize, Vec2::ZERO));
    while let Some((c, depth, shift)) = queue.pop_front() {
        if depth == SECTOR_DEPTH {
            continue;
        }
        for nb in mesh.neighbors(c) {
            if let Neighbor::Cell { cell, shift: s, .. } = *nb {
                if seen.insert(cell) {
                    let total = shift + s;
                    let offset = mesh.centroid(cell) + total - mesh.centroid(m);
                    out.push((depth + 1, offset.norm2(), cell, offset));
                    queue.push_back((cell, depth + 1, total));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

/// Build the central and sector stencils of every cell.
pub fn build_stencils(mesh: &CoarseMesh) -> StencilSet {
    let cells = (0..mesh.num_cells())
        .map(|m| {
            let scale = mesh.cell_diameter(m);
            let c = mesh.centroid(m);
            let mut stencils: CellStencils = [None, None, None, None];

            let (mut cs, mut os) = (Vec::new(), Vec::new());
            for nb in mesh.neighbors(m) {
                if let Neighbor::Cell { cell, shift, .. } = *nb {
                    cs.push(cell);
                    os.push(mesh.centroid(cell) + shift - c);
                }
            }
            stencils[0] = Stencil::fit(cs, os, scale);

            let hood = neighborhood(mesh, m);
            let pts = mesh.triangle_points(m);
            for e in 0..3 {
                let a = pts[e] - c;
                let b = pts[(e + 1) % 3] - c;
                let (mut cs, mut os) = (Vec::new(), Vec::new());
                for &(_, _, cell, offset) in &hood {
                    if in_wedge(a, b, offset) {
                        cs.push(cell);
                        os.push(offset);
                        if cs.len() == SECTOR_SIZE {
                            break;
                        }
                    }
                }
                stencils[e + 1] = Stencil::fit(cs, os, scale);
            }
            stencils
        })
        .collect();
    StencilSet { cells }
}

/// Linear function `q(x) = mean + grad · (x − x_m)` over one cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Plane {
    pub mean: f64,
    pub grad: Vec2,
}

impl Plane {
    #[inline]
    pub fn eval(&self, offset: Vec2) -> f64 {
        self.mean + self.grad.dot(offset)
    }
}

/// Reconstructed planes of `(η, u, v)` for every cell, with the bit mask of
/// stencils that entered the blend (bit `s` for stencil `s`).
#[derive(Debug, Clone, Default)]
pub struct ReconstructionPlanes {
    pub eta: Vec<Plane>,
    pub u: Vec<Plane>,
    pub v: Vec<Plane>,
    pub stencil_mask: Vec<u8>,
}

impl ReconstructionPlanes {
    fn with_means(eta: &[f64], u: &[f64], v: &[f64]) -> Self {
        let plane = |q: &f64| Plane { mean: *q, grad: Vec2::ZERO };
        ReconstructionPlanes {
            eta: eta.iter().map(plane).collect(),
            u: u.iter().map(plane).collect(),
            v: v.iter().map(plane).collect(),
            stencil_mask: vec![0; eta.len()],
        }
    }
}

/// First-order reconstruction: constant planes.
pub fn first_order_planes(eta: &[f64], u: &[f64], v: &[f64]) -> ReconstructionPlanes {
    ReconstructionPlanes::with_means(eta, u, v)
}

/// Nonlinear weights from linear weights and smoothness indicators; `None`
/// marks an unused stencil. Returns all zeros when no stencil is present.
pub fn weno_weights(linear: &[f64; 4], sigma: &[Option<f64>; 4]) -> [f64; 4] {
    let floor = sigma.iter().flatten().fold(f64::INFINITY, |m, &s| m.min(s)) + WENO_EPSILON;
    let mut w = [0.0; 4];
    let mut total = 0.0;
    for s in 0..4 {
        if let Some(sig) = sigma[s] {
            let ratio = floor / (sig + WENO_EPSILON);
            w[s] = linear[s] * crate::math::powi(ratio, WENO_POWER);
            total += w[s];
        }
    }
    if total > 0.0 {
        for x in &mut w {
            *x /= total;
        }
    }
    w
}

/// Default linear weights: central first, then the three sectors.
pub const LINEAR_WEIGHTS: [f64; 4] = [CENTRAL_WEIGHT, 1.0, 1.0, 1.0];

/// WENO reconstruction. Stencils containing a dry cell are discarded, and
/// dry cells keep constant planes. `status[m]` comes from the constant
/// inversion of the current state.
pub fn reconstruct_planes(
    mesh: &CoarseMesh,
    stencils: &StencilSet,
    status: &[WetState],
    eta: &[f64],
    u: &[f64],
    v: &[f64],
) -> ReconstructionPlanes {
    let mut planes = ReconstructionPlanes::with_means(eta, u, v);
    for m in 0..mesh.num_cells() {
        if !status[m].has_water() {
            continue;
        }
        let set = stencils.cell(m);
        let mut usable = [false; 4];
        let mut mask = 0u8;
        for s in 0..4 {
            if let Some(st) = &set[s] {
                if st.cells.iter().all(|&j| status[j].has_water()) {
                    usable[s] = true;
                    mask |= 1 << s;
                }
            }
        }
        planes.stencil_mask[m] = mask;
        if mask == 0 {
            continue;
        }
        let area = mesh.area(m);
        for (q, out) in [(eta, &mut planes.eta), (u, &mut planes.u), (v, &mut planes.v)] {
            let mut grads = [Vec2::ZERO; 4];
            let mut sigma = [None; 4];
            for s in 0..4 {
                if usable[s] {
                    let g = set[s].as_ref().map(|st| st.gradient(q, q[m])).unwrap_or(Vec2::ZERO);
                    grads[s] = g;
                    sigma[s] = Some(area * g.norm2());
                }
            }
            let w = weno_weights(&LINEAR_WEIGHTS, &sigma);
            let mut g = Vec2::ZERO;
            for s in 0..4 {
                g += grads[s] * w[s];
            }
            out[m].grad = g;
        }
    }
    planes
}
