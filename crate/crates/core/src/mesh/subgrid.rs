use alloc::vec::Vec;
use core::ops::Range;

use super::coarse::{CoarseMesh, Neighbor};
use crate::error::{Error, Result};
use crate::math::Vec2;

/// Position of a subtriangle in the barycentric lattice of its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LatticeCell {
    i: u32,
    j: u32,
    upward: bool,
}

/// One subgrid face lying on a coarse edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgridFace {
    /// Local subcell index `k` inside the owning coarse cell.
    pub subcell: usize,
    pub length: f64,
    pub midpoint: Vec2,
}

/// Uniform `n_sg × n_sg` subtriangulation of every coarse cell.
///
/// Subcell `k` of coarse cell `m` has global index `ℓ(m, k) = m·n_sg² + k`.
/// The `r`-th face of coarse edge `i` is counted from the edge's start vertex,
/// so across an interior edge face `r` of one cell overlaps face
/// `n_sg − 1 − r` of its neighbor.
#[derive(Debug, Clone)]
pub struct SubgridPartition {
    n_sg: usize,
    lattice: Vec<LatticeCell>,
    /// Local subcell adjacent to face `r` of edge `i`, indexed `i·n_sg + r`.
    edge_subcells: Vec<usize>,
    centroids: Vec<Vec2>,
    areas: Vec<f64>,
    face_midpoints: Vec<Vec2>,
    face_lengths: Vec<[f64; 3]>,
}

/// Split every coarse triangle into `n_sg²` congruent subtriangles.
pub fn subdivide(mesh: &CoarseMesh, n_sg: usize) -> Result<SubgridPartition> {
    if n_sg == 0 {
        return Err(Error::InvalidSubdivision);
    }
    let n = n_sg;
    let mut lattice = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n - j {
            lattice.push(LatticeCell { i: i as u32, j: j as u32, upward: true });
        }
    }
    for j in 0..n.saturating_sub(1) {
        for i in 0..n - 1 - j {
            lattice.push(LatticeCell { i: i as u32, j: j as u32, upward: false });
        }
    }
    let up_index = |i: usize, j: usize| -> usize {
        let before: usize = (0..j).map(|jj| n - jj).sum();
        before + i
    };
    let mut edge_subcells = Vec::with_capacity(3 * n);
    for r in 0..n {
        edge_subcells.push(up_index(r, 0));
    }
    for r in 0..n {
        edge_subcells.push(up_index(n - 1 - r, r));
    }
    for r in 0..n {
        edge_subcells.push(up_index(0, n - 1 - r));
    }

    let per_cell = n * n;
    let nc = mesh.num_cells();
    let mut centroids = Vec::with_capacity(nc * per_cell);
    let mut areas = Vec::with_capacity(nc * per_cell);
    let mut face_midpoints = Vec::with_capacity(nc * 3 * n);
    let mut face_lengths = Vec::with_capacity(nc);
    for m in 0..nc {
        let p = mesh.triangle_points(m);
        let sub_area = mesh.area(m) / per_cell as f64;
        for cell in &lattice {
            let [a, b, c] = lattice_vertices(p, n, *cell);
            centroids.push((a + b + c) * (1.0 / 3.0));
            areas.push(sub_area);
        }
        let mut lengths = [0.0; 3];
        for e in 0..3 {
            let (start, end) = (p[e], p[(e + 1) % 3]);
            lengths[e] = mesh.edge_length(m, e) / n as f64;
            for r in 0..n {
                face_midpoints.push(start.lerp(end, (r as f64 + 0.5) / n as f64));
            }
        }
        face_lengths.push(lengths);
    }
    Ok(SubgridPartition {
        n_sg,
        lattice,
        edge_subcells,
        centroids,
        areas,
        face_midpoints,
        face_lengths,
    })
}

fn lattice_point(p: [Vec2; 3], n: usize, i: u32, j: u32) -> Vec2 {
    let inv = 1.0 / n as f64;
    p[0] + (p[1] - p[0]) * (i as f64 * inv) + (p[2] - p[0]) * (j as f64 * inv)
}

fn lattice_vertices(p: [Vec2; 3], n: usize, c: LatticeCell) -> [Vec2; 3] {
    let (i, j) = (c.i, c.j);
    if c.upward {
        [lattice_point(p, n, i, j), lattice_point(p, n, i + 1, j), lattice_point(p, n, i, j + 1)]
    } else {
        [
            lattice_point(p, n, i + 1, j),
            lattice_point(p, n, i + 1, j + 1),
            lattice_point(p, n, i, j + 1),
        ]
    }
}

impl SubgridPartition {
    /// Faces per coarse edge.
    pub fn n_sg(&self) -> usize {
        self.n_sg
    }

    /// Subcells per coarse cell, `n_sg²`.
    pub fn per_cell(&self) -> usize {
        self.lattice.len()
    }

    pub fn num_subcells(&self) -> usize {
        self.centroids.len()
    }

    /// Global subcell index `ℓ(m, k)`.
    #[inline]
    pub fn global(&self, cell: usize, k: usize) -> usize {
        cell * self.lattice.len() + k
    }

    /// Global index range of the subcells of a coarse cell.
    #[inline]
    pub fn subcells(&self, cell: usize) -> Range<usize> {
        let n = self.lattice.len();
        cell * n..(cell + 1) * n
    }

    pub fn centroids(&self) -> &[Vec2] {
        &self.centroids
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    /// Local subcell adjacent to face `r` of edge `edge`.
    #[inline]
    pub fn edge_subcell(&self, edge: usize, r: usize) -> usize {
        self.edge_subcells[edge * self.n_sg + r]
    }

    #[inline]
    pub fn face(&self, cell: usize, edge: usize, r: usize) -> SubgridFace {
        SubgridFace {
            subcell: self.edge_subcell(edge, r),
            length: self.face_lengths[cell][edge],
            midpoint: self.face_midpoints[(cell * 3 + edge) * self.n_sg + r],
        }
    }

    /// The ordered face set of coarse edge `edge` of `cell`.
    pub fn edge_faces(&self, cell: usize, edge: usize) -> impl Iterator<Item = SubgridFace> + '_ {
        (0..self.n_sg).map(move |r| self.face(cell, edge, r))
    }

    /// Face on the neighbor side overlapping face `r`, as `(cell, edge, r')`.
    pub fn paired_face(
        &self,
        mesh: &CoarseMesh,
        cell: usize,
        edge: usize,
        r: usize,
    ) -> Option<(usize, usize, usize)> {
        match mesh.neighbors(cell)[edge] {
            Neighbor::Cell { cell: nb, edge: nb_edge, .. } => Some((nb, nb_edge, self.n_sg - 1 - r)),
            Neighbor::Boundary(_) => None,
        }
    }

    /// Corner points of subcell `k` of `cell`.
    pub fn subcell_vertices(&self, mesh: &CoarseMesh, cell: usize, k: usize) -> [Vec2; 3] {
        lattice_vertices(mesh.triangle_points(cell), self.n_sg, self.lattice[k])
    }

    /// Number of subgrid faces lying on coarse edges, counted per cell side.
    pub fn num_edge_faces(&self, mesh: &CoarseMesh) -> usize {
        mesh.num_cells() * 3 * self.n_sg
    }
}
