use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::Vec2;

/// Label attached to boundary edges (Gmsh physical group id for loaded
/// meshes, side label for the built-in rectangle).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryTag(pub u32);

impl BoundaryTag {
    /// Boundary edges not covered by any tagged segment.
    pub const UNTAGGED: BoundaryTag = BoundaryTag(0);
    pub const SOUTH: BoundaryTag = BoundaryTag(1);
    pub const EAST: BoundaryTag = BoundaryTag(2);
    pub const NORTH: BoundaryTag = BoundaryTag(3);
    pub const WEST: BoundaryTag = BoundaryTag(4);
}

/// What lies across a coarse edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighbor {
    /// Another coarse cell. `edge` is the local index of the shared edge in
    /// that cell; adding `shift` to the neighbor's coordinates maps them into
    /// this cell's frame (non-zero only across periodic links).
    Cell { cell: usize, edge: usize, shift: Vec2 },
    Boundary(BoundaryTag),
}

impl Neighbor {
    pub fn cell(&self) -> Option<usize> {
        match *self {
            Neighbor::Cell { cell, .. } => Some(cell),
            Neighbor::Boundary(_) => None,
        }
    }
}

/// Unstructured triangle mesh carrying the conserved variables.
///
/// Local edge `i` of a triangle runs from vertex `i` to vertex `(i + 1) % 3`;
/// triangles are stored counterclockwise so that every normal points out of
/// its cell.
#[derive(Debug, Clone)]
pub struct CoarseMesh {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    neighbors: Vec<[Neighbor; 3]>,
    areas: Vec<f64>,
    centroids: Vec<Vec2>,
    edge_lengths: Vec<[f64; 3]>,
    normals: Vec<[Vec2; 3]>,
    diameter: f64,
}

impl CoarseMesh {
    /// Build topology and geometry from raw triangles.
    ///
    /// Clockwise triangles are flipped. Boundary edges take the tag of the
    /// matching entry in `boundary_segments` (endpoint order irrelevant) or
    /// [`BoundaryTag::UNTAGGED`].
    pub fn from_triangles(
        vertices: Vec<Vec2>,
        mut triangles: Vec<[usize; 3]>,
        boundary_segments: &[([usize; 2], BoundaryTag)],
    ) -> Result<Self> {
        for (cell, tri) in triangles.iter_mut().enumerate() {
            for &v in tri.iter() {
                if v >= vertices.len() {
                    return Err(Error::DanglingVertex { cell, vertex: v });
                }
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            let twice_area = (b - a).cross(c - a);
            if !(twice_area.abs() > 0.0) || !twice_area.is_finite() {
                return Err(Error::DegenerateTriangle { cell });
            }
            if twice_area < 0.0 {
                tri.swap(1, 2);
            }
        }

        let mut segment_tags = BTreeMap::new();
        for &([a, b], tag) in boundary_segments {
            segment_tags.insert(sorted_pair(a, b), tag);
        }

        let mut edge_owners: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (cell, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let key = sorted_pair(tri[i], tri[(i + 1) % 3]);
                edge_owners.entry(key).or_default().push((cell, i));
            }
        }

        let untagged = Neighbor::Boundary(BoundaryTag::UNTAGGED);
        let mut neighbors = alloc::vec![[untagged; 3]; triangles.len()];
        for (&(v0, v1), owners) in &edge_owners {
            match owners.as_slice() {
                &[(cell, i)] => {
                    let tag = segment_tags
                        .get(&(v0, v1))
                        .copied()
                        .unwrap_or(BoundaryTag::UNTAGGED);
                    neighbors[cell][i] = Neighbor::Boundary(tag);
                }
                &[(c0, i0), (c1, i1)] => {
                    neighbors[c0][i0] = Neighbor::Cell { cell: c1, edge: i1, shift: Vec2::ZERO };
                    neighbors[c1][i1] = Neighbor::Cell { cell: c0, edge: i0, shift: Vec2::ZERO };
                }
                _ => return Err(Error::NonManifoldEdge { v0, v1 }),
            }
        }

        let mut mesh = CoarseMesh {
            vertices,
            triangles,
            neighbors,
            areas: Vec::new(),
            centroids: Vec::new(),
            edge_lengths: Vec::new(),
            normals: Vec::new(),
            diameter: 0.0,
        };
        mesh.compute_geometry();
        Ok(mesh)
    }

    fn compute_geometry(&mut self) {
        let n = self.triangles.len();
        self.areas = Vec::with_capacity(n);
        self.centroids = Vec::with_capacity(n);
        self.edge_lengths = Vec::with_capacity(n);
        self.normals = Vec::with_capacity(n);
        for tri in &self.triangles {
            let p = tri.map(|v| self.vertices[v]);
            self.areas.push(0.5 * (p[1] - p[0]).cross(p[2] - p[0]));
            self.centroids.push((p[0] + p[1] + p[2]) * (1.0 / 3.0));
            let mut lengths = [0.0; 3];
            let mut normals = [Vec2::ZERO; 3];
            for i in 0..3 {
                let t = p[(i + 1) % 3] - p[i];
                let len = t.norm();
                lengths[i] = len;
                normals[i] = Vec2::new(t.y / len, -t.x / len);
            }
            self.edge_lengths.push(lengths);
            self.normals.push(normals);
        }
        let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
        for v in &self.vertices {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        self.diameter = if self.vertices.is_empty() { 0.0 } else { (hi - lo).norm() };
    }

    /// Glue the boundary edges tagged `tag_a` to those tagged `tag_b`.
    ///
    /// The two sets must be translates of each other edge by edge; the
    /// translation is inferred from the edge midpoints.
    pub fn link_periodic(&mut self, tag_a: BoundaryTag, tag_b: BoundaryTag) -> Result<()> {
        let unmatched = Error::UnmatchedPeriodic { tag_a: tag_a.0, tag_b: tag_b.0 };
        let side_a = self.boundary_edges(tag_a);
        let side_b = self.boundary_edges(tag_b);
        if side_a.is_empty() || side_a.len() != side_b.len() {
            return Err(unmatched);
        }
        let mean = |edges: &[(usize, usize)]| {
            let sum = edges
                .iter()
                .fold(Vec2::ZERO, |acc, &(c, i)| acc + self.edge_midpoint(c, i));
            sum * (1.0 / edges.len() as f64)
        };
        let shift = mean(&side_b) - mean(&side_a);
        let tol = 1e-9 * self.diameter;

        let mut pairs = Vec::with_capacity(side_a.len());
        let mut used = alloc::vec![false; side_b.len()];
        for &(ca, ia) in &side_a {
            let target = self.edge_midpoint(ca, ia) + shift;
            let found = side_b.iter().enumerate().find(|&(j, &(cb, ib))| {
                !used[j] && (self.edge_midpoint(cb, ib) - target).norm() <= tol.max(1e-12)
            });
            match found {
                Some((j, &(cb, ib)))
                    if (self.edge_lengths[ca][ia] - self.edge_lengths[cb][ib]).abs()
                        <= tol.max(1e-12) =>
                {
                    used[j] = true;
                    pairs.push(((ca, ia), (cb, ib)));
                }
                _ => return Err(unmatched),
            }
        }
        for ((ca, ia), (cb, ib)) in pairs {
            self.neighbors[ca][ia] = Neighbor::Cell { cell: cb, edge: ib, shift: -shift };
            self.neighbors[cb][ib] = Neighbor::Cell { cell: ca, edge: ia, shift };
        }
        Ok(())
    }

    /// `(cell, local edge)` pairs on the boundary with the given tag.
    pub fn boundary_edges(&self, tag: BoundaryTag) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (cell, nbs) in self.neighbors.iter().enumerate() {
            for (i, nb) in nbs.iter().enumerate() {
                if *nb == Neighbor::Boundary(tag) {
                    out.push((cell, i));
                }
            }
        }
        out
    }

    /// Distinct tags present on the boundary, sorted.
    pub fn boundary_tags(&self) -> Vec<BoundaryTag> {
        let mut tags: Vec<BoundaryTag> = self
            .neighbors
            .iter()
            .flatten()
            .filter_map(|nb| match nb {
                Neighbor::Boundary(t) => Some(*t),
                _ => None,
            })
            .collect();
        tags.sort();
        tags.dedup();
        tags
    }

    pub fn num_cells(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle_points(&self, cell: usize) -> [Vec2; 3] {
        self.triangles[cell].map(|v| self.vertices[v])
    }

    pub fn neighbors(&self, cell: usize) -> &[Neighbor; 3] {
        &self.neighbors[cell]
    }

    pub fn area(&self, cell: usize) -> f64 {
        self.areas[cell]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn centroid(&self, cell: usize) -> Vec2 {
        self.centroids[cell]
    }

    pub fn centroids(&self) -> &[Vec2] {
        &self.centroids
    }

    pub fn edge_length(&self, cell: usize, edge: usize) -> f64 {
        self.edge_lengths[cell][edge]
    }

    pub fn normal(&self, cell: usize, edge: usize) -> Vec2 {
        self.normals[cell][edge]
    }

    pub fn edge_endpoints(&self, cell: usize, edge: usize) -> (Vec2, Vec2) {
        let tri = self.triangles[cell];
        (self.vertices[tri[edge]], self.vertices[tri[(edge + 1) % 3]])
    }

    pub fn edge_midpoint(&self, cell: usize, edge: usize) -> Vec2 {
        let (a, b) = self.edge_endpoints(cell, edge);
        (a + b) * 0.5
    }

    /// Diagonal of the vertex bounding box.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Longest edge of a cell.
    pub fn cell_diameter(&self, cell: usize) -> f64 {
        let l = self.edge_lengths[cell];
        l[0].max(l[1]).max(l[2])
    }

    /// Index of the cell whose centroid is closest to `p` (lowest index on ties).
    pub fn nearest_cell(&self, p: Vec2) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.centroids.iter().enumerate() {
            let d = (*c - p).norm2();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Number of interior edges (each counted once).
    pub fn num_interior_edges(&self) -> usize {
        self.neighbors
            .iter()
            .flatten()
            .filter(|nb| matches!(nb, Neighbor::Cell { .. }))
            .count()
            / 2
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.neighbors
            .iter()
            .flatten()
            .filter(|nb| matches!(nb, Neighbor::Boundary(_)))
            .count()
    }
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Structured right-triangle mesh of `[x0, x1] × [y0, y1]`.
///
/// Each of the `nx × ny` rectangles (`nx = round((x1 - x0) / edge)`) is cut
/// along its south-west/north-east diagonal. Boundary edges are tagged with
/// [`BoundaryTag::SOUTH`], `EAST`, `NORTH` and `WEST`.
pub fn build_rect_mesh(x: (f64, f64), y: (f64, f64), edge: f64) -> Result<CoarseMesh> {
    let (lx, ly) = (x.1 - x.0, y.1 - y.0);
    if !(lx > 0.0 && ly > 0.0 && edge > 0.0) || !(lx.is_finite() && ly.is_finite() && edge.is_finite())
    {
        return Err(Error::DegenerateDomain);
    }
    let nx = (libm::round(lx / edge) as usize).max(1);
    let ny = (libm::round(ly / edge) as usize).max(1);
    let (dx, dy) = (lx / nx as f64, ly / ny as f64);

    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // Pin the far sides exactly so periodic matching is exact.
            let px = if i == nx { x.1 } else { x.0 + i as f64 * dx };
            let py = if j == ny { y.1 } else { y.0 + j as f64 * dy };
            vertices.push(Vec2::new(px, py));
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let mut segments = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        segments.push(([vid(i, 0), vid(i + 1, 0)], BoundaryTag::SOUTH));
        segments.push(([vid(i, ny), vid(i + 1, ny)], BoundaryTag::NORTH));
    }
    for j in 0..ny {
        segments.push(([vid(0, j), vid(0, j + 1)], BoundaryTag::WEST));
        segments.push(([vid(nx, j), vid(nx, j + 1)], BoundaryTag::EAST));
    }
    CoarseMesh::from_triangles(vertices, triangles, &segments)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_closed(mesh: &CoarseMesh) {
        for m in 0..mesh.num_cells() {
            let mut sum = Vec2::ZERO;
            let mut scale = 0.0;
            for i in 0..3 {
                sum += mesh.normal(m, i) * mesh.edge_length(m, i);
                scale += mesh.edge_length(m, i);
                let out = mesh.edge_midpoint(m, i) - mesh.centroid(m);
                assert!(out.dot(mesh.normal(m, i)) > 0.0);
            }
            assert!(sum.norm() <= 1e-12 * scale);
            assert!(mesh.area(m) > 0.0);
        }
    }

    #[test]
    fn unit_square_half_spacing() {
        let mesh = build_rect_mesh((0.0, 1.0), (0.0, 1.0), 0.5).unwrap();
        assert_eq!(mesh.num_cells(), 8);
        for m in 0..8 {
            assert!((mesh.area(m) - 0.125).abs() < 1e-15);
        }
        assert_closed(&mesh);
        assert!((mesh.total_area() - 1.0).abs() < 1e-14);
        assert_eq!(mesh.num_boundary_edges(), 8);
        assert_eq!(mesh.boundary_edges(BoundaryTag::WEST).len(), 2);
    }

    #[test]
    fn lake_domain_cell_count() {
        let mesh = build_rect_mesh((0.1, 2.1), (0.0, 1.0), 1.0 / 50.0).unwrap();
        let n = mesh.num_cells() as f64;
        assert!((n - 11_628.0).abs() <= 0.2 * 11_628.0, "{n}");
        for m in 0..mesh.num_cells() {
            for i in 0..3 {
                let l = mesh.edge_length(m, i);
                // Legs match the target, the diagonal is sqrt(2) longer.
                assert!((l - 0.02).abs() < 0.2 * 0.02 || (l - 0.02 * core::f64::consts::SQRT_2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn degenerate_extent_rejected() {
        assert_eq!(build_rect_mesh((0.0, 0.0), (0.0, 1.0), 0.1).unwrap_err(), Error::DegenerateDomain);
        assert_eq!(build_rect_mesh((0.0, 1.0), (0.0, 1.0), 0.0).unwrap_err(), Error::DegenerateDomain);
        assert!(build_rect_mesh((0.0, f64::NAN), (0.0, 1.0), 0.1).is_err());
    }

    #[test]
    fn interior_edges_shared_by_two() {
        let mesh = build_rect_mesh((0.0, 3.0), (0.0, 2.0), 1.0).unwrap();
        for m in 0..mesh.num_cells() {
            for i in 0..3 {
                if let Neighbor::Cell { cell, edge, .. } = mesh.neighbors(m)[i] {
                    match mesh.neighbors(cell)[edge] {
                        Neighbor::Cell { cell: back, edge: be, .. } => {
                            assert_eq!((back, be), (m, i));
                        }
                        _ => panic!("one-sided link"),
                    }
                    let n = mesh.normal(m, i) + mesh.normal(cell, edge);
                    assert!(n.norm() < 1e-14);
                }
            }
        }
        // 12 triangles, 3*12 = 2*interior + boundary
        assert_eq!(2 * mesh.num_interior_edges() + mesh.num_boundary_edges(), 36);
    }

    #[test]
    fn clockwise_input_is_flipped() {
        let v = alloc::vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let mesh = CoarseMesh::from_triangles(v, alloc::vec![[0, 2, 1]], &[]).unwrap();
        assert!((mesh.area(0) - 0.5).abs() < 1e-15);
        assert_closed(&mesh);
    }

    #[test]
    fn degenerate_and_dangling_triangles() {
        let v = alloc::vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)];
        assert_eq!(
            CoarseMesh::from_triangles(v.clone(), alloc::vec![[0, 1, 2]], &[]).unwrap_err(),
            Error::DegenerateTriangle { cell: 0 }
        );
        assert_eq!(
            CoarseMesh::from_triangles(v, alloc::vec![[0, 1, 7]], &[]).unwrap_err(),
            Error::DanglingVertex { cell: 0, vertex: 7 }
        );
    }

    #[test]
    fn periodic_link_in_y() {
        let mut mesh = build_rect_mesh((0.0, 2.0), (0.0, 1.0), 0.25).unwrap();
        let boundary_before = mesh.num_boundary_edges();
        mesh.link_periodic(BoundaryTag::SOUTH, BoundaryTag::NORTH).unwrap();
        assert_eq!(mesh.num_boundary_edges(), boundary_before - 16);
        for (m, i) in mesh.boundary_edges(BoundaryTag::WEST) {
            assert!(mesh.edge_midpoint(m, i).x.abs() < 1e-14);
        }
        // Shifted neighbor centroid sits just below the south boundary.
        let south = (0..mesh.num_cells())
            .flat_map(|m| (0..3).map(move |i| (m, i)))
            .find(|&(m, i)| mesh.edge_midpoint(m, i).y == 0.0 && mesh.normal(m, i).y < -0.5)
            .unwrap();
        match mesh.neighbors(south.0)[south.1] {
            Neighbor::Cell { cell, shift, .. } => {
                assert!((mesh.centroid(cell) + shift).y < 0.0);
                assert!((shift.y + 1.0).abs() < 1e-14);
            }
            _ => panic!("not linked"),
        }
    }

    #[test]
    fn periodic_mismatch_is_error() {
        let mut mesh = build_rect_mesh((0.0, 2.0), (0.0, 1.0), 0.25).unwrap();
        assert!(mesh.link_periodic(BoundaryTag::SOUTH, BoundaryTag::EAST).is_err());
    }
}
