"""Generate the graded floodplain mesh as Gmsh MSH 2.2 ASCII.

Edge length grades from about 50 m along the channel band (y near 500 m)
to about 100 m at the outer boundary. Points are placed on boundary
segments and on a jittered interior lattice thinned by the size field,
then triangulated with Delaunay. Boundary lines carry the physical tags
1 (south), 2 (east), 3 (north), 4 (west).

Usage: python3 tools/gen_floodplain_mesh.py crates/subswe/data/floodplain_graded.msh
"""

import sys

import numpy as np
from scipy.spatial import Delaunay

LX, LY = 6000.0, 1000.0
H_FINE, H_COARSE = 50.0, 100.0


def size(x, y):
    """Target edge length: fine in the channel band, coarse at the walls."""
    dist = np.abs(y - 500.0)
    band = np.clip((dist - 150.0) / 300.0, 0.0, 1.0)
    wall = np.minimum.reduce([x, LX - x, y, LY - y]) if np.ndim(x) else min(x, LX - x, y, LY - y)
    near_wall = np.clip(1.0 - wall / 150.0, 0.0, 1.0)
    t = np.maximum(band, near_wall)
    return H_FINE + (H_COARSE - H_FINE) * t


def boundary_points():
    pts, segments = [], []

    def walk(p0, p1, tag):
        length = np.hypot(p1[0] - p0[0], p1[1] - p0[1])
        s, out = 0.0, [0.0]
        while s < length:
            mid = np.array(p0) + (np.array(p1) - np.array(p0)) * min(s / length, 1.0)
            s += float(size(mid[0], mid[1]))
            out.append(min(s, length))
        ts = np.array(out)
        if ts[-1] - ts[-2] < 0.5 * H_COARSE and len(ts) > 2:
            ts = np.delete(ts, -2)
        ts = ts / length
        start = len(pts)
        for t in ts[:-1]:
            pts.append((p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])))
        return start, len(ts) - 1, tag

    corners = [(0.0, 0.0), (LX, 0.0), (LX, LY), (0.0, LY)]
    sides = []
    for i, tag in enumerate([1, 2, 3, 4]):
        sides.append(walk(corners[i], corners[(i + 1) % 4], tag))
    n = len(pts)
    for start, count, tag in sides:
        for k in range(count):
            a = start + k
            segments.append((a, (a + 1) % n, tag))
    return pts, segments


def interior_points(rng):
    pts = []
    h = H_FINE
    dy = h * np.sqrt(3.0) / 2.0
    rows = int(LY / dy)
    for j in range(1, rows):
        y = j * dy
        offset = 0.5 * h if j % 2 else 0.0
        x = offset + h
        while x < LX - 0.5 * h:
            pts.append((x, y))
            x += h
    pts = np.array(pts)
    keep = []
    accepted = []
    for p in pts[rng.permutation(len(pts))]:
        s = size(p[0], p[1])
        wall = min(p[0], LX - p[0], p[1], LY - p[1])
        if wall < 0.6 * s:
            continue
        keep.append(p)
    keep = np.array(keep)
    order = np.lexsort((keep[:, 0], keep[:, 1]))
    keep = keep[order]
    from scipy.spatial import cKDTree

    tree = None
    for p in keep:
        s = size(p[0], p[1])
        if accepted:
            if tree is None or len(accepted) % 200 == 0:
                tree = cKDTree(np.array(accepted))
            d, _ = tree.query(p)
            recent = np.array(accepted[-400:])
            d = min(d, np.min(np.hypot(recent[:, 0] - p[0], recent[:, 1] - p[1])))
            if d < 0.85 * s:
                continue
        accepted.append(p)
    return np.array(accepted)


def smooth(points, tri, fixed, iterations=30):
    pts = points.copy()
    neighbors = [set() for _ in range(len(pts))]
    for a, b, c in tri:
        neighbors[a].update((b, c))
        neighbors[b].update((a, c))
        neighbors[c].update((a, b))
    for _ in range(iterations):
        for i in range(len(pts)):
            if i in fixed:
                continue
            nb = list(neighbors[i])
            pts[i] = 0.5 * pts[i] + 0.5 * pts[nb].mean(axis=0)
    return pts


def main(path):
    rng = np.random.default_rng(7)
    bpts, segments = boundary_points()
    ipts = interior_points(rng)
    points = np.vstack([np.array(bpts), ipts])
    fixed = set(range(len(bpts)))
    tri = Delaunay(points).simplices
    points = smooth(points, tri, fixed)
    tri = Delaunay(points).simplices
    a, b, c = points[tri[:, 0]], points[tri[:, 1]], points[tri[:, 2]]
    area = 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    tri = tri[np.abs(area) > 1e-6]

    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write("$PhysicalNames\n4\n1 1 \"south\"\n1 2 \"east\"\n1 3 \"north\"\n1 4 \"west\"\n$EndPhysicalNames\n")
        f.write(f"$Nodes\n{len(points)}\n")
        for i, (x, y) in enumerate(points):
            f.write(f"{i + 1} {x:.10f} {y:.10f} 0\n")
        f.write("$EndNodes\n")
        f.write(f"$Elements\n{len(segments) + len(tri)}\n")
        eid = 1
        for a_, b_, tag in segments:
            f.write(f"{eid} 1 2 {tag} {tag} {a_ + 1} {b_ + 1}\n")
            eid += 1
        for t in tri:
            f.write(f"{eid} 2 2 10 1 {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
            eid += 1
        f.write("$EndElements\n")
    print(f"{len(points)} nodes, {len(tri)} triangles, {len(segments)} boundary lines")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "floodplain_graded.msh")
