"""Straight-edged triangular meshes of a box, optionally pierced by a polygonal hole.

Mesh generation wraps Shewchuk's Triangle (constrained Delaunay with Ruppert
quality refinement) and drives it with a graded size field: ``target_h`` on the
hole boundary, ``wall_ratio * target_h`` on the outer walls.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
import shapely
import triangle as _triangle
from shapely.geometry import LinearRing, Polygon

from .errors import GeometryError, MeshResourceError

_LOCAL_EDGES = np.array([[0, 1], [1, 2], [2, 0]])


class Marker(enum.IntEnum):
    SWIMMER_BOUNDARY = 1
    OUTER_WALL = 2


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable triangulation with marked boundary edges.

    ``boundary_edges`` are stored oriented so that the owning triangle lies on
    their left; the outward normal of the fluid domain is then the edge
    direction rotated clockwise.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_markers: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64)
        be = np.ascontiguousarray(self.boundary_edges, dtype=np.int64).reshape(-1, 2)
        bm = np.ascontiguousarray(self.boundary_markers, dtype=np.int64).ravel()
        if v.ndim != 2 or v.shape[1] != 2 or not np.all(np.isfinite(v)):
            raise GeometryError("vertices must be a finite (n, 2) array")
        if t.ndim != 2 or t.shape[1] != 3 or t.size == 0:
            raise GeometryError("triangles must be a non-empty (m, 3) array")
        if t.min() < 0 or t.max() >= len(v):
            raise GeometryError("triangle vertex index out of range")
        if len(be) != len(bm):
            raise GeometryError("one marker per boundary edge is required")
        for name, arr in (("vertices", v), ("triangles", t), ("boundary_edges", be), ("boundary_markers", bm)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(self.signed_areas <= 0.0):
            raise GeometryError("every triangle must have strictly positive signed area")
        self._check_boundary()

    def _check_boundary(self):
        counts = np.bincount(self.triangle_edges.ravel(), minlength=len(self.edges))
        boundary = set(np.flatnonzero(counts == 1).tolist())
        keys = {tuple(e) for e in self.edges[sorted(boundary)].tolist()} if boundary else set()
        given = {tuple(sorted(e)) for e in self.boundary_edges.tolist()}
        if keys != given:
            raise GeometryError("boundary_edges must list exactly the edges owned by a single triangle")
        # each vertex on a closed loop appears in exactly two boundary edges
        deg = np.bincount(self.boundary_edges.ravel(), minlength=len(self.vertices))
        on_b = np.unique(self.boundary_edges)
        if np.any(deg[on_b] != 2):
            raise GeometryError("boundary edges do not form closed loops")

    # ---- topology -------------------------------------------------------
    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @cached_property
    def _edge_data(self):
        pairs = np.sort(self.triangles[:, _LOCAL_EDGES].reshape(-1, 2), axis=1)
        edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
        return edges, inverse.reshape(-1, 3)

    @property
    def edges(self):
        """Unique edges as (a, b) with a < b."""
        return self._edge_data[0]

    @property
    def triangle_edges(self):
        """(m, 3) edge index of local edges (0,1), (1,2), (2,0)."""
        return self._edge_data[1]

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def signed_areas(self):
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @property
    def area(self):
        return float(np.sum(self.signed_areas))

    @property
    def markers(self):
        return sorted({Marker(m) for m in self.boundary_markers.tolist()})

    @cached_property
    def _boundary_owner(self):
        """(k, 2) array of (owning triangle, local edge) per boundary edge."""
        return _find_directed(self.triangles, self.boundary_edges, len(self.vertices))

    def vertex_markers(self, marker):
        return np.unique(self.boundary_edges[self.boundary_markers == int(marker)])


class MeshQuality(NamedTuple):
    h_min: float
    h_max: float
    min_angle: float


class BoundaryFacets(NamedTuple):
    """Boundary edges of one marker, oriented with the fluid on the left."""

    vertices: np.ndarray  # (k, 2) vertex indices, start -> end
    start: np.ndarray  # (k, 2)
    end: np.ndarray  # (k, 2)
    normals: np.ndarray  # (k, 2) outward unit normals of the fluid domain
    lengths: np.ndarray  # (k,)
    triangles: np.ndarray  # (k,) owning triangle
    local_edges: np.ndarray  # (k,) local edge index inside the owning triangle


def mesh_quality(mesh: Mesh) -> MeshQuality:
    p = mesh.vertices[mesh.triangles]
    e = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]], axis=1)
    lengths = np.linalg.norm(e, axis=2)
    angles = []
    for i in range(3):
        a = -e[:, (i - 1) % 3]
        b = e[:, i]
        cosang = np.einsum("ij,ij->i", a, b) / (lengths[:, (i - 1) % 3] * lengths[:, i])
        angles.append(np.arccos(np.clip(cosang, -1.0, 1.0)))
    return MeshQuality(float(lengths.min()), float(lengths.max()), float(np.min(angles)))


def boundary_edges_of(mesh: Mesh, marker) -> BoundaryFacets:
    try:
        marker = Marker(marker)
    except ValueError as exc:
        raise KeyError(f"unknown boundary marker {marker!r}") from exc
    sel = np.flatnonzero(mesh.boundary_markers == int(marker))
    if len(sel) == 0:
        raise KeyError(f"marker {marker.name} does not occur in this mesh")
    owners = mesh._boundary_owner[sel]
    tri = mesh.triangles[owners[:, 0]]
    a = tri[np.arange(len(sel)), owners[:, 1]]
    b = tri[np.arange(len(sel)), (owners[:, 1] + 1) % 3]
    start = mesh.vertices[a]
    end = mesh.vertices[b]
    d = end - start
    lengths = np.linalg.norm(d, axis=1)
    normals = np.column_stack([d[:, 1], -d[:, 0]]) / lengths[:, None]
    return BoundaryFacets(np.column_stack([a, b]), start, end, normals, lengths, owners[:, 0], owners[:, 1])


# ---- generation -------------------------------------------------------------

def _as_box(box):
    xmin, ymin, xmax, ymax = (float(c) for c in box)
    if not (xmax > xmin and ymax > ymin):
        raise GeometryError(f"degenerate box {box!r}")
    return xmin, ymin, xmax, ymax


def _subdivide_loop(points, h_of_segment):
    out = []
    n = len(points)
    for i in range(n):
        a = points[i]
        b = points[(i + 1) % n]
        m = max(1, int(np.ceil(np.linalg.norm(b - a) / h_of_segment(a, b) - 1e-9)))
        t = np.arange(m)[:, None] / m
        out.append(a + t * (b - a))
    return np.vstack(out)


def _validate_hole(hole, box):
    hole = np.asarray(hole, dtype=float)
    if hole.ndim != 2 or hole.shape[0] < 3 or hole.shape[1] != 2:
        raise GeometryError("hole polygon needs at least three (x, y) points")
    if np.allclose(hole[0], hole[-1]):
        hole = hole[:-1]
    ring = LinearRing(hole)
    if not ring.is_simple or not ring.is_valid:
        raise GeometryError("hole polygon self-intersects")
    poly = Polygon(hole)
    if poly.area <= 0.0:
        raise GeometryError("hole polygon has zero area")
    xmin, ymin, xmax, ymax = box
    outer = Polygon([(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)])
    if not outer.contains(poly) or outer.exterior.distance(poly) <= 0.0:
        raise GeometryError("hole polygon must lie strictly inside the box")
    d = np.diff(np.vstack([hole, hole[:1]]), axis=0)
    if np.any(np.linalg.norm(d, axis=1) < 1e-12):
        raise GeometryError("hole polygon has duplicated vertices")
    return hole, poly


def _box_distance(points, box):
    xmin, ymin, xmax, ymax = box
    return np.minimum(
        np.minimum(points[:, 0] - xmin, xmax - points[:, 0]),
        np.minimum(points[:, 1] - ymin, ymax - points[:, 1]),
    )


def _triangle_areas(v, t):
    p = v[t]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    return 0.5 * np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def _build(box, target_h, wall_ratio, hole, min_angle, max_vertices, max_iterations):
    xmin, ymin, xmax, ymax = box
    wall_h = wall_ratio * target_h
    corners = np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])
    if hole is None:
        ring = None

        def size(points):
            return np.full(len(points), target_h)

        wall_pts = _subdivide_loop(corners, lambda a, b: target_h)
        loops = [(wall_pts, Marker.OUTER_WALL)]
        holes = []
    else:
        hole, poly = hole
        ring = poly.exterior

        def size(points):
            ds = shapely.distance(shapely.points(points), ring)
            dw = _box_distance(points, box)
            s = ds / np.maximum(ds + dw, 1e-300)
            return target_h * (1.0 + (wall_ratio - 1.0) * s)

        perimeter = ring.length
        if perimeter / target_h > max_vertices:
            raise MeshResourceError(
                f"target_h={target_h:g} needs more than {max_vertices} boundary vertices alone"
            )
        wall_pts = _subdivide_loop(corners, lambda a, b: wall_h)
        hole_pts = _subdivide_loop(hole, lambda a, b: target_h)
        loops = [(wall_pts, Marker.OUTER_WALL), (hole_pts, Marker.SWIMMER_BOUNDARY)]
        holes = [np.array(poly.representative_point().coords[0])]

    return _from_triangle(_triangulate(loops, holes, size, hole is not None, min_angle, max_vertices, max_iterations))


def _triangulate(loops, holes, size, keep_segments, min_angle, max_vertices, max_iterations):
    """Quality triangulation of closed loops; ``loops`` holds ``(points, segment_markers)``."""
    pts, segs, marks = [], [], []
    offset = 0
    for loop, marker in loops:
        n = len(loop)
        idx = np.arange(n)
        pts.append(loop)
        segs.append(offset + np.column_stack([idx, (idx + 1) % n]))
        marks.append(np.broadcast_to(np.asarray(marker, dtype=np.int64), (n,)))
        offset += n
    pslg = {
        "vertices": np.vstack(pts),
        "segments": np.vstack(segs),
        "segment_markers": np.concatenate(marks)[:, None],
    }
    if holes:
        pslg["holes"] = np.array(holes)
    if len(pslg["vertices"]) > max_vertices:
        raise MeshResourceError(f"boundary discretization exceeds {max_vertices} vertices")

    # Y keeps the prescribed boundary subdivision when a size field is in play
    suffix = "Y" if keep_segments else ""
    tri = _triangle.triangulate(pslg, f"pq{min_angle:g}Q" + suffix)
    for _ in range(max_iterations):
        v, t = tri["vertices"], tri["triangles"]
        if len(v) > max_vertices:
            raise MeshResourceError(f"mesh exceeds the vertex budget of {max_vertices}")
        h = size(v[t].mean(axis=1))
        amax = (np.sqrt(3.0) / 4.0) * h**2
        areas = _triangle_areas(v, t)
        if np.all(areas <= amax * 1.05):
            break
        # a large triangle touching a fine region would otherwise be refined to the fine size throughout
        tri["triangle_max_area"] = np.maximum(amax, areas / 16.0)
        tri = _triangle.triangulate(tri, f"rpq{min_angle:g}aQ" + suffix)
    if len(tri["vertices"]) > max_vertices:
        raise MeshResourceError(f"mesh exceeds the vertex budget of {max_vertices}")
    return tri


def _graded_points(a, b, size):
    """Points from ``a`` (included) towards ``b`` (excluded) spaced by the local size."""
    length = float(np.linalg.norm(b - a))
    ts = [0.0]
    while length > 0.0:
        h = float(size((a + ts[-1] * (b - a))[None, :])[0])
        nxt = ts[-1] + h / length
        if nxt >= 1.0 - 0.5 * h / length:
            break
        ts.append(nxt)
    # the stopping rule leaves a final gap of at least half the local size
    return a + np.array(ts)[:, None] * (b - a)


# Triangle relabels zero-marked boundary segments, so the cut line gets its own tag
_AXIS_MARK = 99


def _mirror_build(box, target_h, wall_ratio, hole, axis, min_angle, max_vertices, max_iterations):
    """Triangulate the half domain ``x <= axis`` and reflect it."""
    from scipy.spatial import cKDTree

    xmin, ymin, xmax, ymax = box
    hole, poly = hole
    scale = max(xmax - xmin, ymax - ymin)
    tol = 1e-9 * scale
    if abs(0.5 * (xmin + xmax) - axis) > tol:
        raise GeometryError("the box is not symmetric about the mirror axis")
    hole = hole.copy()
    on_axis = np.flatnonzero(np.abs(hole[:, 0] - axis) <= tol)
    if len(on_axis) != 2:
        raise GeometryError("a mirrored hole needs exactly two vertices on the axis")
    hole[on_axis, 0] = axis
    mirrored = hole * np.array([-1.0, 1.0]) + np.array([2.0 * axis, 0.0])
    dist, _ = cKDTree(hole).query(mirrored)
    if dist.max() > 1e-6 * scale:
        raise GeometryError("hole polygon is not mirror-symmetric about the axis")
    ring = poly.exterior

    def size(points):
        ds = shapely.distance(shapely.points(points), ring)
        dw = _box_distance(points, box)
        return target_h * (1.0 + (wall_ratio - 1.0) * ds / np.maximum(ds + dw, 1e-300))

    # left chain of the hole, from its lower axis vertex to the upper one
    i0, i1 = on_axis
    if hole[i0, 1] > hole[i1, 1]:
        i0, i1 = i1, i0
    n = len(hole)
    fwd = [(i0 + k) % n for k in range((i1 - i0) % n + 1)]
    bwd = [(i0 - k) % n for k in range((i0 - i1) % n + 1)]
    chain = fwd if hole[fwd[1:-1], 0].mean() < axis else bwd
    if np.any(hole[chain[1:-1], 0] >= axis):
        raise GeometryError("hole crosses the mirror axis more than twice")
    chain = hole[chain]
    bottom, top = chain[0], chain[-1]
    wall_h = wall_ratio * target_h

    corners = [np.array([axis, ymax]), np.array([xmin, ymax]), np.array([xmin, ymin]), np.array([axis, ymin])]
    pts, marks = [], []
    for a, b in zip(corners[:-1], corners[1:]):
        m = max(1, int(np.ceil(np.linalg.norm(b - a) / wall_h - 1e-9)))
        seg = a + (np.arange(m)[:, None] / m) * (b - a)
        pts.append(seg)
        marks.append(np.full(len(seg), int(Marker.OUTER_WALL)))
    lower_axis = _graded_points(corners[-1], bottom, size)
    pts.append(lower_axis)
    marks.append(np.full(len(lower_axis), _AXIS_MARK))
    hole_pts = []
    for a, b in zip(chain[:-1], chain[1:]):
        m = max(1, int(np.ceil(np.linalg.norm(b - a) / target_h - 1e-9)))
        hole_pts.append(a + (np.arange(m)[:, None] / m) * (b - a))
    hole_pts = np.vstack(hole_pts)
    pts.append(hole_pts)
    marks.append(np.full(len(hole_pts), int(Marker.SWIMMER_BOUNDARY)))
    upper_axis = _graded_points(top, corners[0], size)
    pts.append(upper_axis)
    marks.append(np.full(len(upper_axis), _AXIS_MARK))
    loop = np.vstack(pts)
    loop[np.abs(loop[:, 0] - axis) <= tol, 0] = axis
    tri = _triangulate([(loop, np.concatenate(marks))], [], size, True, min_angle, max_vertices, max_iterations)

    v = np.asarray(tri["vertices"], dtype=float)
    t = np.asarray(tri["triangles"], dtype=np.int64)
    seg = np.asarray(tri["segments"], dtype=np.int64)
    smark = np.asarray(tri["segment_markers"], dtype=np.int64).ravel()
    shared = v[:, 0] == axis
    if np.any(v[:, 0] > axis):
        raise GeometryError("half-domain triangulation crossed the mirror axis")
    image = np.arange(len(v))
    extra = np.flatnonzero(~shared)
    image[extra] = len(v) + np.arange(len(extra))
    v_all = np.vstack([v, np.column_stack([2.0 * axis - v[extra, 0], v[extra, 1]])])
    t_all = np.vstack([t, image[t][:, [0, 2, 1]]])
    keep = smark != _AXIS_MARK
    seg = seg[keep]
    seg_all = np.vstack([seg, image[seg]])
    return _from_triangle({
        "vertices": v_all,
        "triangles": t_all,
        "segments": seg_all,
        "segment_markers": np.concatenate([smark[keep], smark[keep]]),
    })


def _from_triangle(tri):
    v = np.asarray(tri["vertices"], dtype=float)
    t = np.asarray(tri["triangles"], dtype=np.int64)
    seg = np.asarray(tri["segments"], dtype=np.int64)
    markers = np.asarray(tri["segment_markers"], dtype=np.int64).ravel()
    p = v[t]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    flip = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] < 0
    t[flip] = t[flip][:, [0, 2, 1]]
    return Mesh(v, t, _orient_edges(t, seg), markers)


def _find_directed(triangles, edges, n_vertices):
    a = triangles[:, _LOCAL_EDGES[:, 0]].ravel()
    b = triangles[:, _LOCAL_EDGES[:, 1]].ravel()
    keys = a * n_vertices + b
    order = np.argsort(keys)
    sorted_keys = keys[order]

    def locate(k):
        pos = np.clip(np.searchsorted(sorted_keys, k), 0, len(sorted_keys) - 1)
        return pos, sorted_keys[pos] == k

    fwd = edges[:, 0] * n_vertices + edges[:, 1]
    bwd = edges[:, 1] * n_vertices + edges[:, 0]
    pf, hf = locate(fwd)
    pb, hb = locate(bwd)
    if not np.all(hf | hb):
        raise GeometryError("boundary edge does not belong to any triangle")
    flat = order[np.where(hf, pf, pb)]
    return np.column_stack([flat // 3, flat % 3])


def _orient_edges(triangles, edges):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    owner = _find_directed(triangles, edges, int(triangles.max()) + 1)
    tri = triangles[owner[:, 0]]
    rows = np.arange(len(edges))
    return np.column_stack([tri[rows, owner[:, 1]], tri[rows, (owner[:, 1] + 1) % 3]])


def generate_pierced_mesh(
    hole_polygon,
    box,
    target_h,
    *,
    wall_ratio=8.0,
    min_angle=20.0,
    max_vertices=1_000_000,
    max_iterations=12,
    mirror_x=None,
) -> Mesh:
    """Mesh the box ``(xmin, ymin, xmax, ymax)`` minus a simple polygonal hole.

    Hole edges get :attr:`Marker.SWIMMER_BOUNDARY`, box edges :attr:`Marker.OUTER_WALL`.
    The local size grows from ``target_h`` at the hole to ``wall_ratio * target_h``
    at the walls. With ``mirror_x`` the mesh is built exactly symmetric about the
    line ``x = mirror_x``; box and hole must then share that symmetry.
    """
    box = _as_box(box)
    if not target_h > 0:
        raise GeometryError("target_h must be positive")
    if hole_polygon is None or len(hole_polygon) == 0:
        raise GeometryError("a pierced mesh needs a non-empty hole polygon")
    hole = _validate_hole(hole_polygon, box)
    if mirror_x is not None:
        return _mirror_build(
            box, float(target_h), float(wall_ratio), hole, float(mirror_x), min_angle, max_vertices, max_iterations
        )
    return _build(box, float(target_h), float(wall_ratio), hole, min_angle, max_vertices, max_iterations)


def translate_hole(mesh: Mesh, shift, box) -> Mesh:
    """Move the hole of ``mesh`` rigidly by ``shift``, blending the motion to zero at the box walls.

    Vertices at least as far from the walls as the nearest hole vertex move by
    the full shift; closer ones move in proportion to their wall distance.
    The connectivity and markers are kept, so meshes of nearby placements stay
    comparable. Raises :class:`GeometryError` if a triangle would invert.
    """
    box = _as_box(box)
    shift = np.asarray(shift, dtype=float)
    v = mesh.vertices
    dw = _box_distance(v, box)
    on_hole = np.unique(boundary_edges_of(mesh, Marker.SWIMMER_BOUNDARY).vertices)
    reach = dw[on_hole].min()
    if not np.linalg.norm(shift) < reach:
        raise GeometryError("shift moves the hole onto the box")
    w = np.clip(dw / reach, 0.0, 1.0)
    return Mesh(v + w[:, None] * shift, mesh.triangles, mesh.boundary_edges, mesh.boundary_markers)


def generate_box_mesh(box, target_h, *, min_angle=20.0, max_vertices=1_000_000) -> Mesh:
    """Quasi-uniform unstructured mesh of a box; all edges are :attr:`Marker.OUTER_WALL`."""
    box = _as_box(box)
    if not target_h > 0:
        raise GeometryError("target_h must be positive")
    return _build(box, float(target_h), 1.0, None, min_angle, max_vertices, 12)


def rectangle_mesh(nx, ny=None, box=(0.0, 0.0, 1.0, 1.0), pattern="right") -> Mesh:
    """Structured mesh of ``nx * ny`` cells.

    ``pattern="right"`` splits every cell along one diagonal, ``"crisscross"``
    along both (adding the cell centre as a vertex).
    """
    ny = nx if ny is None else ny
    xmin, ymin, xmax, ymax = _as_box(box)
    xs = np.linspace(xmin, xmax, nx + 1)
    ys = np.linspace(ymin, ymax, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    verts = [np.column_stack([X.ravel(), Y.ravel()])]

    def vid(i, j):
        return i * (ny + 1) + j

    I, J = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    I, J = I.ravel(), J.ravel()
    v00, v10, v11, v01 = vid(I, J), vid(I + 1, J), vid(I + 1, J + 1), vid(I, J + 1)
    if pattern == "right":
        tris = np.vstack([np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])])
    elif pattern == "crisscross":
        c = (nx + 1) * (ny + 1) + np.arange(nx * ny)
        cx = 0.5 * (xs[I] + xs[I + 1])
        cy = 0.5 * (ys[J] + ys[J + 1])
        verts.append(np.column_stack([cx, cy]))
        tris = np.vstack([
            np.column_stack([v00, v10, c]),
            np.column_stack([v10, v11, c]),
            np.column_stack([v11, v01, c]),
            np.column_stack([v01, v00, c]),
        ])
    else:
        raise ValueError(f"unknown pattern {pattern!r}")
    bnd = []
    for i in range(nx):
        bnd.append((vid(i, 0), vid(i + 1, 0)))
        bnd.append((vid(i + 1, ny), vid(i, ny)))
    for j in range(ny):
        bnd.append((vid(nx, j), vid(nx, j + 1)))
        bnd.append((vid(0, j + 1), vid(0, j)))
    bnd = np.array(bnd)
    return Mesh(np.vstack(verts), tris, bnd, np.full(len(bnd), int(Marker.OUTER_WALL)))


# ---- plain-text interchange ---------------------------------------------------

def write_mesh(mesh: Mesh, path):
    """Header ``n_vertices n_triangles n_boundary_edges``, then one record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{mesh.n_vertices} {mesh.n_triangles} {len(mesh.boundary_edges)}\n")
        for x, y in mesh.vertices.tolist():
            fh.write(f"{x:.17g} {y:.17g}\n")
        for i, j, k in mesh.triangles.tolist():
            fh.write(f"{i} {j} {k}\n")
        for (i, j), m in zip(mesh.boundary_edges.tolist(), mesh.boundary_markers.tolist()):
            fh.write(f"{i} {j} {m}\n")


def read_mesh(path) -> Mesh:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    try:
        nv, nt, nb = (int(c) for c in lines[0])
        v = np.array(lines[1 : 1 + nv], dtype=float)
        t = np.array(lines[1 + nv : 1 + nv + nt], dtype=np.int64)
        b = np.array(lines[1 + nv + nt : 1 + nv + nt + nb], dtype=np.int64).reshape(-1, 3)
    except (ValueError, IndexError) as exc:
        raise GeometryError(f"malformed mesh file {path}: {exc}") from exc
    if len(v) != nv or len(t) != nt or len(b) != nb:
        raise GeometryError(f"mesh file {path} is truncated")
    return Mesh(v, t, b[:, :2], b[:, 2])
