"""Continuous Lagrange finite elements of order 1-3 on affine triangles."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import ConsistencyError, DomainError, UnsupportedOrderError
from .mesh import Marker, Mesh

SUPPORTED_ORDERS = (1, 2, 3)


def _lattice(k):
    """Barycentric node coordinates: vertices, edge nodes (edges 01, 12, 20), interior."""
    verts = np.eye(3)
    nodes = list(verts)
    for a, b in ((0, 1), (1, 2), (2, 0)):
        for j in range(1, k):
            nodes.append(((k - j) * verts[a] + j * verts[b]) / k)
    for i in range(1, k):
        for j in range(1, k - i):
            nodes.append(np.array([k - i - j, i, j], dtype=float) / k)
    return np.array(nodes)


def _monomial_exponents(k):
    return [(i, d - i) for d in range(k + 1) for i in range(d, -1, -1)]


class LagrangeBasis:
    """Nodal basis of order ``k`` on the reference triangle (0,0), (1,0), (0,1).

    Coordinates on the reference element are ``xi = lambda_1``, ``eta = lambda_2``.
    """

    def __init__(self, order):
        if order not in SUPPORTED_ORDERS:
            raise UnsupportedOrderError(f"Lagrange order must be one of {SUPPORTED_ORDERS}, got {order!r}")
        self.order = order
        self.node_coordinates = _lattice(order)
        self._exps = np.array(_monomial_exponents(order))
        vander = self._monomials(self.node_coordinates[:, 1], self.node_coordinates[:, 2])[0]
        self._coeffs = np.linalg.inv(vander)

    def __repr__(self):
        return f"LagrangeBasis(order={self.order})"

    @property
    def n_local(self):
        return len(self.node_coordinates)

    def _monomials(self, xi, eta):
        px, py = self._exps[:, 0], self._exps[:, 1]
        xi = np.asarray(xi, dtype=float)[..., None]
        eta = np.asarray(eta, dtype=float)[..., None]
        val = xi**px * eta**py
        dx = np.where(px > 0, px * xi ** np.maximum(px - 1, 0), 0.0) * eta**py
        dy = xi**px * np.where(py > 0, py * eta ** np.maximum(py - 1, 0), 0.0)
        return val, dx, dy

    def eval(self, bary):
        """Values ``(..., n_local)`` and reference gradients ``(..., n_local, 2)``."""
        bary = np.asarray(bary, dtype=float)
        val, dx, dy = self._monomials(bary[..., 1], bary[..., 2])
        c = self._coeffs
        return val @ c, np.stack([dx @ c, dy @ c], axis=-1)


@lru_cache(maxsize=None)
def lagrange_basis(order) -> LagrangeBasis:
    return LagrangeBasis(order)


def basis_eval(basis: LagrangeBasis, point):
    """Evaluate a basis at one barycentric point, rejecting points outside the simplex."""
    point = np.asarray(point, dtype=float)
    if point.shape != (3,):
        raise DomainError("barycentric point must have three coordinates")
    if abs(point.sum() - 1.0) > 1e-12 or np.any(point < -1e-12) or np.any(point > 1.0 + 1e-12):
        raise DomainError(f"barycentric point {point.tolist()} lies outside the reference triangle")
    return basis.eval(point)


# ---- affine geometry -------------------------------------------------------

def jacobians(mesh: Mesh):
    """Per-triangle Jacobian ``J`` of the reference map and its inverse transpose."""
    p = mesh.vertices[mesh.triangles]
    J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
    inv_t = np.empty_like(J)
    inv_t[:, 0, 0] = J[:, 1, 1] / det
    inv_t[:, 0, 1] = -J[:, 1, 0] / det
    inv_t[:, 1, 0] = -J[:, 0, 1] / det
    inv_t[:, 1, 1] = J[:, 0, 0] / det
    return J, det, inv_t


def physical_points(mesh: Mesh, bary, triangles=None):
    """Map barycentric points ``(nq, 3)`` into each selected triangle -> ``(nt, nq, 2)``."""
    tri = mesh.triangles if triangles is None else mesh.triangles[triangles]
    return np.einsum("qa,tad->tqd", np.asarray(bary, dtype=float), mesh.vertices[tri])


# ---- DOF numbering -----------------------------------------------------------

class DofMap:
    """Global numbering of a continuous scalar space of order ``k``.

    Vertex DOFs come first (index = vertex index), then ``k - 1`` DOFs per edge
    ordered from the lower to the higher vertex index, then interior DOFs.
    """

    def __init__(self, mesh: Mesh, order: int):
        self.mesh = mesh
        self.basis = lagrange_basis(order)
        self.order = order
        nv, ne, nt = mesh.n_vertices, mesh.n_edges, mesh.n_triangles
        k = order
        self.edge_offset = nv
        self.interior_offset = nv + (k - 1) * ne
        self.n_dofs = self.interior_offset + ((k - 1) * (k - 2) // 2) * nt

        cells = [mesh.triangles]
        tri = mesh.triangles
        local_pairs = ((0, 1), (1, 2), (2, 0))
        for le, (a, b) in enumerate(local_pairs):
            e = mesh.triangle_edges[:, le]
            forward = tri[:, a] < tri[:, b]
            for j in range(k - 1):
                jj = np.where(forward, j, k - 2 - j)
                cells.append((self.edge_offset + e * (k - 1) + jj)[:, None])
        n_int = (k - 1) * (k - 2) // 2
        if n_int:
            base = self.interior_offset + np.arange(nt)[:, None] * n_int
            cells.append(base + np.arange(n_int)[None, :])
        self.cells = np.ascontiguousarray(np.hstack(cells))
        self.cells.setflags(write=False)

    def __repr__(self):
        return f"DofMap(order={self.order}, n_dofs={self.n_dofs})"

    @cached_property
    def coordinates(self):
        pts = physical_points(self.mesh, self.basis.node_coordinates)
        out = np.empty((self.n_dofs, 2))
        out[self.cells.ravel()] = pts.reshape(-1, 2)
        out.setflags(write=False)
        return out

    def boundary_dofs(self, marker):
        """Scalar DOFs lying on boundary edges with the given marker."""
        from .mesh import boundary_edges_of

        facets = boundary_edges_of(self.mesh, marker)
        k = self.order
        idx = [facets.vertices.ravel()]
        if k > 1:
            pairs = np.sort(facets.vertices, axis=1)
            edge_ids = _edge_index(self.mesh, pairs)
            idx.append((self.edge_offset + edge_ids[:, None] * (k - 1) + np.arange(k - 1)[None, :]).ravel())
        return np.unique(np.concatenate(idx))


def _edge_index(mesh, pairs):
    n = mesh.n_vertices
    keys = mesh.edges[:, 0] * n + mesh.edges[:, 1]
    q = pairs[:, 0] * n + pairs[:, 1]
    pos = np.searchsorted(keys, q)
    if np.any(pos >= len(keys)) or np.any(keys[np.minimum(pos, len(keys) - 1)] != q):
        raise ConsistencyError("edge not found in mesh")
    return pos


def build_dof_map(mesh: Mesh, k: int) -> DofMap:
    if k not in SUPPORTED_ORDERS:
        raise UnsupportedOrderError(f"Lagrange order must be one of {SUPPORTED_ORDERS}, got {k!r}")
    return DofMap(mesh, k)


# ---- fields -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FemField:
    """Coefficients of a scalar or vector field; vector components are stored blockwise."""

    dof_map: DofMap
    coefficients: np.ndarray
    value_dimension: int = 1

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != (self.value_dimension * self.dof_map.n_dofs,):
            raise ConsistencyError(
                f"expected {self.value_dimension * self.dof_map.n_dofs} coefficients, got {c.shape}"
            )
        object.__setattr__(self, "coefficients", c)

    @property
    def mesh(self):
        return self.dof_map.mesh

    def components(self):
        """Coefficients as ``(value_dimension, n_dofs)``."""
        return self.coefficients.reshape(self.value_dimension, self.dof_map.n_dofs)

    def local(self, triangles=None):
        """Element coefficients ``(nt, value_dimension, n_local)``."""
        cells = self.dof_map.cells if triangles is None else self.dof_map.cells[triangles]
        return np.transpose(self.components()[:, cells], (1, 0, 2))

    def values_at(self, bary, triangles=None):
        """Values ``(nt, nq, value_dimension)`` at barycentric points in each triangle."""
        phi, _ = self.dof_map.basis.eval(bary)
        return np.einsum("qa,tca->tqc", phi, self.local(triangles))

    def gradients_at(self, bary, triangles=None):
        """Physical gradients ``(nt, nq, value_dimension, 2)``."""
        _, dphi = self.dof_map.basis.eval(bary)
        _, _, inv_t = jacobians(self.mesh)
        if triangles is not None:
            inv_t = inv_t[triangles]
        grad_ref = np.einsum("tca,qad->tqcd", self.local(triangles), dphi)
        return np.einsum("tqcd,ted->tqce", grad_ref, inv_t)

    def __add__(self, other):
        _same(self, other)
        return FemField(self.dof_map, self.coefficients + other.coefficients, self.value_dimension)

    def __mul__(self, scalar):
        return FemField(self.dof_map, float(scalar) * self.coefficients, self.value_dimension)

    __rmul__ = __mul__


def _same(a, b):
    if a.dof_map is not b.dof_map or a.value_dimension != b.value_dimension:
        raise ConsistencyError("fields live on different spaces")


def interpolate(dof_map: DofMap, func) -> FemField:
    """Nodal interpolant of ``func(x, y)``.

    ``func`` is vectorized over DOF coordinates and returns either one array
    (scalar field) or a tuple/stacked array of components (vector field).
    """
    x, y = dof_map.coordinates[:, 0], dof_map.coordinates[:, 1]
    vals = func(x, y)
    if isinstance(vals, (tuple, list)) or (isinstance(vals, np.ndarray) and vals.ndim == 2):
        comps = np.stack([np.broadcast_to(np.asarray(c, dtype=float), x.shape) for c in vals])
    else:
        comps = np.broadcast_to(np.asarray(vals, dtype=float), x.shape)[None, :]
    return FemField(dof_map, comps.reshape(-1).copy(), len(comps))


def evaluate_field(field: FemField, mesh: Mesh, triangle_index, barycentric, gradient=False):
    """Field value (and optionally physical gradient) at one point of one triangle."""
    if field.mesh is not mesh:
        raise ConsistencyError("field is defined on another mesh")
    if not 0 <= int(triangle_index) < mesh.n_triangles:
        raise IndexError(f"triangle index {triangle_index} out of range")
    basis_eval(field.dof_map.basis, barycentric)
    t = np.array([int(triangle_index)])
    b = np.asarray(barycentric, dtype=float)[None, :]
    val = field.values_at(b, t)[0, 0]
    val = val[0] if field.value_dimension == 1 else val
    if not gradient:
        return val
    g = field.gradients_at(b, t)[0, 0]
    return val, (g[0] if field.value_dimension == 1 else g)


def locate_point(mesh: Mesh, point):
    """Triangle index and barycentric coordinates of a point (brute force)."""
    p = mesh.vertices[mesh.triangles]
    J, det, _ = jacobians(mesh)
    d = np.asarray(point, dtype=float) - p[:, 0]
    l1 = (d[:, 0] * J[:, 1, 1] - d[:, 1] * J[:, 0, 1]) / det
    l2 = (J[:, 0, 0] * d[:, 1] - J[:, 1, 0] * d[:, 0]) / det
    l0 = 1.0 - l1 - l2
    worst = np.minimum(np.minimum(l0, l1), l2)
    t = int(np.argmax(worst))
    if worst[t] < -1e-10:
        raise DomainError(f"point {point!r} lies outside the mesh")
    bary = np.clip(np.array([l0[t], l1[t], l2[t]]), 0.0, 1.0)
    return t, bary / bary.sum()


__all__ = [
    "DofMap",
    "FemField",
    "LagrangeBasis",
    "Marker",
    "basis_eval",
    "build_dof_map",
    "evaluate_field",
    "interpolate",
    "jacobians",
    "lagrange_basis",
    "locate_point",
    "physical_points",
]
