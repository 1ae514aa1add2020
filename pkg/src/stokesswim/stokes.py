"""Taylor-Hood (P_k / P_{k-1}) discretization of the steady Stokes problem.

The bilinear form is ``mu * (grad u + grad u^T) : grad v - p div v`` with
continuity ``-q div u``; Dirichlet conditions are imposed strongly by
replacing constrained rows and columns with the identity, and the pressure
is gauged with a Lagrange multiplier enforcing zero mean.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, ConsistencyError
from .fem import DofMap, FemField, interpolate, jacobians, physical_points
from .linalg import TripletBuffer, compress, lu_factor, nested_dissection
from .mesh import Marker, Mesh, boundary_edges_of, mesh_quality, rectangle_mesh
from .quadrature import edge_quadrature, triangle_quadrature

VectorFunction = Callable[[np.ndarray, np.ndarray], tuple]


@dataclass
class StokesProblem:
    """Boundary-value problem on ``mesh``; data callables take ``(x, y)`` arrays."""

    mesh: Mesh
    mu: float = 1.0
    order: int = 2
    body_force: VectorFunction | None = None
    dirichlet: dict = field(default_factory=dict)
    neumann: dict = field(default_factory=dict)
    gauge: str | None = "zero-mean"

    def __post_init__(self):
        if not self.mu > 0:
            raise ConfigurationError("viscosity must be positive")
        present = set(self.mesh.markers)
        for m in present:
            has_d, has_n = m in self.dirichlet, m in self.neumann
            if has_d == has_n:
                raise ConfigurationError(
                    f"marker {m.name} needs exactly one of Dirichlet or Neumann data"
                )
        unknown = (set(self.dirichlet) | set(self.neumann)) - present
        if unknown:
            raise ConfigurationError(f"data given for markers absent from the mesh: {sorted(unknown)}")
        if not self.neumann and self.gauge != "zero-mean":
            raise ConfigurationError("an all-Dirichlet problem needs the zero-mean pressure gauge")
        if self.gauge not in ("zero-mean", None):
            raise ConfigurationError(f"unknown gauge {self.gauge!r}")


class DirichletConstraint(NamedTuple):
    dofs: np.ndarray  # global indices in the mixed system
    values: np.ndarray


def _facet_bary(local_edge, s):
    a, b = local_edge, (local_edge + 1) % 3
    bary = np.zeros((len(s), 3))
    bary[:, a] = 1.0 - s
    bary[:, b] += s
    return bary


class StokesDiscretization:
    """Mixed operator on one mesh; factorizations are cached per set of constrained DOFs."""

    def __init__(self, mesh: Mesh, mu=1.0, order=2, gauge=True, quad_order=None):
        if order < 2:
            raise ConfigurationError("Taylor-Hood pairs need velocity order >= 2")
        self.mesh = mesh
        self.mu = float(mu)
        self.order = order
        self.gauge = bool(gauge)
        self.V = DofMap(mesh, order)
        self.Q = DofMap(mesh, order - 1)
        self.nu = self.V.n_dofs
        self.p_offset = 2 * self.nu
        self.size = 2 * self.nu + self.Q.n_dofs + (1 if self.gauge else 0)
        self.rhs_quad_order = quad_order or min(2 * order + 6, 13)
        self._J, self._det, self._inv_t = jacobians(mesh)
        self.K, self.divergence = self._assemble_operator()
        self._factor_cache = {}

    # ---- assembly ---------------------------------------------------------
    def _assemble_operator(self):
        k = self.order
        rule = triangle_quadrature(2 * k)
        phi_q, _ = self.Q.basis.eval(rule.points)
        _, dphi = self.V.basis.eval(rule.points)
        G = np.einsum("qad,ted->tqae", dphi, self._inv_t)
        w = self._det[:, None] * rule.weights[None, :]
        lap = np.einsum("tq,tqad,tqbd->tab", w, G, G)
        cross = np.einsum("tq,tqae,tqbc->tabce", w, G, G)
        div = -np.einsum("tq,qm,tqbe->tmbe", w, phi_q, G)

        nu, mu = self.nu, self.mu
        cv = self.V.cells
        cq = self.Q.cells
        buf = TripletBuffer(self.size)
        for c in range(2):
            for e in range(2):
                block = mu * (cross[:, :, :, c, e] + (lap if c == e else 0.0))
                rows = c * nu + cv[:, :, None]
                cols = e * nu + cv[:, None, :]
                buf.add(np.broadcast_to(rows, block.shape), np.broadcast_to(cols, block.shape), block)
        divbuf = TripletBuffer(self.Q.n_dofs, 2 * nu)
        for e in range(2):
            block = div[:, :, :, e]
            rows = cq[:, :, None]
            cols = e * nu + cv[:, None, :]
            r = np.broadcast_to(rows, block.shape)
            cc = np.broadcast_to(cols, block.shape)
            divbuf.add(r, cc, block)
            buf.add(self.p_offset + r, cc, block)
            buf.add(cc, self.p_offset + r, block)
        if self.gauge:
            mass = np.einsum("tq,qm->tm", w, phi_q)
            gi = np.full(mass.shape, self.size - 1)
            buf.add(self.p_offset + cq, gi, mass)
            buf.add(gi, self.p_offset + cq, mass)
        return compress(buf, canonical=False), compress(divbuf, canonical=False)

    def load_vector(self, body_force, quad_order=None) -> np.ndarray:
        b = np.zeros(self.size)
        if body_force is None:
            return b
        rule = triangle_quadrature(quad_order or self.rhs_quad_order)
        phi, _ = self.V.basis.eval(rule.points)
        xq = physical_points(self.mesh, rule.points)
        fx, fy = body_force(xq[..., 0], xq[..., 1])
        w = self._det[:, None] * rule.weights[None, :]
        for c, fc in enumerate((fx, fy)):
            fc = np.broadcast_to(np.asarray(fc, dtype=float), w.shape)
            loc = np.einsum("tq,tq,qa->ta", w, fc, phi)
            np.add.at(b, c * self.nu + self.V.cells, loc)
        return b

    def neumann_vector(self, marker, traction) -> np.ndarray:
        b = np.zeros(self.size)
        facets = boundary_edges_of(self.mesh, marker)
        rule = edge_quadrature(min(2 * self.order + 4, 13))
        for le in range(3):
            sel = np.flatnonzero(facets.local_edges == le)
            if not len(sel):
                continue
            bary = _facet_bary(le, rule.points)
            phi, _ = self.V.basis.eval(bary)
            xq = physical_points(self.mesh, bary, facets.triangles[sel])
            gx, gy = traction(xq[..., 0], xq[..., 1])
            w = facets.lengths[sel, None] * rule.weights[None, :]
            cells = self.V.cells[facets.triangles[sel]]
            for c, gc in enumerate((gx, gy)):
                gc = np.broadcast_to(np.asarray(gc, dtype=float), w.shape)
                np.add.at(b, c * self.nu + cells, np.einsum("tq,tq,qa->ta", w, gc, phi))
        return b

    # ---- constraints ---------------------------------------------------------
    def velocity_dofs(self, marker) -> np.ndarray:
        s = self.V.boundary_dofs(marker)
        return np.concatenate([s, self.nu + s])

    def dirichlet_values(self, marker, datum) -> DirichletConstraint:
        """Constraint from a callable ``datum(x, y) -> (ux, uy)`` or an ``(n, 2)`` array on the marker DOFs."""
        s = self.V.boundary_dofs(marker)
        if callable(datum):
            xy = self.V.coordinates[s]
            ux, uy = datum(xy[:, 0], xy[:, 1])
            vals = np.column_stack([
                np.broadcast_to(np.asarray(ux, dtype=float), len(s)),
                np.broadcast_to(np.asarray(uy, dtype=float), len(s)),
            ])
        else:
            vals = np.asarray(datum, dtype=float).reshape(len(s), 2)
        return DirichletConstraint(np.concatenate([s, self.nu + s]), np.concatenate([vals[:, 0], vals[:, 1]]))

    @cached_property
    def ordering(self):
        """Symmetric elimination order: nested dissection of the velocity graph,
        each pressure placed right after its last velocity neighbour."""
        nu = self.nu
        cells = self.V.cells
        k = cells.shape[1]
        rows = np.repeat(cells, k, axis=1).ravel()
        cols = np.tile(cells, (1, k)).ravel()
        graph = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(nu, nu))
        scalar = nested_dissection(graph, self.V.coordinates)
        pos = np.empty(nu)
        pos[scalar] = np.arange(nu)
        vel_key = np.concatenate([pos, pos + 0.25])
        D = self.divergence
        starts = np.minimum(D.indptr[:-1], max(D.nnz - 1, 0))
        p_key = np.maximum.reduceat(vel_key[D.indices], starts) + 0.5
        p_key[np.diff(D.indptr) == 0] = nu + 1.0
        perm = np.argsort(np.concatenate([vel_key, p_key]), kind="stable")
        if self.gauge:
            # pressures alone are singular (constants); the multiplier must precede the last one
            perm = np.concatenate([perm[:-1], [self.size - 1], perm[-1:]])
        return perm

    def factorization(self, constrained_dofs):
        key = np.sort(np.asarray(constrained_dofs, dtype=np.int64)).tobytes()
        hit = self._factor_cache.get(key)
        if hit is None:
            hit = lu_factor(self.constrained_matrix(constrained_dofs), ordering=self.ordering)
            self._factor_cache = {key: hit}
        return hit

    def constrained_matrix(self, constrained_dofs):
        keep = np.ones(self.size)
        keep[np.asarray(constrained_dofs, dtype=np.int64)] = 0.0
        P = sp.diags(keep)
        return (P @ self.K @ P + sp.diags(1.0 - keep)).tocsc()

    def constrained_rhs(self, b, constraint: DirichletConstraint):
        g = np.zeros(self.size)
        g[constraint.dofs] = constraint.values
        rhs = b - self.K @ g
        rhs[constraint.dofs] = constraint.values
        return rhs

    def solve_constrained(self, b, constraint: DirichletConstraint) -> "StokesSolution":
        lu = self.factorization(constraint.dofs)
        x = lu.solve(self.constrained_rhs(b, constraint))
        x[constraint.dofs] = constraint.values
        return self.unpack(x)

    def unpack(self, x) -> "StokesSolution":
        u = FemField(self.V, x[: 2 * self.nu].copy(), 2)
        p = FemField(self.Q, x[self.p_offset : self.p_offset + self.Q.n_dofs].copy(), 1)
        lam = float(x[-1]) if self.gauge else 0.0
        return StokesSolution(u, p, self.mu, self, lam)

    def combine(self, constraints):
        dofs = np.concatenate([c.dofs for c in constraints])
        vals = np.concatenate([c.values for c in constraints])
        uniq, idx = np.unique(dofs, return_index=True)
        return DirichletConstraint(uniq, vals[idx])


@dataclass(frozen=True, eq=False)
class StokesSolution:
    velocity: FemField
    pressure: FemField
    mu: float
    discretization: StokesDiscretization
    multiplier: float = 0.0

    @property
    def mesh(self):
        return self.velocity.mesh

    @property
    def vector(self):
        """Unknowns in the layout of the mixed system."""
        tail = [self.multiplier] if self.discretization.gauge else []
        return np.concatenate([self.velocity.coefficients, self.pressure.coefficients, tail])

    def stress(self, bary, triangles=None):
        """Cauchy stress ``(nt, nq, 2, 2)`` at barycentric points."""
        g = self.velocity.gradients_at(bary, triangles)
        p = self.pressure.values_at(bary, triangles)[..., 0]
        sym = g + np.swapaxes(g, -1, -2)
        return self.mu * sym - p[..., None, None] * np.eye(2)

    def divergence_residual(self):
        """``max_m |int q_m div u_h|`` over pressure basis functions."""
        return float(np.max(np.abs(self.discretization.divergence @ self.velocity.coefficients)))

    def pressure_mean(self):
        return integrate_field(self.pressure)[0]

    def h1_norm(self):
        return float(np.sqrt(sum(v**2 for v in field_norms(self.velocity))))

    def __add__(self, other):
        return StokesSolution(
            self.velocity + other.velocity,
            self.pressure + other.pressure,
            self.mu,
            self.discretization,
            self.multiplier + other.multiplier,
        )

    def __mul__(self, scalar):
        return StokesSolution(
            self.velocity * scalar, self.pressure * scalar, self.mu, self.discretization, self.multiplier * scalar
        )

    __rmul__ = __mul__


def assemble(problem: StokesProblem, discretization=None):
    """Constrained mixed matrix, right-hand side and the Dirichlet record."""
    disc = discretization or StokesDiscretization(
        problem.mesh, problem.mu, problem.order, gauge=problem.gauge == "zero-mean"
    )
    b = disc.load_vector(problem.body_force)
    for marker, g in problem.neumann.items():
        b += disc.neumann_vector(marker, g)
    constraint = disc.combine([disc.dirichlet_values(m, d) for m, d in problem.dirichlet.items()]) if problem.dirichlet \
        else DirichletConstraint(np.empty(0, dtype=np.int64), np.empty(0))
    return disc.constrained_matrix(constraint.dofs), disc.constrained_rhs(b, constraint), constraint


def solve(problem: StokesProblem, discretization=None) -> StokesSolution:
    disc = discretization or StokesDiscretization(
        problem.mesh, problem.mu, problem.order, gauge=problem.gauge == "zero-mean"
    )
    b = disc.load_vector(problem.body_force)
    for marker, g in problem.neumann.items():
        b += disc.neumann_vector(marker, g)
    if problem.dirichlet:
        constraint = disc.combine([disc.dirichlet_values(m, d) for m, d in problem.dirichlet.items()])
    else:
        constraint = DirichletConstraint(np.empty(0, dtype=np.int64), np.empty(0))
    return disc.solve_constrained(b, constraint)


def stress_at(solution: StokesSolution, mu, triangle, barycentric):
    """Stress tensor ``-p I + mu (grad u + grad u^T)`` at one point."""
    b = np.asarray(barycentric, dtype=float)[None, :]
    t = np.array([int(triangle)])
    g = solution.velocity.gradients_at(b, t)[0, 0]
    p = solution.pressure.values_at(b, t)[0, 0, 0]
    return mu * (g + g.T) - p * np.eye(2)


# ---- integration helpers ------------------------------------------------------

def integrate_field(f: FemField, quad_order=None):
    rule = triangle_quadrature(quad_order or max(f.dof_map.order, 1))
    _, det, _ = jacobians(f.mesh)
    vals = f.values_at(rule.points)
    return np.einsum("t,q,tqc->c", det, rule.weights, vals)


def field_norms(f: FemField, quad_order=None):
    """(L2 norm, H1 seminorm) of a field."""
    rule = triangle_quadrature(quad_order or 2 * f.dof_map.order)
    _, det, _ = jacobians(f.mesh)
    w = det[:, None] * rule.weights[None, :]
    v = f.values_at(rule.points)
    g = f.gradients_at(rule.points)
    return float(np.sqrt(np.einsum("tq,tqc->", w, v**2))), float(np.sqrt(np.einsum("tq,tqcd->", w, g**2)))


def error_norms(f: FemField, exact, exact_grad=None, quad_order=None):
    """L2 error and (optionally) H1-seminorm error of ``f`` against callables of ``(x, y)``."""
    rule = triangle_quadrature(quad_order or min(2 * f.dof_map.order + 4, 13))
    _, det, _ = jacobians(f.mesh)
    w = det[:, None] * rule.weights[None, :]
    xq = physical_points(f.mesh, rule.points)
    ex = np.asarray(exact(xq[..., 0], xq[..., 1]), dtype=float)
    ex = np.moveaxis(ex, 0, -1) if ex.ndim == 3 else ex[..., None]
    e_l2 = float(np.sqrt(np.einsum("tq,tqc->", w, (f.values_at(rule.points) - ex) ** 2)))
    if exact_grad is None:
        return e_l2, None
    gx = np.asarray(exact_grad(xq[..., 0], xq[..., 1]), dtype=float)  # (c, d, t, q) or (d, t, q)
    if gx.ndim == 3:
        gx = gx[None]
    gx = np.transpose(gx, (2, 3, 0, 1))
    e_h1 = float(np.sqrt(np.einsum("tq,tqcd->", w, (f.gradients_at(rule.points) - gx) ** 2)))
    return e_l2, e_h1


# ---- manufactured solution -----------------------------------------------------

def bercovier_exact(x, y):
    """Velocity, pressure and forcing of the Bercovier-Engelman solution on the unit square."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ux = -256.0 * y * (y - 1) * (2 * y - 1) * x**2 * (x - 1) ** 2
    uy = 256.0 * x * (x - 1) * (2 * x - 1) * y**2 * (y - 1) ** 2
    p = (x - 0.5) * (y - 0.5)
    fx = 128.0 * (x**2 * (x - 1) ** 2 * 12 * (2 * y - 1) + 2 * (y - 1) * (2 * y - 1) * y * (12 * x**2 - 12 * x + 2)) + y - 0.5
    fy = -128.0 * (y**2 * (y - 1) ** 2 * 12 * (2 * x - 1) + 2 * (x - 1) * (2 * x - 1) * x * (12 * y**2 - 12 * y + 2)) + x - 0.5
    return np.array([ux, uy]), p, np.array([fx, fy])


def bercovier_velocity_gradient(x, y):
    """``grad u`` as ``[[dux/dx, dux/dy], [duy/dx, duy/dy]]``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    gy = y * (y - 1) * (2 * y - 1)  # y(y-1)(2y-1)
    dgy = 6 * y**2 - 6 * y + 1
    hx = x**2 * (x - 1) ** 2
    dhx = 2 * x * (x - 1) * (2 * x - 1)
    gx = x * (x - 1) * (2 * x - 1)
    dgx = 6 * x**2 - 6 * x + 1
    hy = y**2 * (y - 1) ** 2
    dhy = 2 * y * (y - 1) * (2 * y - 1)
    return np.array([
        [-256.0 * gy * dhx, -256.0 * dgy * hx],
        [256.0 * dgx * hy, 256.0 * gx * dhy],
    ])


def bercovier_problem(mesh: Mesh, order=2) -> StokesProblem:
    def force(x, y):
        return tuple(bercovier_exact(x, y)[2])

    def wall(x, y):
        return tuple(bercovier_exact(x, y)[0])

    return StokesProblem(mesh, mu=1.0, order=order, body_force=force, dirichlet={Marker.OUTER_WALL: wall})


class ConvergenceRow(NamedTuple):
    h: float
    h_min: float
    h_max: float
    e_u_l2: float
    e_u_h1: float
    e_p_l2: float


@dataclass
class ConvergenceTable:
    rows: list

    def __post_init__(self):
        h = [r.h for r in self.rows]
        if any(b >= a for a, b in zip(h, h[1:])):
            raise ValueError("mesh sizes must decrease strictly down the table")

    def _eoc(self, attr):
        e = np.array([getattr(r, attr) for r in self.rows])
        h = np.array([r.h for r in self.rows])
        return np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])

    @property
    def eoc_u_l2(self):
        return self._eoc("e_u_l2")

    @property
    def eoc_u_h1(self):
        return self._eoc("e_u_h1")

    @property
    def eoc_p_l2(self):
        return self._eoc("e_p_l2")


def convergence_study(levels=(8, 16, 32, 64), k=2, pattern="crisscross") -> ConvergenceTable:
    """Solve the manufactured problem on ``n x n`` structured meshes, ``h = 1/n``."""
    if len(levels) < 3:
        raise ValueError("a convergence study needs at least three levels")
    rows = []
    for n in levels:
        mesh = rectangle_mesh(n, pattern=pattern)
        sol = solve(bercovier_problem(mesh, order=k))
        q = min(2 * k + 4, 13)
        e_l2, e_h1 = error_norms(
            sol.velocity,
            lambda x, y: bercovier_exact(x, y)[0],
            bercovier_velocity_gradient,
            quad_order=q,
        )
        mean_p = sol.pressure_mean()
        e_p, _ = error_norms(sol.pressure, lambda x, y: bercovier_exact(x, y)[1] + mean_p, quad_order=q)
        mq = mesh_quality(mesh)
        rows.append(ConvergenceRow(1.0 / n, mq.h_min, mq.h_max, e_l2, e_h1, e_p))
    return ConvergenceTable(rows)


# ---- fundamental problems --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FundamentalSet:
    """Solutions for swimmer data e1, e2 (body axes), rotation about ``x0``, and deformation."""

    solutions: tuple
    discretization: StokesDiscretization
    x0: np.ndarray
    axes: np.ndarray
    flux_correction: float = 0.0

    def __getitem__(self, i):
        return self.solutions[i]

    def __len__(self):
        return len(self.solutions)


def boundary_flux(disc: StokesDiscretization, marker, constraint: DirichletConstraint):
    """``int g_h . n ds`` over one marker for the velocity trace defined by a constraint."""
    coeffs = np.zeros(2 * disc.nu)
    coeffs[constraint.dofs] = constraint.values
    u = FemField(disc.V, coeffs, 2)
    facets = boundary_edges_of(disc.mesh, marker)
    rule = edge_quadrature(2 * disc.order)
    total = 0.0
    for le in range(3):
        sel = np.flatnonzero(facets.local_edges == le)
        if not len(sel):
            continue
        vals = u.values_at(_facet_bary(le, rule.points), facets.triangles[sel])
        un = np.einsum("tqc,tc->tq", vals, facets.normals[sel])
        total += float(np.einsum("t,q,tq->", facets.lengths[sel], rule.weights, un))
    return total


def _nodal_normals(disc: StokesDiscretization, marker):
    facets = boundary_edges_of(disc.mesh, marker)
    s = disc.V.boundary_dofs(marker)
    acc = np.zeros((disc.nu, 2))
    k = disc.order
    for le in range(3):
        sel = np.flatnonzero(facets.local_edges == le)
        local = [le, (le + 1) % 3] + [3 + le * (k - 1) + j for j in range(k - 1)]
        dofs = disc.V.cells[facets.triangles[sel]][:, local]
        for col in range(dofs.shape[1]):
            np.add.at(acc, dofs[:, col], facets.normals[sel])
    n = acc[s]
    return n / np.linalg.norm(n, axis=1)[:, None]


def remove_boundary_flux(disc: StokesDiscretization, marker, constraint: DirichletConstraint):
    """Subtract a multiple of the nodal normal field so the discrete boundary flux vanishes."""
    flux = boundary_flux(disc, marker, constraint)
    s = disc.V.boundary_dofs(marker)
    n = _nodal_normals(disc, marker)
    unit = DirichletConstraint(np.concatenate([s, disc.nu + s]), np.concatenate([n[:, 0], n[:, 1]]))
    unit_flux = boundary_flux(disc, marker, unit)
    alpha = flux / unit_flux
    values = constraint.values.copy()
    lookup = {int(d): i for i, d in enumerate(constraint.dofs.tolist())}
    idx = np.array([lookup[int(d)] for d in unit.dofs.tolist()])
    values[idx] -= alpha * unit.values
    return DirichletConstraint(constraint.dofs, values), flux


def solve_fundamental_problems(
    mesh: Mesh,
    mu,
    deformation_velocity,
    x0,
    axes=None,
    order=2,
    enforce_zero_flux=True,
    discretization=None,
) -> FundamentalSet:
    """Four swimmer-driven Stokes problems sharing one factorization.

    Swimmer data: problem 1 -> ``axes[:, 0]``, problem 2 -> ``axes[:, 1]``,
    problem 3 -> ``(-(y - y0), x - x0)``, problem 4 -> ``deformation_velocity``.
    Outer walls are no-slip in all four.
    """
    present = set(mesh.markers)
    if not {Marker.SWIMMER_BOUNDARY, Marker.OUTER_WALL} <= present:
        raise ConfigurationError("mesh needs both swimmer and outer-wall boundaries")
    disc = discretization or StokesDiscretization(mesh, mu, order)
    if disc.mesh is not mesh:
        raise ConsistencyError("discretization belongs to another mesh")
    x0 = np.asarray(x0, dtype=float)
    axes = np.eye(2) if axes is None else np.asarray(axes, dtype=float)
    e1, e2 = axes[:, 0], axes[:, 1]
    wall = disc.dirichlet_values(Marker.OUTER_WALL, lambda x, y: (0.0, 0.0))

    def rot(x, y):
        return -(y - x0[1]), x - x0[0]

    if deformation_velocity is None:
        deformation_velocity = lambda x, y: (0.0, 0.0)  # noqa: E731
    data = [
        lambda x, y: (e1[0], e1[1]),
        lambda x, y: (e2[0], e2[1]),
        rot,
        deformation_velocity,
    ]
    b = np.zeros(disc.size)
    sols = []
    correction = 0.0
    for i, d in enumerate(data):
        swim = disc.dirichlet_values(Marker.SWIMMER_BOUNDARY, d)
        if i == 3 and enforce_zero_flux:
            swim, correction = remove_boundary_flux(disc, Marker.SWIMMER_BOUNDARY, swim)
        sols.append(disc.solve_constrained(b, disc.combine([swim, wall])))
    return FundamentalSet(tuple(sols), disc, x0, axes, correction)
