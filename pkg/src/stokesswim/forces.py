"""Fluid force and torque on a marked boundary, and the rigid-velocity resistance system.

Two evaluations of the same boundary integral are provided. The surface one
integrates the traction ``sigma n`` with edge quadrature. The volume one
uses the weak form: for a discrete lifting ``phi`` equal to a datum on the
boundary part and zero on all other Dirichlet DOFs,

    int_boundary phi . sigma n  =  int sigma : grad phi  -  int f . phi,

which only involves element integrals of the computed fields.

Conventions: ``n`` is the outward normal of the fluid domain, so on the
swimmer it points into the body; torque is ``(sigma n) ^ (x - x0)`` with
``a ^ b = a_x b_y - a_y b_x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConsistencyError
from .fem import FemField
from .linalg import dense_solve
from .mesh import Marker, boundary_edges_of
from .quadrature import edge_quadrature
from .stokes import FundamentalSet, StokesSolution, _facet_bary


def cross2(a, b):
    """Scalar 2D cross product ``a_x b_y - a_y b_x`` over the last axis."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


class Wrench2(NamedTuple):
    force: np.ndarray  # (2,)
    torque: float

    def as_vector(self):
        return np.array([self.force[0], self.force[1], self.torque])

    def project(self, axes):
        """(force . axes[:, 0], force . axes[:, 1], torque)."""
        axes = np.asarray(axes, dtype=float)
        return np.array([self.force @ axes[:, 0], self.force @ axes[:, 1], self.torque])


def surface_wrench(solution: StokesSolution, x0, marker=Marker.SWIMMER_BOUNDARY, quad_order=13, mesh=None) -> Wrench2:
    if mesh is not None and mesh is not solution.mesh:
        raise ConsistencyError("solution is defined on another mesh")
    facets = boundary_edges_of(solution.mesh, marker)
    rule = edge_quadrature(quad_order)
    x0 = np.asarray(x0, dtype=float)
    force = np.zeros(2)
    torque = 0.0
    for le in range(3):
        sel = np.flatnonzero(facets.local_edges == le)
        if not len(sel):
            continue
        sigma = solution.stress(_facet_bary(le, rule.points), facets.triangles[sel])
        traction = np.einsum("tqij,tj->tqi", sigma, facets.normals[sel])
        s = rule.points[None, :, None]
        xq = facets.start[sel, None, :] * (1.0 - s) + facets.end[sel, None, :] * s
        w = facets.lengths[sel, None] * rule.weights[None, :]
        force += np.einsum("tq,tqi->i", w, traction)
        torque += float(np.einsum("tq,tq->", w, cross2(traction, xq - x0)))
    return Wrench2(force, torque)


def lifting(solution_or_disc, marker, datum) -> FemField:
    """Velocity field equal to ``datum(x, y)`` at the marker DOFs and zero elsewhere."""
    disc = getattr(solution_or_disc, "discretization", solution_or_disc)
    c = disc.dirichlet_values(marker, datum)
    coeffs = np.zeros(2 * disc.nu)
    coeffs[c.dofs] = c.values
    return FemField(disc.V, coeffs, 2)


def volume_moment(solution: StokesSolution, lifting_field: FemField, body_force=None, quad_order=13) -> float:
    """``int sigma(u_h, p_h) : grad phi - int f . phi`` for one lifting ``phi``.

    The stress term is evaluated through the assembled operator, which
    integrates it exactly on affine triangles.
    """
    disc = solution.discretization
    if lifting_field.dof_map is not disc.V or lifting_field.value_dimension != 2:
        raise ConsistencyError("lifting must live in the velocity space of the solution")
    phi = lifting_field.coefficients
    nv = 2 * disc.nu
    Kx = disc.K[:nv] @ solution.vector
    if body_force is not None:
        Kx = Kx - disc.load_vector(body_force, quad_order)[:nv]
    return float(phi @ Kx)


def _liftings(disc, marker, x0, axes):
    e1, e2 = axes[:, 0], axes[:, 1]
    return (
        lifting(disc, marker, lambda x, y: (e1[0], e1[1])),
        lifting(disc, marker, lambda x, y: (e2[0], e2[1])),
        lifting(disc, marker, lambda x, y: (-(y - x0[1]), x - x0[0])),
    )


def volume_wrench(solution: StokesSolution, x0, marker=Marker.SWIMMER_BOUNDARY, body_force=None, quad_order=13) -> Wrench2:
    x0 = np.asarray(x0, dtype=float)
    l1, l2, l3 = _liftings(solution.discretization, marker, x0, np.eye(2))
    fx = volume_moment(solution, l1, body_force, quad_order)
    fy = volume_moment(solution, l2, body_force, quad_order)
    # (sigma n) ^ r = -(e_z ^ r) . sigma n
    torque = -volume_moment(solution, l3, body_force, quad_order)
    return Wrench2(np.array([fx, fy]), torque)


def wrench(solution, x0, method="volume", marker=Marker.SWIMMER_BOUNDARY):
    if method == "surface":
        return surface_wrench(solution, x0, marker)
    if method == "volume":
        return volume_wrench(solution, x0, marker)
    raise ValueError(f"unknown wrench method {method!r}")


@dataclass(frozen=True)
class ResistanceSystem:
    """``M (V1, V2, omega) = N``; rows are force along the two axes and torque."""

    M: np.ndarray
    N: np.ndarray
    method: str = "volume"
    axes: np.ndarray = None

    def symmetry_defect(self):
        """Relative asymmetry of ``diag(1, 1, -1) M``, the reciprocity-symmetric form."""
        SM = np.diag([1.0, 1.0, -1.0]) @ self.M
        return float(np.linalg.norm(SM - SM.T) / np.linalg.norm(SM))


def assemble_resistance(fund: FundamentalSet, method="volume") -> ResistanceSystem:
    x0, axes = fund.x0, fund.axes
    if method == "volume":
        disc = fund.discretization
        lifts = _liftings(disc, Marker.SWIMMER_BOUNDARY, x0, axes)
        nv = 2 * disc.nu
        Phi = np.stack([l.coefficients for l in lifts])
        X = np.stack([s.vector for s in fund.solutions], axis=1)
        W = Phi @ (disc.K[:nv] @ X)
        W[2] *= -1.0
    elif method == "surface":
        W = np.stack([surface_wrench(s, x0).project(axes) for s in fund.solutions], axis=1)
    else:
        raise ValueError(f"unknown wrench method {method!r}")
    return ResistanceSystem(W[:, :3].copy(), -W[:, 3].copy(), method, axes)


class RigidVelocity(NamedTuple):
    V: np.ndarray  # components along the body axes
    omega: float
    balance_residual: float


def solve_rigid_velocity(system: ResistanceSystem, fund: FundamentalSet | None = None) -> RigidVelocity:
    """Rigid velocity making the total wrench vanish.

    With ``fund`` the balance is re-checked on the recombined flow
    ``V1 u1 + V2 u2 + omega u3 + u4``; the residual is relative to the
    largest wrench of the individual problems.
    """
    sol = dense_solve(system.M, system.N)
    residual = 0.0
    if fund is not None:
        combined = sol[0] * fund[0] + sol[1] * fund[1] + sol[2] * fund[2] + fund[3]
        axes = system.axes if system.axes is not None else np.eye(2)
        total = wrench(combined, fund.x0, system.method).project(axes)
        scale = max(np.abs(system.M).max(), np.abs(system.N).max(), np.abs(system.M @ sol).max(), 1e-300)
        residual = float(np.abs(total).max() / scale)
    return RigidVelocity(sol[:2].copy(), float(sol[2]), residual)
