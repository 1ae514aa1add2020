"""Two-valve scallop swimmer driven by a reciprocal opening stroke.

Body frame: the hinge sits at the origin and the valves open symmetrically
about the +x axis, at angles ``+alpha/2`` (upper) and ``-alpha/2`` (lower).
The outline is a disc of radius ``hinge_gap`` around the hinge joined to two
rectangular valves; rotating a valve about the hinge keeps the enclosed
area fixed, so the stroke is compatible with a closed no-slip box.

Each placed configuration is ``x = Y + R(theta) xi`` with ``Y`` the hinge
position and ``xi`` body coordinates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConfigurationError, DomainError, GeometryError, SimulationError, StokesSwimError
from .forces import assemble_resistance, cross2, solve_rigid_velocity
from .mesh import MeshQuality, generate_pierced_mesh, mesh_quality, translate_hole
from .quadrature import edge_quadrature
from .rigid_body import RigidState, _quat_rate, _rot, planar_angle, rk4_step, z_rotation
from .stokes import solve_fundamental_problems

log = logging.getLogger(__name__)


def perp(v):
    """``e_z ^ v`` for 2-vectors stored along the last axis."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def rotation2(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


# ---- parameters ---------------------------------------------------------------

@dataclass(frozen=True)
class ScallopParams:
    valve_length: float = 0.010
    valve_thickness: float = 0.001
    hinge_gap: float = 0.001
    mean_opening: float = 2.0 * math.asin(0.7)  # 14 mm tip to tip with 10 mm valves
    stroke_amplitude: float = math.radians(15.0)
    period: float = 2.0
    initial_centroid: tuple = (0.05, 0.05)
    initial_orientation: float = math.pi / 2
    min_gap: float = 5e-4
    arc_step: float = math.radians(6.0)

    def __post_init__(self):
        for name in ("valve_length", "valve_thickness", "hinge_gap", "period", "min_gap", "arc_step"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if not 0 < self.stroke_amplitude < self.mean_opening:
            raise ConfigurationError("stroke amplitude must lie in (0, mean_opening)")
        if self.hinge_gap <= 0.5 * self.valve_thickness:
            raise ConfigurationError("hinge_gap must exceed half the valve thickness")
        if self.mean_opening + self.stroke_amplitude >= 2 * math.pi - 4 * self._delta:
            raise ConfigurationError("maximum opening makes the valves overlap behind the hinge")

    @classmethod
    def from_tip_opening(cls, opening=0.014, **kw):
        L = kw.get("valve_length", cls.valve_length)
        if not 0 < opening < 2 * L:
            raise ConfigurationError("tip opening must be below twice the valve length")
        return cls(mean_opening=2.0 * math.asin(opening / (2 * L)), **kw)

    @property
    def _s0(self):
        """Distance from the hinge to where a valve side meets the hinge disc."""
        return math.sqrt(self.hinge_gap**2 - (0.5 * self.valve_thickness) ** 2)

    @property
    def _delta(self):
        return math.atan2(0.5 * self.valve_thickness, self._s0)

    def tip_opening(self, alpha):
        return 2.0 * self.valve_length * math.sin(0.5 * alpha)

    def inner_tip_gap(self, alpha):
        a = 0.5 * alpha
        return 2.0 * (self.valve_length * math.sin(a) - 0.5 * self.valve_thickness * math.cos(a))


@dataclass(frozen=True)
class CosineStroke:
    """``alpha(t) = mean + amplitude cos(2 pi t / period)``."""

    mean: float
    amplitude: float
    period: float

    @classmethod
    def from_params(cls, p: ScallopParams):
        return cls(p.mean_opening, p.stroke_amplitude, p.period)

    def alpha(self, t):
        return self.mean + self.amplitude * math.cos(2 * math.pi * (t % self.period) / self.period)

    def rate(self, t):
        w = 2 * math.pi / self.period
        return -self.amplitude * w * math.sin(w * (t % self.period))


# ---- geometry -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScallopOutline:
    """Closed counter-clockwise polygon in body coordinates (last point not repeated)."""

    points: np.ndarray
    alpha: float
    params: ScallopParams

    @property
    def area(self):
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def centroid(self):
        x, y = self.points[:, 0], self.points[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        c = x * yn - xn * y
        a = 0.5 * c.sum()
        return np.array([((x + xn) * c).sum(), ((y + yn) * c).sum()]) / (6.0 * a)

    def segments(self):
        return self.points, np.roll(self.points, -1, axis=0)

    def placed(self, hinge, theta):
        return np.asarray(hinge, dtype=float)[:2] + self.points @ rotation2(theta).T

    def distance(self, xi):
        """Distance of body points to the polygon."""
        a, b = self.segments()
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        d = b - a
        t = np.einsum("pk,sk->ps", xi, d) - np.einsum("sk,sk->s", a, d)[None, :]
        t = np.clip(t / np.einsum("sk,sk->s", d, d)[None, :], 0.0, 1.0)
        foot = a[None] + t[..., None] * d[None]
        return np.linalg.norm(xi[:, None, :] - foot, axis=2).min(axis=1)


def _arc(r, start, stop, max_step):
    n = max(1, int(math.ceil(abs(stop - start) / max_step - 1e-12)))
    ang = start + (stop - start) * np.arange(n + 1) / n
    return r * np.column_stack([np.cos(ang), np.sin(ang)])


def scallop_boundary(params: ScallopParams, alpha) -> ScallopOutline:
    """Outline at opening ``alpha``; mirror-symmetric about the body x axis by construction."""
    a = 0.5 * alpha
    r, t2, L = params.hinge_gap, 0.5 * params.valve_thickness, params.valve_length
    s0, delta = params._s0, params._delta
    if a - delta < 1e-3:
        raise GeometryError(f"opening {alpha:.4f} rad closes the gap between the valves at the hinge")
    if params.inner_tip_gap(alpha) < params.min_gap:
        raise GeometryError(
            f"inner tip gap {params.inner_tip_gap(alpha):.3e} m is below the minimum {params.min_gap:.3e} m"
        )
    if a + delta > math.pi - 1e-3:
        raise GeometryError(f"opening {alpha:.4f} rad makes the valves meet behind the hinge")
    d = np.array([math.cos(a), math.sin(a)])
    n = np.array([-math.sin(a), math.cos(a)])
    inner = _arc(r, 0.0, a - delta, params.arc_step)
    valve = np.array([L * d - t2 * n, L * d + t2 * n])
    outer = _arc(r, a + delta, math.pi, params.arc_step)
    upper = np.vstack([inner, valve, outer])  # from (r, 0) to (-r, 0)
    lower = upper[-2:0:-1] * np.array([1.0, -1.0])
    return ScallopOutline(np.vstack([upper, lower]), float(alpha), params)


# ---- deformation -----------------------------------------------------------------

def valve_rotation_rates(params: ScallopParams, alpha, alpha_rate, xi):
    """Angular rate about the hinge of each body point under the valve stroke.

    Valves rotate rigidly at ``+-alpha_rate/2``; on the hinge disc the rate is
    blended linearly in polar angle, so the disc moves tangentially.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    a = 0.5 * alpha
    t2 = 0.5 * params.valve_thickness
    s0, delta = params._s0, params._delta
    tol = 1e-9 * params.valve_length
    half = 0.5 * alpha_rate
    rates = np.empty(len(xi))
    phi = np.arctan2(xi[:, 1], xi[:, 0])
    on_inner = np.abs(phi) <= a - delta
    rates[on_inner] = half * phi[on_inner] / (a - delta)
    out = ~on_inner
    rates[out] = half * np.sign(phi[out]) * (math.pi - np.abs(phi[out])) / (math.pi - a - delta)
    for sgn in (1.0, -1.0):
        d = np.array([math.cos(a), sgn * math.sin(a)])
        nrm = np.array([-d[1], d[0]])
        s = xi @ d
        w = xi @ nrm
        on_valve = (s >= s0 - tol) & (np.abs(w) <= t2 + tol)
        rates[on_valve] = sgn * half
    return rates


def deformation_velocity(params: ScallopParams, stroke, t, xi, boundary: ScallopOutline | None = None, tol=None):
    """Body-frame shape-change velocity ``(n, 2)`` at body points ``xi``.

    With ``boundary`` given, points farther than ``tol`` from it (other than
    the hinge itself) are rejected.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    alpha, rate = stroke.alpha(t), stroke.rate(t)
    if boundary is not None:
        tol = 1e-9 * params.valve_length if tol is None else tol
        off = boundary.distance(xi) > tol
        off &= np.linalg.norm(xi, axis=1) > tol
        if np.any(off):
            raise DomainError(f"{int(off.sum())} point(s) do not lie on the swimmer boundary")
    return valve_rotation_rates(params, alpha, rate, xi)[:, None] * perp(xi)


class SelfPropulsionResidual(NamedTuple):
    linear: np.ndarray
    angular: float


def _boundary_quadrature(boundary, quad_order=13):
    pts = boundary.points if isinstance(boundary, ScallopOutline) else np.asarray(boundary, dtype=float)
    a, b = pts, np.roll(pts, -1, axis=0)
    rule = edge_quadrature(quad_order)
    s = rule.points[None, :, None]
    x = (a[:, None, :] * (1 - s) + b[:, None, :] * s).reshape(-1, 2)
    w = (np.linalg.norm(b - a, axis=1)[:, None] * rule.weights[None, :]).ravel()
    return x, w


def check_self_propulsion(v: Callable, boundary, x0=None, quad_order=13) -> SelfPropulsionResidual:
    """``(int v ds, int (x - x0) ^ v ds)`` over the closed polygon."""
    x, w = _boundary_quadrature(boundary, quad_order)
    if x0 is None:
        x0 = boundary.centroid if isinstance(boundary, ScallopOutline) else np.zeros(2)
    vals = np.asarray(v(x), dtype=float).reshape(-1, 2)
    return SelfPropulsionResidual(w @ vals, float(w @ cross2(x - np.asarray(x0, dtype=float), vals)))


@dataclass(frozen=True, eq=False)
class CorrectedDeformation:
    """``v - (translation + rotation e_z ^ (x - x0))`` with both boundary integrals zero."""

    base: Callable
    translation: np.ndarray
    rotation: float
    x0: np.ndarray

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.asarray(self.base(x), dtype=float) - self.translation - self.rotation * perp(x - self.x0)


def correct_deformation(v: Callable, boundary, x0=None, quad_order=13) -> CorrectedDeformation:
    x, w = _boundary_quadrature(boundary, quad_order)
    if w.sum() <= 1e-300:
        raise GeometryError("boundary has zero length")
    if x0 is None:
        x0 = boundary.centroid if isinstance(boundary, ScallopOutline) else np.zeros(2)
    x0 = np.asarray(x0, dtype=float)
    r = x - x0
    basis = [np.tile([1.0, 0.0], (len(x), 1)), np.tile([0.0, 1.0], (len(x), 1)), perp(r)]

    def moments(vals):
        return np.array([w @ vals[:, 0], w @ vals[:, 1], w @ cross2(r, vals)])

    G = np.column_stack([moments(b) for b in basis])
    coef = np.linalg.solve(G, moments(np.asarray(v(x), dtype=float).reshape(-1, 2)))
    return CorrectedDeformation(v, coef[:2].copy(), float(coef[2]), x0)


# ---- simulation --------------------------------------------------------------------

@dataclass(frozen=True)
class SimulationConfig:
    params: ScallopParams = field(default_factory=ScallopParams)
    mu: float = 1.0
    box: tuple = (0.0, 0.0, 0.1, 0.1)
    target_h: float = 5e-4
    wall_ratio: float = 8.0
    dt: float | None = None
    t_final: float | None = None
    method: str = "volume"
    deform: bool = True
    snapshot_dir: str | None = None
    # build a mirror-image mesh whenever the placed swimmer is symmetric within the box
    symmetric_mesh: bool = True
    # "morph": mesh at the initial position and translate; "remesh": mesh at the current position
    mesh_motion: str = "morph"

    def __post_init__(self):
        if self.dt is None:
            object.__setattr__(self, "dt", self.params.period / 100.0)
        if self.t_final is None:
            object.__setattr__(self, "t_final", self.params.period)
        if not self.mu > 0 or not self.target_h > 0 or not self.dt > 0:
            raise ConfigurationError("mu, target_h and dt must be positive")
        if self.t_final < 0:
            raise ConfigurationError("t_final must be non-negative")
        if self.mesh_motion not in ("morph", "remesh"):
            raise ConfigurationError(f"unknown mesh motion {self.mesh_motion!r}")
        if self.method not in ("surface", "volume"):
            raise ConfigurationError(f"unknown wrench method {self.method!r}")

    @property
    def stroke(self):
        return CosineStroke.from_params(self.params)

    @property
    def n_steps(self):
        n = self.t_final / self.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ConfigurationError("t_final must be a multiple of dt")
        return int(round(n))

    def initial_state(self) -> RigidState:
        p = self.params
        outline = scallop_boundary(p, self.stroke.alpha(0.0))
        theta = p.initial_orientation
        hinge = np.asarray(p.initial_centroid, dtype=float) - rotation2(theta) @ outline.centroid
        return RigidState.at_rest((hinge[0], hinge[1], 0.0), z_rotation(theta))


class StepRecord(NamedTuple):
    step: int
    t: float
    centroid: np.ndarray  # laboratory frame
    hinge: np.ndarray
    theta: float
    alpha: float
    V: np.ndarray  # laboratory-frame velocity of the centroid
    omega: float
    balance_residual: float
    symmetry_defect: float
    M: np.ndarray
    N: np.ndarray
    n_triangles: int
    quality: MeshQuality


@dataclass
class SimulationTrajectory:
    records: list
    config: SimulationConfig

    def __len__(self):
        return len(self.records)

    @property
    def t(self):
        return np.array([r.t for r in self.records])

    @property
    def centroid(self):
        return np.array([r.centroid for r in self.records])

    @property
    def theta(self):
        return np.array([r.theta for r in self.records])

    def period_displacements(self, period=None):
        """Centroid displacement over each complete period."""
        period = period or self.config.params.period
        per = int(round(period / self.config.dt))
        c = self.centroid
        idx = np.arange(0, len(c), per)
        return np.diff(c[idx], axis=0)


class StepResult(NamedTuple):
    body_velocity: np.ndarray  # hinge-frame translation rate U (body components)
    theta_rate: float
    record: StepRecord
    fields: object


def _mirror_axis(hinge, theta, config):
    """Vertical symmetry line of the placed swimmer, when the box shares it."""
    if not config.symmetric_mesh:
        return None
    xmin, _, xmax, _ = config.box
    c = 0.5 * (xmin + xmax)
    tol = 1e-9 * config.params.valve_length
    if abs(np.cos(theta)) > 1e-9 or abs(hinge[0] - c) > tol:
        return None
    return c


def _mesh_at(outline, hinge, theta, config):
    return generate_pierced_mesh(
        outline.placed(hinge, theta),
        config.box,
        config.target_h,
        wall_ratio=config.wall_ratio,
        mirror_x=_mirror_axis(hinge, theta, config),
    )


def _placed_mesh(outline, hinge, theta, config):
    """Mesh for the swimmer at ``(hinge, theta)``.

    With ``mesh_motion == "morph"`` the mesh is generated at the initial hinge
    position and translated, so its connectivity depends on the stroke phase
    only and repeats from one period to the next.
    """
    if config.mesh_motion == "morph":
        ref = config.initial_state()
        if abs(planar_angle(ref.q) - theta) <= 1e-12:
            origin = ref.X[:2]
            try:
                return translate_hole(_mesh_at(outline, origin, theta, config), hinge - origin, config.box)
            except GeometryError:
                log.debug("translated mesh invalid at hinge %s, remeshing", hinge)
    return _mesh_at(outline, hinge, theta, config)


def evaluate_configuration(state: RigidState, t, step, config: SimulationConfig, keep_fields=False) -> StepResult:
    """Remesh the placed swimmer and solve for its rigid velocity at time ``t``."""
    p = config.params
    stroke = config.stroke
    alpha = stroke.alpha(t)
    theta = planar_angle(state.q)
    hinge = state.X[:2].copy()
    R2 = rotation2(theta)
    try:
        outline = scallop_boundary(p, alpha)
        xi0 = outline.centroid
        x0 = hinge + R2 @ xi0
        mesh = _placed_mesh(outline, hinge, theta, config)
        if config.deform:
            base = lambda xi: deformation_velocity(p, stroke, t, xi)  # noqa: E731
            corr = correct_deformation(base, outline, xi0)
        else:
            corr = CorrectedDeformation(lambda xi: np.zeros_like(xi), np.zeros(2), 0.0, xi0)

        def lab_velocity(x, y):
            xi = (np.column_stack([np.ravel(x), np.ravel(y)]) - hinge) @ R2
            v = corr(xi) @ R2.T
            return v[:, 0].reshape(np.shape(x)), v[:, 1].reshape(np.shape(x))

        fund = solve_fundamental_problems(mesh, config.mu, lab_velocity, x0, axes=R2)
        system = assemble_resistance(fund, config.method)
        rigid = solve_rigid_velocity(system, fund)
    except StokesSwimError as exc:
        raise SimulationError(f"step {step} (t={t:.6g}): {exc}", step=step) from exc

    theta_rate = rigid.omega - corr.rotation
    U = rigid.V - corr.translation - theta_rate * perp(xi0)
    record = StepRecord(
        step=step,
        t=t,
        centroid=x0,
        hinge=hinge,
        theta=theta,
        alpha=alpha,
        V=R2 @ rigid.V,
        omega=rigid.omega,
        balance_residual=rigid.balance_residual,
        symmetry_defect=assemble_resistance(fund, "surface").symmetry_defect() if config.method == "surface" else 0.0,
        M=system.M,
        N=system.N,
        n_triangles=mesh.n_triangles,
        quality=mesh_quality(mesh),
    )
    return StepResult(U, theta_rate, record, fund if keep_fields else None)


def _frozen_rate_rhs(U, theta_rate):
    V3 = np.array([U[0], U[1], 0.0])
    w3 = (0.0, 0.0, theta_rate)
    zeros = np.zeros(6)

    def rhs(t, y):
        q = y[3:7]
        return np.concatenate([_rot(q) @ V3, _quat_rate(q, w3), zeros])

    return rhs


def simulation_step(state: RigidState, t, dt, config: SimulationConfig, step=0):
    """Solve at ``t`` and advance the hinge frame to ``t + dt``; returns ``(state, record)``.

    The rigid velocity is held fixed over the step.
    """
    res = evaluate_configuration(state, t, step, config, keep_fields=config.snapshot_dir is not None)
    if res.fields is not None:
        _snapshot(res, config, step)
    moving = state.replace(V=(res.body_velocity[0], res.body_velocity[1], 0.0), omega=(0.0, 0.0, res.theta_rate))
    new = rk4_step(_frozen_rate_rhs(res.body_velocity, res.theta_rate), moving, t, dt)
    return new, res.record


def _snapshot(res: StepResult, config, step):
    from pathlib import Path

    from .io import write_vtk

    fund = res.fields
    path = Path(config.snapshot_dir)
    path.mkdir(parents=True, exist_ok=True)
    write_vtk(fund.discretization.mesh, {"u_deformation": fund[3].velocity, "p_deformation": fund[3].pressure},
              path / f"step_{step:05d}.vtk")


def run(config: SimulationConfig, progress: Callable | None = None) -> SimulationTrajectory:
    """Integrate from 0 to ``t_final``; one record per time level including both ends."""
    state = config.initial_state()
    n = config.n_steps
    records = []
    for i in range(n):
        t = i * config.dt
        state, rec = simulation_step(state, t, config.dt, config, step=i)
        records.append(rec)
        if progress is not None:
            progress(rec)
        log.debug("step %d t=%.4f centroid=%s", i, t, rec.centroid)
    records.append(evaluate_configuration(state, n * config.dt, n, config).record)
    return SimulationTrajectory(records, config)


def with_centroid(config: SimulationConfig, centroid) -> SimulationConfig:
    return replace(config, params=replace(config.params, initial_centroid=tuple(centroid)))
