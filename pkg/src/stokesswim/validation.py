"""Self-checks shared by the command line and the acceptance tests.

Each function runs one benchmark and returns a :class:`Report` whose checks
carry the measured value next to the pass window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .forces import assemble_resistance, solve_rigid_velocity, surface_wrench, volume_wrench
from .mesh import Marker, generate_pierced_mesh, rectangle_mesh
from .rigid_body import (
    InertiaModel,
    LANGUSKI_INERTIA,
    integrate_rotation,
    languski_torque,
    rotational_rhs,
    run_languski,
    self_convergence_order,
)
from .stokes import (
    bercovier_exact,
    bercovier_problem,
    convergence_study,
    solve,
    solve_fundamental_problems,
)

# wrench of the manufactured flow on the unit square boundary, moments about the centre
BERCOVIER_CENTRE = (0.5, 0.5)
BERCOVIER_WRENCH = np.array([0.0, 0.0, -256.0 / 15.0])


class Check(NamedTuple):
    name: str
    value: float
    passed: bool
    detail: str


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def check(self, name, value, passed, detail):
        self.checks.append(Check(name, float(value), bool(passed), detail))

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def lines(self):
        return [f"{'PASS' if c.passed else 'FAIL'} {self.name}.{c.name}: {c.detail}" for c in self.checks]


# ---- Stokes -----------------------------------------------------------------

EOC_WINDOWS = {"u_l2": (2.7, 3.3), "u_h1": (1.8, 2.2), "p_l2": (1.7, 2.3)}


def validate_stokes(levels=(8, 16, 32, 64), order=2, pattern="crisscross") -> Report:
    table = convergence_study(levels, k=order, pattern=pattern)
    rep = Report("stokes", data={"table": table})
    shift = order - 2
    for key, eoc in (("u_l2", table.eoc_u_l2), ("u_h1", table.eoc_u_h1), ("p_l2", table.eoc_p_l2)):
        lo, hi = EOC_WINDOWS[key]
        lo, hi = lo + shift, hi + shift
        v = eoc[-1]
        rep.check(f"eoc_{key}", v, lo <= v <= hi, f"{v:.3f} in [{lo}, {hi}]")
    # one extra solve on the finest mesh for the discrete constraints
    mesh = rectangle_mesh(levels[-1], pattern=pattern)
    sol = solve(bercovier_problem(mesh, order=order))
    div = sol.divergence_residual()
    mean = abs(sol.pressure_mean())
    rep.check("divergence", div, div <= 1e-10, f"max |B u| = {div:.2e} <= 1e-10")
    rep.check("pressure_mean", mean, mean <= 1e-10 * mesh.area, f"|mean p| = {mean:.2e} <= 1e-10 * area")
    return rep


# ---- wrenches -----------------------------------------------------------------

def _bercovier_force(x, y):
    f = bercovier_exact(x, y)[2]
    return f[0], f[1]


def bercovier_wrench_errors(levels=(8, 16, 32), pattern="crisscross"):
    """Max-component error of surface and volume wrenches per level."""
    rows = []
    for n in levels:
        mesh = rectangle_mesh(n, pattern=pattern)
        sol = solve(bercovier_problem(mesh))
        ws = surface_wrench(sol, BERCOVIER_CENTRE, Marker.OUTER_WALL).as_vector()
        wv = volume_wrench(sol, BERCOVIER_CENTRE, Marker.OUTER_WALL, body_force=_bercovier_force).as_vector()
        rows.append((1.0 / n, float(np.abs(ws - BERCOVIER_WRENCH).max()), float(np.abs(wv - BERCOVIER_WRENCH).max())))
    return rows


def disc_polygon(centre, radius, h):
    n = max(16, int(math.ceil(2 * math.pi * radius / h)))
    phi = 2 * math.pi * np.arange(n) / n
    return np.column_stack([centre[0] + radius * np.cos(phi), centre[1] + radius * np.sin(phi)])


def disc_resistance(h, radius=0.15, centre=(0.45, 0.5), mu=1.0, method="surface", deformation=None, wall_ratio=4.0):
    """Resistance system of a disc in the unit box; the hole polygon is fixed across ``h``."""
    hole = disc_polygon(centre, radius, 0.005)
    mesh = generate_pierced_mesh(hole, (0.0, 0.0, 1.0, 1.0), h, wall_ratio=wall_ratio)
    fund = solve_fundamental_problems(mesh, mu, deformation, centre)
    return assemble_resistance(fund, method), fund


def _disc_stirring(centre):
    # tangential slip with a translating mode; zero net flux
    def v(x, y):
        dx, dy = x - centre[0], y - centre[1]
        r = np.hypot(dx, dy)
        c, s = dx / r, dy / r
        return -s * (1.0 + c), c * (1.0 + c)

    return v


def bench_forces(levels=(8, 16, 32), disc_h=(0.04, 0.02, 0.01), disc_radius=0.15) -> Report:
    rep = Report("forces")
    rows = bercovier_wrench_errors(levels)
    rep.data["bercovier"] = rows
    es = [r[1] for r in rows]
    ev = [r[2] for r in rows]
    rep.check("surface_converges", es[-1], all(b < a for a, b in zip(es, es[1:])),
              "surface errors " + ", ".join(f"{e:.2e}" for e in es) + " decrease")
    rep.check("volume_converges", ev[-1], ev[-1] <= es[0],
              "volume errors " + ", ".join(f"{e:.2e}" for e in ev) + f" <= coarsest surface error {es[0]:.2e}")
    rep.check("volume_beats_surface", ev[-1], ev[-1] <= es[-1], f"finest volume {ev[-1]:.2e} <= surface {es[-1]:.2e}")

    defects, residuals = [], []
    centre = (0.45, 0.5)
    for h in disc_h:
        system, fund = disc_resistance(h, disc_radius, centre, method="surface")
        defects.append(system.symmetry_defect())
    rep.data["disc_symmetry"] = list(zip(disc_h, defects))
    rep.check("symmetry_defect_decreases", defects[-1], all(b < a for a, b in zip(defects, defects[1:])),
              "surface M asymmetry " + ", ".join(f"{d:.2e}" for d in defects) + " strictly decreasing")

    stir = _disc_stirring(centre)
    out = []
    for mu in (1.0, 7.3):
        system, fund = disc_resistance(disc_h[0], disc_radius, centre, mu=mu, method="volume", deformation=stir)
        rv = solve_rigid_velocity(system, fund)
        residuals.append(rv.balance_residual)
        out.append(np.array([*rv.V, rv.omega]))
    scale = np.abs(out[0]).max()
    drift = float(np.abs(out[1] - out[0]).max() / scale)
    rep.check("balance_residual", max(residuals), max(residuals) <= 1e-8, f"max residual {max(residuals):.2e} <= 1e-8")
    rep.check("viscosity_invariance", drift, drift <= 1e-10, f"relative change of (V, omega) {drift:.2e} <= 1e-10")
    return rep


# ---- rigid body ------------------------------------------------------------------

FREE_SPIN_OMEGA0 = np.array([0.05, 0.02, 0.329])


def kinetic_energy(inertia, omega):
    omega = np.atleast_2d(omega)
    return 0.5 * np.einsum("ni,ij,nj->n", omega, inertia, omega)


def validate_rigidbody(t_final=60.0, dt=0.2, norm_steps=100_000, norm_dt=0.01, energy_dt=1e-3) -> Report:
    rep = Report("rigidbody")
    order = self_convergence_order(lambda h: np.concatenate(_final(t_final, h)), dt)
    rep.check("rk4_order", order, 3.8 <= order <= 4.2, f"self-convergence order {order:.3f} in [3.8, 4.2]")

    trace = run_languski(t_final=norm_steps * norm_dt, dt=norm_dt, record_every=norm_steps)
    d = trace.max_norm_defect
    rep.check("quaternion_norm", d, d <= 1e-12, f"max | |q| - 1 | over {norm_steps} steps {d:.2e} <= 1e-12")

    inertia = InertiaModel(1.0, LANGUSKI_INERTIA)
    zero = rotational_rhs(lambda t: np.zeros(3), inertia)
    revolution = 2 * math.pi / float(np.linalg.norm(FREE_SPIN_OMEGA0))
    n = int(math.ceil(revolution / energy_dt))
    free = integrate_rotation(zero, np.array([1.0, 0, 0, 0]), FREE_SPIN_OMEGA0, n * energy_dt, energy_dt, 100)
    E = kinetic_energy(LANGUSKI_INERTIA, free.omega)
    drift = float(np.abs(E - E[0]).max() / E[0])
    rep.check("energy", drift, drift <= 1e-6, f"relative kinetic energy drift over one revolution {drift:.2e} <= 1e-6")
    rep.data["trace"] = run_languski(t_final=t_final, dt=dt)
    return rep


def _final(t_final, dt):
    tr = run_languski(t_final=t_final, dt=dt, record_every=10**9)
    return tr.q[-1], tr.omega[-1]


# ---- scallop ---------------------------------------------------------------------

def validate_scallop(config) -> Report:
    """Scallop theorem check on a run of at least two periods."""
    from .swimmer import run

    traj = run(config)
    rep = Report("scallop", data={"trajectory": traj})
    disp = np.linalg.norm(traj.period_displacements(), axis=1)
    L = config.params.valve_length
    rep.data["period_displacements"] = disp
    rep.check("displacement", disp.max(), disp.max() <= 1e-3 * L,
              "per-period |dX| " + ", ".join(f"{d:.3e}" for d in disp) + f" m <= {1e-3 * L:.1e} m")
    if len(disp) >= 2:
        rel = abs(disp[1] - disp[0]) / disp[0]
        rep.check("periodicity", rel, rel <= 0.1, f"period 2 differs from period 1 by {100 * rel:.1f}% <= 10%")
    res = max(r.balance_residual for r in traj.records)
    rep.check("balance_residual", res, res <= 1e-8, f"max force-balance residual {res:.2e} <= 1e-8")
    return rep


def wall_sweep(config, centroids_y):
    """Net displacement over one period for each initial centroid height."""
    from .swimmer import run, with_centroid

    one = replace(config, t_final=config.params.period)
    out = []
    for y in centroids_y:
        c = (config.params.initial_centroid[0], float(y))
        traj = run(with_centroid(one, c))
        out.append(float(np.linalg.norm(traj.period_displacements()[0])))
    return np.array(out)
