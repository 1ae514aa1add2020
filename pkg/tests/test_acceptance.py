"""End-to-end acceptance checks, one test per criterion.

Each test prints (and records for the terminal summary) a single
``PASS|FAIL criterion N: ...`` line. The scallop runs take roughly ten
minutes in total on one core.
"""
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from stokesswim.mesh import rectangle_mesh
from stokesswim.quadrature import edge_quadrature, triangle_quadrature
from stokesswim.stokes import bercovier_problem, solve
from stokesswim.swimmer import ScallopParams, SimulationConfig
from stokesswim.validation import (
    bench_forces,
    disc_resistance,
    validate_rigidbody,
    validate_scallop,
    validate_stokes,
    wall_sweep,
)

WALL_HEIGHTS = (0.012, 0.008)  # centroid heights above the bottom wall; the centred run is the far field


def report(number, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert passed, line


def failures(rep, names=None):
    return [c for c in rep.checks if not c.passed and (names is None or c.name in names)]


@pytest.fixture(scope="module")
def forces_report():
    return bench_forces(levels=(8, 16, 32), disc_h=(0.04, 0.02, 0.01), disc_radius=0.15)


@pytest.fixture(scope="module")
def scallop_report():
    cfg = SimulationConfig(params=ScallopParams(), t_final=2 * ScallopParams().period)
    return validate_scallop(cfg)


def test_criterion_1_stokes_convergence():
    t0 = time.perf_counter()
    rep = validate_stokes(levels=(8, 16, 32, 64), order=2)
    elapsed = time.perf_counter() - t0
    t = rep.data["table"]
    ok = not failures(rep, {"eoc_u_l2", "eoc_u_h1", "eoc_p_l2"}) and elapsed < 120.0
    report(1, ok, f"EOC u_L2 {t.eoc_u_l2[-1]:.3f} in [2.7, 3.3], u_H1 {t.eoc_u_h1[-1]:.3f} in [1.8, 2.2], "
                  f"p_L2 {t.eoc_p_l2[-1]:.3f} in [1.7, 2.3], {elapsed:.0f} s < 120 s")


def test_criterion_2_divergence_and_gauge():
    worst_div, worst_mean = 0.0, 0.0
    for n in (8, 16, 32, 64):
        mesh = rectangle_mesh(n)
        sol = solve(bercovier_problem(mesh))
        worst_div = max(worst_div, sol.divergence_residual())
        worst_mean = max(worst_mean, abs(sol.pressure_mean()) / mesh.area)
    _, fund = disc_resistance(0.02)
    for sol in fund.solutions:
        worst_div = max(worst_div, sol.divergence_residual())
        worst_mean = max(worst_mean, abs(sol.pressure_mean()) / sol.mesh.area)
    ok = worst_div <= 1e-10 and worst_mean <= 1e-10
    report(2, ok, f"max divergence residual {worst_div:.2e} <= 1e-10, max |mean p| / area {worst_mean:.2e} <= 1e-10 "
                  "over 4 Bercovier and 4 disc solves")


def test_criterion_3_wrench_formulations(forces_report):
    rows = forces_report.data["bercovier"]
    es = [r[1] for r in rows]
    ev = [r[2] for r in rows]
    ok = not failures(forces_report, {"surface_converges", "volume_converges", "volume_beats_surface"})
    report(3, ok, "errors vs symbolic wrench: surface " + ", ".join(f"{e:.2e}" for e in es)
                  + "; volume " + ", ".join(f"{e:.2e}" for e in ev) + "; finest volume <= surface")


def test_criterion_4_rigid_body():
    rep = validate_rigidbody(t_final=60.0, dt=0.2, norm_steps=100_000, norm_dt=0.01, energy_dt=1e-3)
    order, norm, energy = (c.value for c in rep.checks)
    report(4, rep.passed, f"(a) RK4 order {order:.3f} in [3.8, 4.2]; (b) max norm defect {norm:.1e} <= 1e-12 "
                          f"over 1e5 steps; (c) energy drift {energy:.1e} <= 1e-6 over one revolution")


def test_criterion_5_resistance_system(forces_report, scallop_report):
    defects = [d for _, d in forces_report.data["disc_symmetry"]]
    step_balance = max(r.balance_residual for r in scallop_report.data["trajectory"].records)
    disc_balance = next(c.value for c in forces_report.checks if c.name == "balance_residual")
    drift = next(c.value for c in forces_report.checks if c.name == "viscosity_invariance")
    ok = (not failures(forces_report, {"symmetry_defect_decreases", "balance_residual", "viscosity_invariance"})
          and step_balance <= 1e-8)
    report(5, ok, f"balance residual disc {disc_balance:.1e}, scallop steps {step_balance:.1e} <= 1e-8; "
                  "symmetry defect " + ", ".join(f"{d:.2e}" for d in defects)
                  + f" decreasing; viscosity invariance {drift:.1e} <= 1e-10")


@pytest.mark.slow
def test_criterion_6_scallop_theorem(scallop_report):
    disp = scallop_report.data["period_displacements"]
    L = ScallopParams().valve_length
    rel = abs(disp[1] - disp[0]) / disp[0]
    ok = not failures(scallop_report, {"displacement", "periodicity"})
    report(6, ok, f"|dX| per period {disp[0]:.3e}, {disp[1]:.3e} m <= {1e-3 * L:.0e} m; "
                  f"period 2 within {100 * rel:.1f}% of period 1 (<= 10%)")


@pytest.mark.slow
def test_criterion_7_wall_effect(scallop_report):
    far = float(scallop_report.data["period_displacements"][0])
    cfg = scallop_report.data["trajectory"].config
    near = wall_sweep(cfg, WALL_HEIGHTS)
    values = np.array([far, *near])
    ok = bool(np.all(np.diff(values) > 0) and values[-1] >= 5 * values[0])
    heights = (cfg.params.initial_centroid[1], *WALL_HEIGHTS)
    report(7, ok, "per-period |dX| at centroid height " + ", ".join(f"{y * 1e3:g} mm: {v:.3e} m"
                  for y, v in zip(heights, values)) + f"; strictly increasing, closest / far = {values[-1] / far:.1f} >= 5")


def test_criterion_8_quadrature():
    from math import factorial

    worst = 0.0
    for r in (triangle_quadrature(13),):
        xi, eta = r.points[:, 1], r.points[:, 2]
        for a in range(14):
            for b in range(14 - a):
                exact = factorial(a) * factorial(b) / factorial(a + b + 2)
                worst = max(worst, abs(r.weights @ (xi**a * eta**b) - exact) / exact)
    e = edge_quadrature(13)
    for a in range(14):
        worst = max(worst, abs(e.weights @ e.points**a * (a + 1) - 1.0))
    report(8, worst <= 1e-13, f"max relative error over monomials of degree <= 13 on triangle and edge {worst:.1e} <= 1e-13")
