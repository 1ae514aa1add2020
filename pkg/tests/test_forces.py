import numpy as np
import pytest

from stokesswim.errors import ConsistencyError
from stokesswim.fem import interpolate
from stokesswim.forces import (
    ResistanceSystem,
    assemble_resistance,
    cross2,
    lifting,
    solve_rigid_velocity,
    surface_wrench,
    volume_moment,
    volume_wrench,
)
from stokesswim.mesh import Marker, generate_pierced_mesh, rectangle_mesh
from stokesswim.stokes import StokesDiscretization, StokesSolution, solve_fundamental_problems
from stokesswim.validation import BERCOVIER_WRENCH, bercovier_wrench_errors, disc_polygon

CENTRE = (0.5, 0.5)


def test_cross_product_convention():
    assert cross2([1.0, 0.0], [0.0, 1.0]) == 1.0
    assert cross2([0.0, 1.0], [1.0, 0.0]) == -1.0


def test_oracle_value():
    # symbolic integration of sigma(u, p) n over the unit square, moments about its centre
    np.testing.assert_array_equal(BERCOVIER_WRENCH, [0.0, 0.0, -256.0 / 15.0])


@pytest.fixture(scope="module")
def disc_mesh():
    return generate_pierced_mesh(disc_polygon(CENTRE, 0.15, 0.01), (0, 0, 1, 1), 0.03, wall_ratio=3.0)


def _fields(mesh, u, p):
    disc = StokesDiscretization(mesh)
    return StokesSolution(interpolate(disc.V, u), interpolate(disc.Q, p), 1.0, disc)


def test_constant_pressure_gives_zero_wrench(disc_mesh):
    sol = _fields(disc_mesh, lambda x, y: (0 * x, 0 * x), lambda x, y: 0 * x + 4.0)
    for w in (surface_wrench(sol, CENTRE), volume_wrench(sol, CENTRE)):
        assert np.abs(w.force).max() <= 1e-10 and abs(w.torque) <= 1e-10


def test_zero_fields_give_zero_wrench(disc_mesh):
    sol = _fields(disc_mesh, lambda x, y: (0 * x, 0 * x), lambda x, y: 0 * x)
    w = volume_wrench(sol, CENTRE)
    assert np.all(w.force == 0) and w.torque == 0


def test_lifting_on_foreign_space(disc_mesh):
    sol = _fields(disc_mesh, lambda x, y: (0 * x, 0 * x), lambda x, y: 0 * x)
    other = StokesDiscretization(rectangle_mesh(2))
    with pytest.raises(ConsistencyError):
        volume_moment(sol, lifting(other, Marker.OUTER_WALL, lambda x, y: (1.0, 0.0)))
    with pytest.raises(ConsistencyError):
        surface_wrench(sol, CENTRE, mesh=rectangle_mesh(2))


def test_surface_and_volume_converge_to_oracle():
    rows = bercovier_wrench_errors((4, 8, 16))
    es = [r[1] for r in rows]
    ev = [r[2] for r in rows]
    assert es[0] > es[1] > es[2]
    assert es[1] / es[2] > 4.0
    assert ev[-1] <= es[-1]
    assert ev[-1] <= 1e-9


@pytest.fixture(scope="module")
def centred_fund():
    m = generate_pierced_mesh(disc_polygon(CENTRE, 0.15, 0.01), (0, 0, 1, 1), 0.03, wall_ratio=3.0)

    def stir(x, y):
        dx, dy = x - 0.5, y - 0.5
        r = np.hypot(dx, dy)
        return -dy / r * (1 + dx / r), dx / r * (1 + dx / r)

    return solve_fundamental_problems(m, 1.0, stir, CENTRE)


@pytest.mark.parametrize("method", ["surface", "volume"])
def test_resistance_of_centred_disc(centred_fund, method):
    sys_ = assemble_resistance(centred_fund, method)
    M = sys_.M
    assert abs(M[0, 0] - M[1, 1]) <= 1e-3 * abs(M[0, 0])
    assert sys_.symmetry_defect() <= 1e-2
    rv = solve_rigid_velocity(sys_, centred_fund)
    assert rv.balance_residual <= 1e-8
    np.testing.assert_allclose(M @ np.array([*rv.V, rv.omega]), sys_.N, rtol=1e-12, atol=1e-12 * np.abs(sys_.N).max())


def test_zero_rhs_means_no_motion():
    rv = solve_rigid_velocity(ResistanceSystem(np.diag([1.0, 2.0, 3.0]), np.zeros(3)))
    assert np.all(rv.V == 0) and rv.omega == 0


def test_no_deformation_no_motion(centred_fund):
    fund0 = solve_fundamental_problems(centred_fund.discretization.mesh, 1.0, None, CENTRE,
                                       discretization=centred_fund.discretization)
    sys_ = assemble_resistance(fund0)
    assert np.all(sys_.N == 0)
    rv = solve_rigid_velocity(sys_, fund0)
    assert np.all(rv.V == 0) and rv.omega == 0


def test_doubling_deformation_doubles_velocity(centred_fund):
    f = centred_fund
    base = solve_rigid_velocity(assemble_resistance(f))
    sols = f.solutions[:3] + (2.0 * f.solutions[3],)
    doubled = type(f)(sols, f.discretization, f.x0, f.axes, 2.0 * f.flux_correction)
    twice = solve_rigid_velocity(assemble_resistance(doubled))
    ref = np.array([*base.V, base.omega])
    np.testing.assert_allclose([*twice.V, twice.omega], 2 * ref, rtol=1e-10, atol=1e-10 * np.abs(ref).max())


def test_mirror_symmetric_stroke_moves_along_axis():
    # disc centred on the vertical box axis, deformation mirror-symmetric about it
    phi = 2 * np.pi * np.arange(96) / 96  # a multiple of 4 puts two vertices on the axis
    hole = np.column_stack([0.5 + 0.15 * np.cos(phi), 0.45 + 0.15 * np.sin(phi)])
    m = generate_pierced_mesh(hole, (0, 0, 1, 1), 0.03, wall_ratio=3.0, mirror_x=0.5)

    def squirm(x, y):
        dx, dy = x - 0.5, y - 0.45
        r = np.hypot(dx, dy)
        c, s = dx / r, dy / r
        # tangential slip, odd in cos so that u_x is odd and u_y even about x = 0.5
        ut = c * (0.5 + s)
        return -s * ut, c * ut

    fund = solve_fundamental_problems(m, 1.0, squirm, (0.5, 0.45))
    rv = solve_rigid_velocity(assemble_resistance(fund), fund)
    scale = abs(rv.V[1])
    assert scale > 0
    assert abs(rv.V[0]) <= 1e-6 * scale
    assert abs(rv.omega) * 0.15 <= 1e-6 * scale
