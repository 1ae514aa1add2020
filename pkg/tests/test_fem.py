import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stokesswim.errors import DomainError, UnsupportedOrderError
from stokesswim.fem import (
    basis_eval,
    build_dof_map,
    evaluate_field,
    interpolate,
    lagrange_basis,
)
from stokesswim.mesh import rectangle_mesh

bary = st.tuples(st.floats(0, 1), st.floats(0, 1)).filter(lambda t: t[0] + t[1] <= 1).map(
    lambda t: np.array([1 - t[0] - t[1], t[0], t[1]])
)


def test_p1_vertex_kronecker():
    v, _ = basis_eval(lagrange_basis(1), [1.0, 0.0, 0.0])
    np.testing.assert_allclose(v, [1, 0, 0], atol=1e-15)


def test_p2_edge_midpoint():
    v, _ = basis_eval(lagrange_basis(2), [0.5, 0.5, 0.0])
    # local order: vertices, then edge nodes 01, 12, 20
    np.testing.assert_allclose(v, [0, 0, 0, 1, 0, 0], atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_kronecker_at_all_nodes(k):
    b = lagrange_basis(k)
    v, _ = b.eval(b.node_coordinates)
    np.testing.assert_allclose(v, np.eye(b.n_local), atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
@given(p=bary)
def test_partition_of_unity(k, p):
    v, g = lagrange_basis(k).eval(p)
    assert abs(v.sum() - 1.0) <= 1e-13
    np.testing.assert_allclose(g.sum(axis=0), 0.0, atol=1e-12)


def test_outside_simplex():
    with pytest.raises(DomainError):
        basis_eval(lagrange_basis(2), [1.1, -0.1, 0.0])
    with pytest.raises(UnsupportedOrderError):
        lagrange_basis(4)


@pytest.mark.parametrize("k,expected", [(1, 4), (2, 9)])
def test_two_triangle_dof_counts(k, expected):
    assert build_dof_map(rectangle_mesh(1), k).n_dofs == expected


@pytest.mark.parametrize("pattern", ["right", "crisscross"])
def test_p3_count_formula(pattern):
    m = rectangle_mesh(3, pattern=pattern)
    d = build_dof_map(m, 3)
    assert d.n_dofs == m.n_vertices + 2 * m.n_edges + m.n_triangles
    assert np.array_equal(np.unique(d.cells), np.arange(d.n_dofs))


def test_constant_and_linear_fields():
    m = rectangle_mesh(3, pattern="crisscross")
    c = interpolate(build_dof_map(m, 2), lambda x, y: 0 * x + 2.5)
    val, grad = evaluate_field(c, m, 4, [0.2, 0.3, 0.5], gradient=True)
    assert abs(val - 2.5) < 1e-14 and np.allclose(grad, 0, atol=1e-13)
    lin = interpolate(build_dof_map(m, 1), lambda x, y: x)
    pt = np.array([0.2, 0.3, 0.5])
    x = pt @ m.vertices[m.triangles[4]]
    assert abs(evaluate_field(lin, m, 4, pt) - x[0]) < 1e-14


def test_p2_gradient_of_x_squared(rng):
    m = rectangle_mesh(4, pattern="crisscross")
    f = interpolate(build_dof_map(m, 2), lambda x, y: x**2)
    for _ in range(20):
        t = rng.integers(m.n_triangles)
        b = rng.dirichlet(np.ones(3))
        x = b @ m.vertices[m.triangles[t]]
        val, g = evaluate_field(f, m, t, b, gradient=True)
        assert abs(val - x[0] ** 2) < 1e-12
        np.testing.assert_allclose(g, [2 * x[0], 0.0], atol=1e-12)


def test_triangle_index_out_of_range():
    m = rectangle_mesh(1)
    f = interpolate(build_dof_map(m, 1), lambda x, y: x)
    with pytest.raises(IndexError):
        evaluate_field(f, m, 5, [1 / 3, 1 / 3, 1 / 3])


@pytest.mark.parametrize("k", [1, 2, 3])
def test_polynomial_reproduction(k, rng):
    m = rectangle_mesh(3, pattern="crisscross")
    coef = rng.normal(size=(k + 1, k + 1))

    def poly(x, y):
        return sum(coef[i, j] * x**i * y**j for i in range(k + 1) for j in range(k + 1 - i))

    f = interpolate(build_dof_map(m, k), poly)
    for _ in range(50):
        t = rng.integers(m.n_triangles)
        b = rng.dirichlet(np.ones(3))
        x, y = b @ m.vertices[m.triangles[t]]
        exact = poly(x, y)
        assert abs(evaluate_field(f, m, t, b) - exact) <= 1e-12 * max(1.0, abs(exact))


@pytest.mark.parametrize("k", [2, 3])
def test_continuity_across_interior_edges(k, rng):
    m = rectangle_mesh(3)
    d = build_dof_map(m, k)
    f = interpolate(d, lambda x, y: np.sin(3 * x) * np.cos(2 * y))
    f = type(f)(d, rng.normal(size=d.n_dofs))
    owners = {}
    for t, edges in enumerate(m.triangle_edges):
        for le, e in enumerate(edges):
            owners.setdefault(int(e), []).append((t, le))
    pairs = ((0, 1), (1, 2), (2, 0))
    for e, own in owners.items():
        if len(own) != 2:
            continue
        a, b = m.edges[e]
        for s in (0.2, 0.5, 0.7):
            vals = []
            for t, le in own:
                bc = np.zeros(3)
                tri = m.triangles[t]
                bc[list(tri).index(a)] = 1 - s
                bc[list(tri).index(b)] = s
                vals.append(evaluate_field(f, m, t, bc))
            assert abs(vals[0] - vals[1]) <= 1e-12
