import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stokesswim.errors import DomainError
from stokesswim.rigid_body import (
    DegenerateQuaternionError,
    InertiaModel,
    LANGUSKI_INERTIA,
    LANGUSKI_OMEGA0,
    RigidState,
    dynamic_rhs,
    euler_angles,
    integrate_rotation,
    kinematic_rhs,
    languski_inertia,
    languski_torque,
    normalize,
    quat_conj,
    quat_mul,
    quat_norm,
    quaternion_from_euler,
    rk4_step,
    rotate,
    rotation_matrix,
    rotational_rhs,
    run_languski,
    self_convergence_order,
)

quats = st.lists(st.floats(-2, 2), min_size=4, max_size=4).map(np.array).filter(lambda q: np.linalg.norm(q) > 0.1)
unit_quats = quats.map(normalize)


def test_product_identities():
    q = np.array([0.3, -0.2, 0.9, 0.1])
    np.testing.assert_array_equal(quat_mul([1, 0, 0, 0], q), q)
    np.testing.assert_array_equal(quat_mul([0, 1, 0, 0], [0, 0, 1, 0]), [0, 0, 0, 1])


@given(quats, quats)
def test_norm_is_multiplicative(q, r):
    assert abs(quat_norm(quat_mul(q, r)) - quat_norm(q) * quat_norm(r)) <= 1e-13 * max(1.0, quat_norm(q) * quat_norm(r))


@given(quats, quats, quats)
def test_associative(a, b, c):
    np.testing.assert_allclose(quat_mul(quat_mul(a, b), c), quat_mul(a, quat_mul(b, c)), atol=1e-12)


def test_conj_norm_normalize():
    np.testing.assert_array_equal(quat_conj([1, 0, 0, 0]), [1, 0, 0, 0])
    assert quat_norm([1, 1, 1, 1]) == 2.0
    np.testing.assert_array_equal(normalize([2, 0, 0, 0]), [1, 0, 0, 0])
    with pytest.raises(DegenerateQuaternionError):
        normalize([1e-15, 0, 0, 0])
    q = np.array([0.5, 1.0, -2.0, 0.25])
    np.testing.assert_allclose(quat_mul(q, quat_conj(q)), [quat_norm(q) ** 2, 0, 0, 0], atol=1e-14)


def test_rotation_matrix_examples():
    np.testing.assert_array_equal(rotation_matrix([1, 0, 0, 0]), np.eye(3))
    s = math.sqrt(2) / 2
    np.testing.assert_allclose(rotation_matrix([s, 0, 0, s]) @ [1, 0, 0], [0, 1, 0], atol=1e-15)
    with pytest.raises(DomainError):
        rotation_matrix([1.0, 0.1, 0, 0])


@given(unit_quats)
def test_rotation_matrix_is_orthogonal_and_matches_conjugation(q):
    R = rotation_matrix(q)
    assert np.abs(R @ R.T - np.eye(3)).max() <= 1e-12
    assert abs(np.linalg.det(R) - 1.0) <= 1e-12
    rng = np.random.default_rng(1)
    for x in rng.normal(size=(20, 3)):
        np.testing.assert_allclose(R @ x, rotate(q, x), atol=1e-12 * max(1, np.linalg.norm(x)))


def test_euler_examples():
    assert tuple(euler_angles([1.0, 0, 0, 0])[:3]) == (0.0, 0.0, 0.0)
    e = euler_angles([math.cos(0.2), 0, 0, math.sin(0.2)])
    np.testing.assert_allclose(e[:3], [0, 0, 0.4], atol=1e-15)


def _matrix_euler(R):
    # independent decomposition of R = Rz Ry Rx
    return math.atan2(R[2, 1], R[2, 2]), -math.asin(R[2, 0]), math.atan2(R[1, 0], R[0, 0])


@given(st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3))
def test_euler_against_matrix_oracle(angles):
    q = quaternion_from_euler(*angles)
    e = euler_angles(q)
    np.testing.assert_allclose(e[:3], _matrix_euler(rotation_matrix(q)), atol=1e-10)
    np.testing.assert_allclose(e[:3], angles, atol=1e-10)


@given(st.floats(-3.0, 3.0), st.floats(-1.5, 1.5), st.floats(-3.0, 3.0))
def test_euler_round_trip(px, py, pz):
    q = quaternion_from_euler(px, py, pz)
    e = euler_angles(q)
    if e.gimbal:
        return
    r = quaternion_from_euler(*e[:3])
    assert min(np.abs(r - q).max(), np.abs(r + q).max()) <= 1e-10


def test_gimbal_flag():
    e = euler_angles(quaternion_from_euler(0.3, math.pi / 2, 0.2))
    assert e.gimbal and e.phi_x == 0.0
    R = rotation_matrix(quaternion_from_euler(0.0, e.phi_y, e.phi_z))
    np.testing.assert_allclose(R, rotation_matrix(quaternion_from_euler(0.3, math.pi / 2, 0.2)), atol=1e-7)


def test_kinematic_rhs_examples():
    s = RigidState.at_rest()
    dX, dq = kinematic_rhs(s)
    assert np.all(dX == 0) and np.all(dq == 0)
    dX, dq = kinematic_rhs(s.replace(omega=(0, 0, 0.8)))
    np.testing.assert_allclose(dq, [0, 0, 0, 0.4])


@given(unit_quats, st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_quaternion_rate_is_tangent(q, w):
    _, dq = kinematic_rhs(RigidState(np.zeros(3), q, np.zeros(3), np.array(w)))
    assert abs(q @ dq) <= 1e-13 * max(1.0, np.linalg.norm(w))


def test_dynamic_rhs_free_spin_and_energy():
    sphere = InertiaModel(2.0, 5.0 * np.eye(3))
    s = RigidState(np.zeros(3), normalize([1, 0.2, 0.1, 0]), np.zeros(3), np.array([0.3, -1.0, 2.0]))
    d = dynamic_rhs(s, (np.array([1.0, 0, 0]), np.zeros(3)), sphere)
    np.testing.assert_allclose(d[10:], 0.0, atol=1e-15)
    np.testing.assert_allclose(d[7:10], [0.5, 0, 0])
    inert = languski_inertia()
    d = dynamic_rhs(s, (np.zeros(3), np.zeros(3)), inert)
    assert abs(s.omega @ LANGUSKI_INERTIA @ d[10:]) <= 1e-12


def test_rk4_zero_rhs_and_exponential():
    s = RigidState(np.array([1.0, 2, 3]), np.array([1.0, 0, 0, 0]), np.zeros(3), np.zeros(3))
    out = rk4_step(lambda t, y: np.zeros_like(y), s, 0.0, 0.1)
    np.testing.assert_array_equal(out.to_vector(), s.to_vector())
    y = rk4_step(lambda t, y: y, np.array([1.0]), 0.0, 0.1)
    err = abs(y[0] - math.exp(0.1))
    # leading error term dt^5 / 120
    assert 0.8 * 8.5e-8 <= err <= 1.2 * 8.5e-8


def test_rk4_keeps_unit_quaternion():
    s = RigidState(np.zeros(3), normalize([1, 0.3, -0.2, 0.5]), np.zeros(3), np.array([3.0, -2.0, 5.0]))
    rhs = lambda t, y: dynamic_rhs(RigidState.from_vector(y), (np.zeros(3), np.zeros(3)), languski_inertia())  # noqa: E731
    for _ in range(100):
        s = rk4_step(rhs, s, 0.0, 0.05)
        assert abs(quat_norm(s.q) - 1.0) <= 1e-12


def test_languski_torque():
    np.testing.assert_array_equal(languski_torque(0.0), [1.0, -1.5, 13.5])
    for t in (0.0, 7.0, 120.0):
        assert languski_torque(t)[2] == 13.5
    np.testing.assert_array_equal(LANGUSKI_OMEGA0, [0, 0, 0.329])
    np.testing.assert_array_equal(np.diag(LANGUSKI_INERTIA), [2985, 2729, 4183])


def test_languski_first_step_against_fine_reference():
    rhs = rotational_rhs(languski_torque, languski_inertia())
    q0 = np.array([1.0, 0, 0, 0])
    errs = []
    for dt in (0.5, 0.25):
        coarse = integrate_rotation(rhs, q0, LANGUSKI_OMEGA0, dt, dt)
        fine = integrate_rotation(rhs, q0, LANGUSKI_OMEGA0, dt, dt / 100)
        errs.append(np.abs(np.concatenate([coarse.q[-1] - fine.q[-1], coarse.omega[-1] - fine.omega[-1]])).max())
    # local error O(dt^5): halving dt shrinks it ~32x
    assert 20 <= errs[0] / errs[1] <= 50


def test_self_convergence_free_rotation():
    rhs = rotational_rhs(lambda t: np.zeros(3), languski_inertia())
    w0 = np.array([0.05, 0.02, 0.329])

    def run(dt):
        tr = integrate_rotation(rhs, np.array([1.0, 0, 0, 0]), w0, 20.0, dt, 10**9)
        return np.concatenate([tr.q[-1], tr.omega[-1]])

    assert 3.8 <= self_convergence_order(run, 0.5) <= 4.2


def test_orthogonality_and_momentum_along_free_rotation():
    inert = languski_inertia()
    rhs = rotational_rhs(lambda t: np.zeros(3), inert)
    w0 = np.array([0.05, 0.02, 0.329])
    tr = integrate_rotation(rhs, np.array([1.0, 0, 0, 0]), w0, 19.0, 0.01, 50)
    L0 = LANGUSKI_INERTIA @ w0
    for q, w in zip(tr.q, tr.omega):
        R = rotation_matrix(q)
        assert np.abs(R @ R.T - np.eye(3)).max() <= 1e-11
        assert np.abs(R @ LANGUSKI_INERTIA @ w - L0).max() <= 1e-8 * np.linalg.norm(L0)


def test_languski_trace_shapes():
    tr = run_languski(t_final=1.0, dt=0.1, record_every=5)
    assert len(tr.t) == 3 and tr.q.shape == (3, 4) and tr.euler().shape == (3, 3)
    assert tr.max_norm_defect <= 1e-15
