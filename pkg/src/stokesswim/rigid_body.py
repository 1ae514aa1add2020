"""Quaternion kinematics and Newton-Euler dynamics of a rigid body.

Quaternions are length-4 arrays ``(q0, q1, q2, q3)``. Body-frame velocities
are mapped to the laboratory frame with ``R(q)``; the state vector layout is
``[X (3), q (4), V (3), omega (3)]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, StokesSwimError

UNIT_TOL = 1e-9
GIMBAL_TOL = 1e-9


class DegenerateQuaternionError(StokesSwimError, ValueError):
    pass


def quat_mul(q, r):
    q0, q1, q2, q3 = q
    r0, r1, r2, r3 = r
    return np.array([
        q0 * r0 - q1 * r1 - q2 * r2 - q3 * r3,
        q0 * r1 + r0 * q1 + q2 * r3 - q3 * r2,
        q0 * r2 + r0 * q2 + q3 * r1 - q1 * r3,
        q0 * r3 + r0 * q3 + q1 * r2 - q2 * r1,
    ])


def quat_conj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]], dtype=float)


def quat_norm(q):
    return math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])


def normalize(q):
    n = quat_norm(q)
    if n <= 1e-14:
        raise DegenerateQuaternionError(f"cannot normalize quaternion of norm {n:.3e}")
    return np.asarray(q, dtype=float) / n


def rotation_matrix(q):
    """Rotation matrix of a unit quaternion (standard orthogonal form)."""
    if abs(quat_norm(q) - 1.0) > UNIT_TOL:
        raise DomainError(f"quaternion norm {quat_norm(q):.12g} is not 1")
    return _rot(q)


def _rot(q):
    q0, q1, q2, q3 = q
    return np.array([
        [q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3, 2 * (q1 * q2 - q0 * q3), 2 * (q1 * q3 + q0 * q2)],
        [2 * (q1 * q2 + q0 * q3), q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3, 2 * (q2 * q3 - q0 * q1)],
        [2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1), q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3],
    ])


def rotate(q, x):
    """Vector part of ``q * [0, x] * conj(q)``."""
    return quat_mul(quat_mul(q, [0.0, *x]), quat_conj(q))[1:]


def z_rotation(theta):
    return np.array([math.cos(theta / 2), 0.0, 0.0, math.sin(theta / 2)])


def planar_angle(q):
    """Rotation angle about z of a quaternion with ``q1 = q2 = 0``."""
    return 2.0 * math.atan2(q[3], q[0])


class EulerAngles(NamedTuple):
    phi_x: float
    phi_y: float
    phi_z: float
    gimbal: bool = False


def euler_angles(q) -> EulerAngles:
    """Roll/pitch/yaw ``(phi_x, phi_y, phi_z)`` with ``R = Rz(phi_z) Ry(phi_y) Rx(phi_x)``.

    Near gimbal lock the roll is set to zero and the whole residual rotation
    is reported as yaw; the ``gimbal`` flag is raised.
    """
    q0, q1, q2, q3 = q
    s = 2.0 * (q0 * q2 - q3 * q1)
    if abs(s) > 1.0 - GIMBAL_TOL:
        R = _rot(q)
        return EulerAngles(0.0, math.copysign(math.pi / 2, s), math.atan2(-R[0, 1], R[1, 1]), True)
    return EulerAngles(
        math.atan2(2.0 * (q0 * q1 + q2 * q3), 1.0 - 2.0 * (q1 * q1 + q2 * q2)),
        math.asin(s),
        math.atan2(2.0 * (q0 * q3 + q1 * q2), 1.0 - 2.0 * (q2 * q2 + q3 * q3)),
        False,
    )


def quaternion_from_euler(phi_x, phi_y, phi_z):
    cx, sx = math.cos(phi_x / 2), math.sin(phi_x / 2)
    cy, sy = math.cos(phi_y / 2), math.sin(phi_y / 2)
    cz, sz = math.cos(phi_z / 2), math.sin(phi_z / 2)
    return np.array([
        cz * cy * cx + sz * sy * sx,
        cz * cy * sx - sz * sy * cx,
        cz * sy * cx + sz * cy * sx,
        sz * cy * cx - cz * sy * sx,
    ])


# ---- state and models --------------------------------------------------------

@dataclass(frozen=True)
class RigidState:
    X: np.ndarray
    q: np.ndarray
    V: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        for name, n in (("X", 3), ("q", 4), ("V", 3), ("omega", 3)):
            a = np.array(getattr(self, name), dtype=float).reshape(n)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def at_rest(cls, X=(0.0, 0.0, 0.0), q=(1.0, 0.0, 0.0, 0.0)):
        return cls(np.asarray(X, dtype=float), np.asarray(q, dtype=float), np.zeros(3), np.zeros(3))

    def to_vector(self):
        return np.concatenate([self.X, self.q, self.V, self.omega])

    @classmethod
    def from_vector(cls, y):
        y = np.asarray(y, dtype=float)
        return cls(y[0:3], y[3:7], y[7:10], y[10:13])

    def replace(self, **kw):
        d = dict(X=self.X, q=self.q, V=self.V, omega=self.omega)
        d.update(kw)
        return RigidState(**d)


@dataclass(frozen=True)
class InertiaModel:
    mass: float
    inertia: np.ndarray

    def __post_init__(self):
        I = np.array(self.inertia, dtype=float).reshape(3, 3)
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if not np.allclose(I, I.T, rtol=0, atol=1e-12 * np.abs(I).max()):
            raise ValueError("inertia tensor must be symmetric")
        if np.linalg.eigvalsh(I).min() <= 0:
            raise ValueError("inertia tensor must be positive definite")
        I.setflags(write=False)
        object.__setattr__(self, "inertia", I)
        inv = np.linalg.inv(I)
        inv.setflags(write=False)
        object.__setattr__(self, "inverse", inv)

    def kinetic_energy(self, omega):
        omega = np.asarray(omega, dtype=float)
        return 0.5 * float(omega @ self.inertia @ omega)


class Wrench3(NamedTuple):
    force: np.ndarray
    torque: np.ndarray


def _quat_rate(q, w_body):
    """``0.5 [0, R(q) w] * q`` written out for speed."""
    q0, q1, q2, q3 = q
    wx, wy, wz = w_body
    # lab-frame angular velocity
    ax = (q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3) * wx + 2 * (q1 * q2 - q0 * q3) * wy + 2 * (q1 * q3 + q0 * q2) * wz
    ay = 2 * (q1 * q2 + q0 * q3) * wx + (q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3) * wy + 2 * (q2 * q3 - q0 * q1) * wz
    az = 2 * (q1 * q3 - q0 * q2) * wx + 2 * (q2 * q3 + q0 * q1) * wy + (q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3) * wz
    return (
        0.5 * (-ax * q1 - ay * q2 - az * q3),
        0.5 * (ax * q0 + ay * q3 - az * q2),
        0.5 * (ay * q0 + az * q1 - ax * q3),
        0.5 * (az * q0 + ax * q2 - ay * q1),
    )


def kinematic_rhs(state: RigidState):
    """``(dX/dt, dq/dt) = (R(q) V, 0.5 [0, R(q) omega] * q)``."""
    R = _rot(state.q)
    return R @ state.V, np.array(_quat_rate(state.q, state.omega))


def dynamic_rhs(state: RigidState, wrench, inertia: InertiaModel) -> np.ndarray:
    """Full state derivative in vector layout, with body-frame force and torque."""
    F, T = wrench
    dX, dq = kinematic_rhs(state)
    w = state.omega
    Iw = inertia.inertia @ w
    gyro = np.array([w[1] * Iw[2] - w[2] * Iw[1], w[2] * Iw[0] - w[0] * Iw[2], w[0] * Iw[1] - w[1] * Iw[0]])
    dw = inertia.inverse @ (np.asarray(T, dtype=float) - gyro)
    return np.concatenate([dX, dq, np.asarray(F, dtype=float) / inertia.mass, dw])


def rotational_rhs(torque: Callable[[float], np.ndarray], inertia: InertiaModel):
    """``f(t, y)`` for the rotational state ``y = [q (4), omega (3)]``; tailored to many small steps."""
    I = inertia.inertia
    full = bool(np.count_nonzero(I - np.diag(np.diag(I))))
    inv = inertia.inverse
    Ixx, Iyy, Izz = np.diag(I)
    d = 1.0 / np.diag(I)

    def f(t, y):
        q = y[:4]
        w = y[4:]
        if full:
            Iw = I @ w
        else:
            Iw = (Ixx * w[0], Iyy * w[1], Izz * w[2])
        T = torque(t)
        r = np.array([
            T[0] - (w[1] * Iw[2] - w[2] * Iw[1]),
            T[1] - (w[2] * Iw[0] - w[0] * Iw[2]),
            T[2] - (w[0] * Iw[1] - w[1] * Iw[0]),
        ])
        out = np.empty(7)
        out[:4] = _quat_rate(q, w)
        out[4:] = inv @ r if full else d * r
        return out

    return f


def rk4_step(rhs, state, t, dt, quaternion_slice=None):
    """One classical RK4 step of ``y' = rhs(t, y)``.

    A :class:`RigidState` is integrated in vector layout (``rhs`` receives and
    returns vectors) and its quaternion is renormalized. For plain arrays pass
    ``quaternion_slice`` to renormalize a sub-vector.
    """
    if not dt > 0:
        raise ValueError("time step must be positive")
    as_state = isinstance(state, RigidState)
    y = state.to_vector() if as_state else np.asarray(state, dtype=float)
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1)
    k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2)
    k4 = rhs(t + dt, y + dt * k3)
    y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if as_state:
        quaternion_slice = slice(3, 7)
    if quaternion_slice is not None:
        y[quaternion_slice] = normalize(y[quaternion_slice])
    return RigidState.from_vector(y) if as_state else y


# ---- validation scenario ---------------------------------------------------------

LANGUSKI_INERTIA = np.diag([2985.0, 2729.0, 4183.0])
LANGUSKI_OMEGA0 = np.array([0.0, 0.0, 0.329])


def languski_torque(t):
    """Body-frame torque (N m) of the cubic-in-time validation profile."""
    if t < 0:
        raise ValueError("time must be non-negative")
    return np.array([
        1.0 + 2.7e-2 * t - 2.4e-4 * t**2 + 5.7e-7 * t**3,
        -1.5 - 9.0e-3 * t + 1.2e-4 * t**2 - 3.0e-7 * t**3,
        13.5,
    ])


def languski_inertia(mass=1.0) -> InertiaModel:
    return InertiaModel(mass, LANGUSKI_INERTIA)


class RotationTrace(NamedTuple):
    t: np.ndarray
    q: np.ndarray  # (n, 4)
    omega: np.ndarray  # (n, 3)
    max_norm_defect: float

    def euler(self):
        return np.array([euler_angles(q)[:3] for q in self.q])


def integrate_rotation(rhs, q0, omega0, t_final, dt, record_every=1) -> RotationTrace:
    """RK4 with per-step renormalization; records every ``record_every`` steps and the end."""
    n = int(round(t_final / dt))
    if n < 0 or abs(n * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError("t_final must be a non-negative multiple of dt")
    y = np.concatenate([normalize(q0), np.asarray(omega0, dtype=float)])
    ts, ys = [0.0], [y.copy()]
    defect = 0.0
    qs = slice(0, 4)
    for i in range(n):
        t = i * dt
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1)
        k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        y[qs] /= math.sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3])
        defect = max(defect, abs(quat_norm(y[qs]) - 1.0))
        if (i + 1) % record_every == 0 or i + 1 == n:
            ts.append((i + 1) * dt)
            ys.append(y.copy())
    ys = np.array(ys)
    return RotationTrace(np.array(ts), ys[:, :4], ys[:, 4:], defect)


def run_languski(t_final=60.0, dt=0.01, record_every=1) -> RotationTrace:
    q0 = np.array([1.0, 0.0, 0.0, 0.0])
    return integrate_rotation(rotational_rhs(languski_torque, languski_inertia()), q0, LANGUSKI_OMEGA0, t_final, dt, record_every)


def self_convergence_order(run: Callable[[float], np.ndarray], dt):
    """Observed order from runs at ``dt, dt/2, dt/4``: ``log2(|y1 - y2| / |y2 - y4|)``."""
    a, b, c = run(dt), run(dt / 2), run(dt / 4)
    return math.log2(np.linalg.norm(a - b) / np.linalg.norm(b - c))
