"""Quadrature rules on the reference triangle and the reference edge [0, 1].

Triangle rules are conical (collapsed) products of a Gauss-Jacobi rule and a
Gauss-Legendre rule, so every rule has positive weights and interior points.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .errors import UnsupportedOrderError

MAX_ORDER = 13


@dataclass(frozen=True)
class QuadratureRule:
    """Points (barycentric for triangles, parameter in [0, 1] for edges) and weights.

    Triangle weights sum to 1/2, the area of the reference triangle.
    """

    points: np.ndarray
    weights: np.ndarray
    exactness_order: int

    def __len__(self):
        return len(self.weights)


def _check_order(order):
    if int(order) != order or order < 1:
        raise UnsupportedOrderError(f"quadrature order must be a positive integer, got {order!r}")
    if order > MAX_ORDER:
        raise UnsupportedOrderError(f"quadrature order {order} exceeds the supported maximum {MAX_ORDER}")
    return int(order)


@lru_cache(maxsize=None)
def edge_quadrature(order: int) -> QuadratureRule:
    """Gauss-Legendre rule on [0, 1], exact up to ``order``."""
    order = _check_order(order)
    n = (order + 2) // 2
    x, w = leggauss(n)
    pts = 0.5 * (x + 1.0)
    rule = QuadratureRule(pts, 0.5 * w, 2 * n - 1)
    rule.points.setflags(write=False)
    rule.weights.setflags(write=False)
    return rule


@lru_cache(maxsize=None)
def triangle_quadrature(order: int) -> QuadratureRule:
    """Rule on the reference triangle (0,0), (1,0), (0,1), exact up to ``order``."""
    order = _check_order(order)
    n = (order + 2) // 2
    if n == 1:
        pts = np.array([[1.0, 1.0, 1.0]]) / 3.0
        rule = QuadratureRule(pts, np.array([0.5]), 1)
    else:
        # xi = s, eta = r (1 - s); the Jacobian factor (1 - s) is absorbed by Gauss-Jacobi.
        xj, wj = roots_jacobi(n, 1.0, 0.0)
        s = 0.5 * (xj + 1.0)
        ws = 0.25 * wj
        xl, wl = leggauss(n)
        r = 0.5 * (xl + 1.0)
        wr = 0.5 * wl
        S, R = np.meshgrid(s, r, indexing="ij")
        xi = S.ravel()
        eta = (R * (1.0 - S)).ravel()
        w = np.outer(ws, wr).ravel()
        pts = np.column_stack([1.0 - xi - eta, xi, eta])
        rule = QuadratureRule(pts, w, 2 * n - 1)
    rule.points.setflags(write=False)
    rule.weights.setflags(write=False)
    return rule
