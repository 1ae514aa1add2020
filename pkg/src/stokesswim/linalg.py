"""Sparse assembly storage and direct solvers.

The sparse LU is SuperLU (via SciPy) with threshold partial pivoting; the
factorization object is reused for every right-hand side of a given matrix.
Saddle-point systems factor far better with a caller-supplied symmetric
ordering (see :func:`nested_dissection`) than with SuperLU's built-in ones.
"""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import reverse_cuthill_mckee

from .errors import SingularMatrixError

PIVOT_TOL = 1e-14
ILL_CONDITIONED = 1e12
DENSE_LOCATE_LIMIT = 4000


class IllConditionedWarning(RuntimeWarning):
    pass


class TripletBuffer:
    """Accumulates ``(row, col, value)`` contributions in blocks of arrays."""

    def __init__(self, n_rows, n_cols=None):
        self.shape = (int(n_rows), int(n_rows if n_cols is None else n_cols))
        self._rows, self._cols, self._vals = [], [], []

    def add(self, rows, cols, values):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        values = np.asarray(values, dtype=float).ravel()
        if not (len(rows) == len(cols) == len(values)):
            raise ValueError("rows, cols and values must have equal length")
        self._rows.append(rows)
        self._cols.append(cols)
        self._vals.append(values)

    def __len__(self):
        return sum(len(r) for r in self._rows)

    def arrays(self):
        if not self._rows:
            e = np.empty(0, dtype=np.int64)
            return e, e, np.empty(0)
        return np.concatenate(self._rows), np.concatenate(self._cols), np.concatenate(self._vals)


def compress(buffer: TripletBuffer, n=None, m=None, canonical=True) -> sp.csr_matrix:
    """Sum duplicates into a CSR matrix with sorted column indices.

    With ``canonical`` the triplets are first sorted by (row, col, value), so
    the floating-point result does not depend on insertion order. Without it
    duplicates are summed in insertion order, which is cheaper and still
    deterministic for a fixed assembly loop.
    """
    n = buffer.shape[0] if n is None else int(n)
    m = buffer.shape[1] if m is None else int(m)
    r, c, v = buffer.arrays()
    if len(r) and (r.min() < 0 or c.min() < 0 or r.max() >= n or c.max() >= m):
        raise IndexError(f"triplet index outside a {n}x{m} matrix")
    if canonical and len(r):
        order = np.lexsort((v, r * m + c))
        r, c, v = r[order], c[order], v[order]
    A = sp.csr_matrix((v, (r, c)), shape=(n, m))
    A.sum_duplicates()
    A.sort_indices()
    return A


class LUFactorization:
    """Sparse LU of a square matrix; ``solve`` may be called for many right-hand sides."""

    def __init__(self, A, ordering="colamd", check_residual=False, refine=2):
        A = sp.csc_matrix(A)
        n, m = A.shape
        if n != m:
            raise ValueError(f"matrix must be square, got {A.shape}")
        self.A = A
        self.check_residual = check_residual
        self.refine = int(refine)
        self._perm = None
        thresh, options = 1.0, {}
        if isinstance(ordering, str) and ordering == "rcm":
            self._perm = reverse_cuthill_mckee(sp.csr_matrix(A), symmetric_mode=False)
            permc = "NATURAL"
        elif isinstance(ordering, str):
            if ordering not in ("colamd", "natural"):
                raise ValueError(f"unknown ordering {ordering!r}")
            permc = ordering.upper()
        else:
            self._perm = np.asarray(ordering, dtype=np.int64)
            if not np.array_equal(np.sort(self._perm), np.arange(n)):
                raise ValueError("ordering must be a permutation of the matrix indices")
            # a symmetric ordering is only useful if pivots stay on the diagonal
            permc, thresh, options = "NATURAL", 0.0, {"SymmetricMode": True}
        if self._perm is not None:
            A = A[self._perm][:, self._perm].tocsc()
        scale = spla.norm(A, np.inf) if A.nnz else 0.0
        try:
            self._lu = spla.splu(A, permc_spec=permc, diag_pivot_thresh=thresh, options=options)
        except RuntimeError as exc:
            raise SingularMatrixError(f"sparse LU failed: {exc}", pivot_index=self._locate_pivot(A, scale)) from exc
        diag = np.abs(self._lu.U.diagonal())
        bad = np.flatnonzero(diag <= PIVOT_TOL * max(scale, 1e-300))
        if len(bad):
            col = int(self._lu.perm_c[bad[0]])
            if self._perm is not None:
                col = int(self._perm[col])
            raise SingularMatrixError(f"singular pivot {diag[bad[0]]:.3e} at column {col}", pivot_index=col)

    def _locate_pivot(self, A, scale):
        # SuperLU does not report where it stopped; a dense LU finds the column if A is small
        if A.shape[0] > DENSE_LOCATE_LIMIT:
            return None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _, _, U = scipy.linalg.lu(A.toarray())
        bad = np.flatnonzero(np.abs(np.diag(U)) <= PIVOT_TOL * max(scale, 1e-300))
        if not len(bad):
            return None
        col = int(bad[0])
        return int(self._perm[col]) if self._perm is not None else col

    @property
    def fill(self):
        return self._lu.L.nnz + self._lu.U.nnz

    def _raw_solve(self, b):
        rhs = b if self._perm is None else b[self._perm]
        x = self._lu.solve(rhs)
        if self._perm is not None:
            out = np.empty_like(x)
            out[self._perm] = x
            x = out
        return x

    def solve(self, b):
        """Solve ``A x = b`` (``b`` may hold several columns), with iterative refinement."""
        b = np.asarray(b, dtype=float)
        x = self._raw_solve(b)
        nb = np.linalg.norm(b)
        for _ in range(self.refine):
            r = b - self.A @ x
            if np.linalg.norm(r) <= 1e-14 * max(nb, 1e-300):
                break
            x = x + self._raw_solve(r)
        if self.check_residual:
            res = np.linalg.norm(self.A @ x - b)
            if res > 1e-10 * max(nb, 1e-300):
                warnings.warn(f"LU residual {res / max(nb, 1e-300):.2e} exceeds 1e-10", IllConditionedWarning)
        return x


def lu_factor(A, ordering="colamd", check_residual=False) -> LUFactorization:
    return LUFactorization(A, ordering=ordering, check_residual=check_residual)


def _touching(G, nodes, other, mark):
    """Mask of ``nodes`` with a neighbour in ``other``."""
    mark[other] = True
    sub = G[nodes]
    hit = np.zeros(len(nodes), dtype=bool)
    if sub.nnz:
        rows = np.repeat(np.arange(len(nodes)), np.diff(sub.indptr))
        hit[rows[mark[sub.indices]]] = True
    mark[other] = False
    return hit


def nested_dissection(adjacency, coordinates, leaf_size=64) -> np.ndarray:
    """Fill-reducing ordering by recursive coordinate bisection.

    Each set of nodes is split at the median of its longer extent; nodes of
    the first half touching the second half form the separator, which is
    numbered after both halves.
    """
    G = sp.csr_matrix(adjacency)
    coords = np.asarray(coordinates, dtype=float)
    n = G.shape[0]
    mark = np.zeros(n, dtype=bool)
    order = []
    # explicit stack of (nodes, is_separator) keeps deep recursions off the C stack
    stack = [(np.arange(n), False)]
    while stack:
        nodes, done = stack.pop()
        if done or len(nodes) <= leaf_size:
            order.append(nodes)
            continue
        pts = coords[nodes]
        axis = int(np.argmax(np.ptp(pts, axis=0)))
        o = np.argsort(pts[:, axis], kind="stable")
        half = len(nodes) // 2
        left, right = nodes[o[:half]], nodes[o[half:]]
        sep_l = _touching(G, left, right, mark)
        sep_r = _touching(G, right, left, mark)
        # popped in reverse: first block, second block, then the smaller separator
        if sep_r.sum() < sep_l.sum():
            left, right, sep = right, left, sep_r
        else:
            sep = sep_l
        stack.append((left[sep], True))
        stack.append((right, False))
        stack.append((left[~sep], False))
    return np.concatenate(order) if order else np.empty(0, dtype=np.int64)


def lu_solve(A, b, ordering="colamd") -> np.ndarray:
    return LUFactorization(A, ordering=ordering).solve(b)


def dense_solve(M, N) -> np.ndarray:
    """Solve a small dense system; warns with :class:`IllConditionedWarning` when cond > 1e12."""
    M = np.asarray(M, dtype=float)
    N = np.asarray(N, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got {M.shape}")
    try:
        x = np.linalg.solve(M, N)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"dense system is singular: {exc}") from exc
    cond = np.linalg.cond(M)
    if not np.isfinite(cond):
        raise SingularMatrixError("dense system is singular")
    if cond > ILL_CONDITIONED:
        warnings.warn(f"resistance matrix condition number {cond:.3e}", IllConditionedWarning, stacklevel=2)
    return x
