"""Exact dense linear algebra over any :class:`~derived_tame.fields.Field`.

Vectors are rows.  ``nullspace(F, M)`` returns a basis of ``{x : M @ x = 0}``
as the rows of a matrix.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .fields import Field


def rref(F: Field, M: np.ndarray, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Only the first ``ncols`` columns are eligible as pivots; row operations act
    on the whole row (useful for augmented systems).
    """
    R = np.array(M, dtype=F.dtype, copy=True)
    if R.ndim != 2:
        raise ValueError("rref expects a matrix")
    m, n = R.shape
    ncols = n if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        col = ~F.is_zero(R[r:, c])
        if not col.any():
            continue
        p = r + int(np.argmax(col))
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = F.mul(R[r], F.inv(R[r, c]))
        others = ~F.is_zero(R[:, c])
        others[r] = False
        if others.any():
            idx = np.nonzero(others)[0]
            R[idx] = F.sub(R[idx], F.mul(R[idx, c][:, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: Field, M: np.ndarray) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def rowspace(F: Field, M: np.ndarray) -> np.ndarray:
    """Basis (in reduced echelon form) of the row space."""
    M = np.asarray(M)
    if M.shape[0] == 0:
        return F.zeros((0, M.shape[1]))
    R, piv = rref(F, M)
    return R[: len(piv)]


def nullspace(F: Field, M: np.ndarray) -> np.ndarray:
    M = np.asarray(M)
    m, n = M.shape
    if m == 0:
        return F.eye(n)
    R, piv = rref(F, M)
    free = [c for c in range(n) if c not in set(piv)]
    N = F.zeros((len(free), n))
    for t, f in enumerate(free):
        N[t, f] = F.one
        for row, pc in enumerate(piv):
            N[t, pc] = F.neg(R[row, f])
    return N


def left_nullspace(F: Field, M: np.ndarray) -> np.ndarray:
    """Basis of ``{y : y @ M = 0}``."""
    return nullspace(F, np.asarray(M).T)


def solve(F: Field, A: np.ndarray, b: np.ndarray):
    """One solution of ``A x = b`` or ``None`` if inconsistent."""
    A = np.asarray(A)
    m, n = A.shape
    aug = F.zeros((m, n + 1))
    aug[:, :n] = A
    aug[:, n] = b
    R, piv = rref(F, aug, ncols=n)
    rk = len(piv)
    if rk < m and not F.is_zero(R[rk:, n]).all():
        return None
    x = F.zeros(n)
    for row, pc in enumerate(piv):
        x[pc] = R[row, n]
    return x


def inverse(F: Field, A: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug = F.zeros((n, 2 * n))
    aug[:, :n] = A
    aug[:, n:] = F.eye(n)
    R, piv = rref(F, aug, ncols=n)
    if len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


def is_invertible(F: Field, A: np.ndarray) -> bool:
    A = np.asarray(A)
    return A.shape[0] == A.shape[1] and rank(F, A) == A.shape[0]


def in_rowspace(F: Field, basis_rref: np.ndarray, pivots: list[int], v: np.ndarray) -> bool:
    """Membership test against a basis already in reduced echelon form."""
    return not (~F.is_zero(reduce_against(F, basis_rref, pivots, v))).any()


def reduce_against(F: Field, basis_rref: np.ndarray, pivots: list[int], v: np.ndarray) -> np.ndarray:
    """Subtract the echelon basis from ``v`` so ``v`` vanishes on pivot columns."""
    v = np.array(v, dtype=F.dtype, copy=True)
    if not pivots:
        return v
    coeffs = v[pivots]
    return F.sub(v, F.matmul(coeffs[None, :], basis_rref)[0])


def extend_basis(F: Field, base: np.ndarray, candidates: np.ndarray) -> list[int]:
    """Indices of candidate rows that extend ``span(base)``, chosen greedily in order."""
    n = candidates.shape[1] if candidates.ndim == 2 else base.shape[1]
    cur = rowspace(F, base) if base.shape[0] else F.zeros((0, n))
    _, piv = rref(F, cur) if cur.shape[0] else (cur, [])
    chosen = []
    for t in range(candidates.shape[0]):
        stacked = np.vstack([cur, candidates[t : t + 1]])
        R, p = rref(F, stacked)
        if len(p) > cur.shape[0]:
            chosen.append(t)
            cur = R[: len(p)]
    return chosen


def intersect_rowspaces(F: Field, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Basis of ``rowspace(U) & rowspace(V)``."""
    if U.shape[0] == 0 or V.shape[0] == 0:
        return F.zeros((0, U.shape[1]))
    # x U = y V  <=>  [x, y] [U; -V] = 0
    stacked = np.vstack([U, F.neg(V)])
    coeffs = left_nullspace(F, stacked)
    if coeffs.shape[0] == 0:
        return F.zeros((0, U.shape[1]))
    return rowspace(F, F.matmul(coeffs[:, : U.shape[0]], U))


def linear_map_matrix(F: Field, fn: Callable[[np.ndarray], np.ndarray], n_in: int) -> np.ndarray:
    """Matrix (output coordinates x input coordinates) of a linear map given as a callable."""
    cols = []
    for t in range(n_in):
        e = F.zeros(n_in)
        e[t] = F.one
        cols.append(np.asarray(fn(e)))
    if not cols:
        out_len = len(np.asarray(fn(F.zeros(0))))
        return F.zeros((out_len, 0))
    return np.stack(cols, axis=1)
