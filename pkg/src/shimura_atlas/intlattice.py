"""Integer lattices given by the rows of an integer matrix.

Matrices are lists of rows of Python ints, so entries never overflow.
"""
from __future__ import annotations

from typing import Sequence

from .errors import DimensionMismatch

IntMatrix = list[list[int]]


def _as_matrix(M: Sequence[Sequence[int]]) -> IntMatrix:
    rows = [list(map(int, r)) for r in M]
    if rows and len({len(r) for r in rows}) != 1:
        raise DimensionMismatch("ragged matrix")
    return rows


def hermite_normal_form(M: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form.

    Same shape as ``M``: nonzero rows first, each with a positive pivot
    strictly right of the previous pivot, entries above a pivot reduced into
    ``[0, pivot)``, zero rows at the bottom.
    """
    A = _as_matrix(M)
    if not A:
        return []
    nrows, ncols = len(A), len(A[0])
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        # gcd-combine column c of rows r.. into row r
        for i in range(r + 1, nrows):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = _xgcd(a, b)
            ua, ub = a // g, b // g
            row_r = [x * p + y * q for p, q in zip(A[r], A[i])]
            row_i = [ua * q - ub * p for p, q in zip(A[r], A[i])]
            A[r], A[i] = row_r, row_i
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-v for v in A[r]]
        piv = A[r][c]
        for i in range(r):
            q = A[i][c] // piv
            if q:
                A[i] = [p - q * s for p, s in zip(A[i], A[r])]
        r += 1
    return A


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def nonzero_rows(M: IntMatrix) -> IntMatrix:
    return [r for r in M if any(r)]


def rank(M: Sequence[Sequence[int]]) -> int:
    return len(nonzero_rows(hermite_normal_form(M)))


def kernel_basis(M: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
    """Basis (as rows) of the integer right kernel {x : M x = 0}."""
    A = _as_matrix(M)
    n = len(A[0]) if A else ncols
    if n is None:
        raise DimensionMismatch("cannot infer column count of an empty matrix")
    if not A:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    # unimodular row ops on [M^T | I]; rows whose left part vanishes span the kernel
    aug = [[A[i][j] for i in range(len(A))] + [int(j == k) for k in range(n)] for j in range(n)]
    H = hermite_normal_form(aug)
    m = len(A)
    return [row[m:] for row in H if not any(row[:m])]


def saturate(M: Sequence[Sequence[int]]) -> IntMatrix:
    """HNF basis of {v : k v in rowspace(M) for some k >= 1}.

    Computed as the kernel of the kernel: the saturation is exactly the set of
    integer vectors orthogonal to every integer vector killed by ``M``.
    """
    A = _as_matrix(M)
    if not A:
        return []
    n = len(A[0])
    K = kernel_basis(A)
    if not K:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    S = kernel_basis(K)
    return nonzero_rows(hermite_normal_form(S))


def contains(M: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    A = _as_matrix(M)
    v = list(map(int, v))
    if A and len(A[0]) != len(v):
        raise DimensionMismatch(f"vector of length {len(v)} against {len(A[0])} columns")
    for row in nonzero_rows(hermite_normal_form(A)):
        c = next(j for j, e in enumerate(row) if e)
        if any(v[:c]):
            return False
        q, rem = divmod(v[c], row[c])
        if rem:
            return False
        v = [a - q * b for a, b in zip(v, row)]
    return not any(v)
