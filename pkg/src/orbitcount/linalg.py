"""Exact linear algebra over the Gaussian rationals, and fraction-free
determinants of polynomial matrices."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .polynomial import Polynomial, poly_exact_div
from .scalars import GR_ONE, GR_ZERO, GaussianRational


Matrix = List[List[GaussianRational]]


def rref(rows: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form; returns (rref rows, pivot column list).

    Columns are eliminated left to right, so callers control the pivot
    priority by ordering columns."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(r, len(m)):
            if m[i][col]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = GR_ONE / m[r][col]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                factor = m[i][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Matrix, ncols: Optional[int] = None) -> List[List[GaussianRational]]:
    """Basis of the right kernel, one vector per free column."""
    if not rows:
        if not ncols:
            return []
        basis = []
        for j in range(ncols):
            v = [GR_ZERO] * ncols
            v[j] = GR_ONE
            basis.append(v)
        return basis
    ncols = len(rows[0]) if ncols is None else ncols
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    basis = []
    for j in range(ncols):
        if j in pivot_set:
            continue
        v = [GR_ZERO] * ncols
        v[j] = GR_ONE
        for r, pc in enumerate(pivots):
            coeff = red[r][j]
            if coeff:
                v[pc] = -coeff
        basis.append(v)
    return basis


def det_exact(rows: Matrix) -> GaussianRational:
    """Determinant by fraction elimination (square matrices of scalars)."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    m = [list(r) for r in rows]
    det = GR_ONE
    for k in range(n):
        pivot_row = None
        for i in range(k, n):
            if m[i][k]:
                pivot_row = i
                break
        if pivot_row is None:
            return GR_ZERO
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
            det = -det
        pivot = m[k][k]
        det = det * pivot
        inv = GR_ONE / pivot
        for i in range(k + 1, n):
            if m[i][k]:
                factor = m[i][k] * inv
                m[i] = [a - factor * b for a, b in zip(m[i], m[k])]
    return det


def solve_exact(rows: Matrix, rhs: Sequence[GaussianRational]) -> Optional[List[GaussianRational]]:
    """One solution of rows * x = rhs, or None if inconsistent."""
    if not rows:
        return None
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    for r, row in enumerate(red):
        if r >= len(pivots) or pivots[r] == ncols:
            if any(row):
                return None
    if ncols in pivots:
        return None
    x = [GR_ZERO] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][ncols]
    return x


def det_poly_matrix(mat: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Exact determinant of a square polynomial matrix via the
    fraction-free Bareiss elimination (all divisions exact)."""
    rho = len(mat)
    if rho == 0:
        raise ValueError("empty matrix")
    if any(len(r) != rho for r in mat):
        raise ValueError("determinant of a non-square matrix")
    n = mat[0][0].n
    names = mat[0][0].names
    for row in mat:
        for entry in row:
            if entry.n != n:
                raise ValueError("mixed variable counts in matrix entries")
    if rho == 1:
        return mat[0][0]
    m = [list(r) for r in mat]
    sign = 1
    prev = Polynomial.constant(n, 1, names)
    for k in range(rho - 1):
        pivot_row = None
        for i in range(k, rho):
            if not m[i][k].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            return Polynomial.zero(n, names)
        if pivot_row != k:
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, rho):
            for j in range(k + 1, rho):
                num = pivot * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = poly_exact_div(num, prev)
            m[i][k] = Polynomial.zero(n, names)
        prev = pivot
    result = m[rho - 1][rho - 1]
    return -result if sign < 0 else result
