"""Rationality detection for power series from Taylor prefixes: the
homogeneous Pade system, rank-based rationality conditions, rational
reconstruction with full-prefix verification, and the uniform-degree
family scan.

The linear system for degree d and order N matches coefficients of
P(t) - f(t) Q(t) through t^(N-1), for unknown coefficient vectors
(p_0..p_d, q_0..q_d).
"""

from __future__ import annotations

import json
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .linalg import nullspace, rref
from .polynomial import Polynomial, _as_gr
from .scalars import GR_ONE, GR_ZERO, GaussianRational
from .series import Series
from .util import pmap


class TaylorPrefix:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        self.coeffs = [_as_gr(c) for c in coeffs]
        if not self.coeffs:
            raise ValueError("empty Taylor prefix")

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "TaylorPrefix":
        from .polyparse import parse_scalar

        return cls([parse_scalar(s) for s in items])

    @classmethod
    def from_json(cls, text: str) -> "TaylorPrefix":
        return cls.from_strings(json.loads(text))


class PadePair:
    """Numerator/denominator pair; Q is normalized so its lowest nonzero
    coefficient is 1."""

    __slots__ = ("P", "Q", "d")

    def __init__(self, P: Polynomial, Q: Polynomial, d: int):
        self.P = P
        self.Q = Q
        self.d = d

    def __repr__(self):
        return f"PadePair(P={self.P}, Q={self.Q})"

    def series(self, order: int) -> Series:
        """Taylor series of P/Q to the given order (exact)."""
        num = _poly_to_series(self.P, order)
        den = _poly_to_series(self.Q, order)
        vP = num.valuation()
        vQ = den.valuation()
        if vQ is None:
            raise ZeroDivisionError("zero denominator")
        if vQ > 0:
            if vP is None or vP < vQ:
                raise ValueError("P/Q has a pole at 0; no Taylor series")
            num = Series(num.coeffs[vQ:] + [GR_ZERO] * vQ)
            den = Series(den.coeffs[vQ:] + [GR_ZERO] * vQ)
        return (num * den.inverse()).truncate(order)

    def to_json(self) -> dict:
        return {"P": str(self.P), "Q": str(self.Q), "degree": self.d}


def _poly_to_series(P: Polynomial, order: int) -> Series:
    out = [GR_ZERO] * (order + 1)
    for m, c in P.terms.items():
        if m[0] <= order:
            out[m[0]] = c
    return Series(out)


def _poly_from_coeffs(coeffs: Sequence[GaussianRational], name: str = "t") -> Polynomial:
    terms = {(k,): c for k, c in enumerate(coeffs) if c}
    return Polynomial(1, terms, (name,))


def _pade_matrix(f: TaylorPrefix, d: int, N: int) -> List[List[GaussianRational]]:
    """N x (2d+2) system: row k states [t^k](P - f Q) = 0."""
    rows = []
    for k in range(N):
        row = [GR_ZERO] * (2 * d + 2)
        if k <= d:
            row[k] = GR_ONE
        for j in range(0, min(k, d) + 1):
            row[d + 1 + j] = -f[k - j]
        rows.append(row)
    return rows


def _check_params(f: TaylorPrefix, d: int, N: int):
    if d < 0:
        raise ValueError("degree must be nonnegative")
    if N > len(f):
        raise ValueError(f"order N = {N} exceeds available coefficients {len(f)}")
    if N <= d:
        raise ValueError(f"order N = {N} must exceed the degree d = {d}")


def pade_solve(f: TaylorPrefix, d: int, N: int) -> Optional[PadePair]:
    """A nonzero solution of P = f Q + O(t^N) with deg P, deg Q <= d, or
    None when only the trivial solution exists."""
    _check_params(f, d, N)
    kernel = nullspace(_pade_matrix(f, d, N), 2 * d + 2)
    if not kernel:
        return None
    vec = kernel[0]
    q = vec[d + 1:]
    low = next((j for j, c in enumerate(q) if c), None)
    if low is None:
        # P = O(t^N) with deg P <= d < N forces P = 0; impossible for a
        # nonzero kernel vector, but normalize defensively on P instead
        p = vec[: d + 1]
        lowp = next(j for j, c in enumerate(p) if c)
        scale = GR_ONE / p[lowp]
    else:
        scale = GR_ONE / q[low]
    vec = [c * scale for c in vec]
    P = _poly_from_coeffs(vec[: d + 1])
    Q = _poly_from_coeffs(vec[d + 1:])
    return PadePair(P, Q, d)


def rationality_conditions(f: TaylorPrefix, d: int, N: int) -> bool:
    """True iff the order-N system admits a nontrivial solution, i.e.
    all its maximal minors vanish; decided by an exact rank computation."""
    _check_params(f, d, N)
    rows = _pade_matrix(f, d, N)
    return len(rref(rows)[1]) < 2 * d + 2


def verify_against_prefix(pair: PadePair, f: TaylorPrefix) -> bool:
    """Exact check that the Taylor series of P/Q matches every available
    coefficient of the prefix."""
    try:
        s = pair.series(len(f) - 1)
    except (ValueError, ZeroDivisionError):
        return False
    return all(s[k] == f[k] for k in range(len(f)))


def reconstruct(f: TaylorPrefix, d: int) -> Optional[PadePair]:
    """Rational function of degree <= d reproducing the entire prefix,
    via the order-(3d+1) solution; None when reconstruction fails."""
    if len(f) < 3 * d + 2:
        raise ValueError(f"need at least {3 * d + 2} coefficients for degree {d}")
    pair = pade_solve(f, d, 3 * d + 1)
    if pair is None:
        return None
    if not verify_against_prefix(pair, f):
        return None
    return pair


def minimal_degree(f: TaylorPrefix, d_max: int) -> Optional[int]:
    for d in range(0, d_max + 1):
        if len(f) < 3 * d + 2:
            break
        if reconstruct(f, d) is not None:
            return d
    return None


def uniform_degree_scan(family: Union[Dict[str, Sequence], Sequence[Tuple[str, Sequence]]],
                        d_max: int, threads: int = 1) -> dict:
    """Minimal reconstruction degree per family member; the max over the
    family is the empirical uniform bound (None rows mean no rational
    representation of degree <= d_max was found)."""
    if isinstance(family, dict):
        items = sorted(family.items())
    else:
        items = list(family)
    for name, coeffs in items:
        if len(coeffs) < 3 * d_max + 2:
            raise ValueError(f"family member {name!r} has fewer than "
                             f"{3 * d_max + 2} coefficients")

    def work(item):
        name, coeffs = item
        prefix = coeffs if isinstance(coeffs, TaylorPrefix) else TaylorPrefix(coeffs)
        return {"index": name, "degree": minimal_degree(prefix, d_max)}

    rows = pmap(work, items, threads)
    degrees = [r["degree"] for r in rows if r["degree"] is not None]
    return {
        "rows": rows,
        "max_degree": max(degrees) if degrees else None,
        "all_rational": all(r["degree"] is not None for r in rows),
        "d_max": d_max,
    }
