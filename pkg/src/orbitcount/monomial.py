"""Monomials as exponent tuples with the degree-lexicographic order.

The variable order is fixed globally as x1 > x2 > ... > xn, so plain
tuple comparison on (total degree, exponents) realizes deglex.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Tuple

Monomial = Tuple[int, ...]


def mdeg(m: Monomial) -> int:
    return sum(m)


def deglex_key(m: Monomial):
    return (sum(m), m)


def mmul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mdivides(a: Monomial, b: Monomial) -> bool:
    """True if x^a divides x^b."""
    return all(x <= y for x, y in zip(a, b))


def mdiv(b: Monomial, a: Monomial) -> Monomial:
    """Quotient exponent b - a; caller guarantees divisibility."""
    return tuple(y - x for x, y in zip(a, b))


def unit(n: int, i: int) -> Monomial:
    return tuple(1 if j == i else 0 for j in range(n))


def monomials_upto(n: int, d: int) -> list:
    """All monomials of total degree <= d, deglex ascending."""
    out = [(0,) * n]
    for k in range(1, d + 1):
        block = []
        for slots in combinations_with_replacement(range(n), k):
            e = [0] * n
            for i in slots:
                e[i] += 1
            block.append(tuple(e))
        block.sort(key=deglex_key)
        out.extend(block)
    return out


def minimal_generators(monos: Iterable[Monomial]) -> list:
    """Minimal generating set of the monomial ideal generated by monos."""
    items = sorted(set(monos), key=deglex_key)
    kept: list = []
    for m in items:
        if not any(mdivides(g, m) for g in kept):
            kept.append(m)
    return kept
