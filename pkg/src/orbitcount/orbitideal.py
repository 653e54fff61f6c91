"""Degree slices of orbit-closure ideals, leading-term diagrams,
staircases and staircase division.

A degree-d slice is the kernel of the linear map sending a polynomial Q
of degree <= d to the vector of its first nu trajectory derivatives at
the base point, with nu the explicit multiplicity cap.  The derivatives
are read off the exact trajectory series, which is much cheaper than
iterating symbolic Lie derivatives.
"""

from __future__ import annotations

import json
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .dynamics import TrajectoryExpander, VectorField, morse_multiplicity_cap
from .linalg import nullspace, rref
from .monomial import (Monomial, deglex_key, mdeg, mdivides,
                       minimal_generators, monomials_upto)
from .polynomial import Polynomial, _as_gr
from .scalars import GR_ONE, GR_ZERO, GaussianRational


class MonomialDiagram:
    """A monomial ideal given by its minimal generators; the complement
    is the staircase."""

    __slots__ = ("n", "generators")

    def __init__(self, n: int, generators: Sequence[Monomial]):
        self.n = n
        self.generators = tuple(minimal_generators(generators))

    def contains(self, m: Monomial) -> bool:
        return any(mdivides(g, m) for g in self.generators)

    def staircase(self, d: int) -> List[Monomial]:
        """Complement monomials of degree <= d, deglex ascending."""
        return [m for m in monomials_upto(self.n, d) if not self.contains(m)]

    def rho(self, d: int) -> int:
        return len(self.staircase(d))

    @property
    def kappa(self) -> int:
        """Dimension of the zero set of the monomial ideal: the growth
        exponent of the staircase, computed combinatorially.

        kappa = max |S| over variable subsets S such that no generator
        is supported inside S; the empty diagram gives kappa = n."""
        if not self.generators:
            return self.n
        supports = [frozenset(i for i, e in enumerate(g) if e) for g in self.generators]
        if any(not s for s in supports):
            # a generator 1 (or constant) kills everything
            return 0
        best = 0
        for size in range(self.n, -1, -1):
            for S in combinations(range(self.n), size):
                Sset = set(S)
                if all(not supp <= Sset for supp in supports):
                    return size
        return best

    def __eq__(self, other):
        if not isinstance(other, MonomialDiagram):
            return NotImplemented
        return self.n == other.n and self.generators == other.generators

    def __hash__(self):
        return hash((self.n, self.generators))

    def __repr__(self):
        return f"MonomialDiagram(n={self.n}, generators={list(self.generators)})"

    def to_json(self) -> str:
        return json.dumps({"n": self.n,
                           "generators": sorted(list(g) for g in self.generators)},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MonomialDiagram":
        data = json.loads(text)
        return cls(data["n"], [tuple(g) for g in data["generators"]])


class IdealSlice:
    """Exact basis of I_orbit intersected with polynomials of degree <= d,
    in reduced echelon form with deglex-descending pivots."""

    __slots__ = ("degree", "basis", "point", "nu", "field")

    def __init__(self, degree: int, basis: List[Polynomial],
                 point: List[GaussianRational], nu: int, field: VectorField):
        self.degree = degree
        self.basis = basis
        self.point = point
        self.nu = nu
        self.field = field

    def dimension(self) -> int:
        return len(self.basis)

    def leading_monomials(self) -> List[Monomial]:
        return [Q.leading_monomial() for Q in self.basis]

    def __repr__(self):
        return (f"IdealSlice(d={self.degree}, dim={len(self.basis)}, "
                f"nu={self.nu})")


def _require_exact_point(p) -> List[GaussianRational]:
    out = []
    for v in p:
        if isinstance(v, float):
            raise ValueError("orbit-ideal operations need exact points; "
                             "ball arithmetic can only certify non-membership")
        out.append(_as_gr(v))
    return out


def orbit_membership(xi: VectorField, p, P: Polynomial,
                     nu: Optional[int] = None) -> bool:
    """True iff the first nu trajectory derivatives of P vanish at p,
    with nu the explicit multiplicity cap for deg P.

    By the multiplicity bound this decides membership of P in the
    orbit-closure ideal at p."""
    p = _require_exact_point(p)
    if P.is_zero():
        return True
    d = max(P.degree(), 1)
    if nu is None:
        nu = morse_multiplicity_cap(xi.n, d, max(xi.delta, 1))
    if xi.is_singular_at(p):
        return P.evaluate_exact(p).is_zero()
    ex = TrajectoryExpander(xi, p)
    for k in range(nu + 1):
        if ex.poly_coeff(P, k):
            return False
    return True


def ideal_slice(xi: VectorField, p, d: int, nu: Optional[int] = None) -> IdealSlice:
    """Kernel of Q -> (derivatives of Q along the trajectory at p) on
    the space of polynomials of degree <= d."""
    p = _require_exact_point(p)
    if nu is None:
        nu = morse_multiplicity_cap(xi.n, max(d, 1), max(xi.delta, 1))
    monos = monomials_upto(xi.n, d)              # deglex ascending
    cols = list(reversed(monos))                 # deglex descending for pivots
    if xi.is_singular_at(p):
        rows = [[Polynomial(xi.n, {m: GR_ONE}).evaluate_exact(p) for m in cols]]
    else:
        ex = TrajectoryExpander(xi, p)
        ex.extend_to(nu)
        rows = []
        rank_rows: List[List[GaussianRational]] = []
        for k in range(nu + 1):
            row = [ex._node_for(m).coeff(k) if mdeg(m) else
                   (GR_ONE if k == 0 else GR_ZERO) for m in cols]
            rows.append(row)
            # early exit once the map is injective
            if len(rows) % 8 == 0 or k == nu:
                red, piv = rref(rows)
                if len(piv) == len(cols):
                    break
    kernel = nullspace(rows, len(cols))
    basis_vectors = _echelonize_vectors(kernel)
    basis = []
    for vec in basis_vectors:
        terms = {m: c for m, c in zip(cols, vec) if c}
        basis.append(Polynomial(xi.n, terms, xi.names))
    return IdealSlice(d, basis, p, nu, xi)


def _echelonize_vectors(vectors: List[List[GaussianRational]]) -> List[List[GaussianRational]]:
    """Row-reduce the basis so leading (leftmost) entries are distinct
    and normalized to 1."""
    if not vectors:
        return []
    red, _ = rref(vectors)
    return red


def leading_diagram(slice_: IdealSlice) -> MonomialDiagram:
    """Minimal generators of the monomial ideal of slice leading terms."""
    return MonomialDiagram(slice_.field.n, slice_.leading_monomials())


def staircase_division(P: Polynomial, slice_: IdealSlice):
    """Reduce P modulo the slice basis so the remainder is supported on
    the staircase of the leading diagram.

    Returns (R, witness); the witness lists (basis index, monomial
    multiplier, coefficient) triples with P = sum multiplier*basis + R."""
    diagram = leading_diagram(slice_)
    basis = slice_.basis
    lead = [(Q.leading_monomial(), Q.leading_term()[1], Q) for Q in basis]
    R = Polynomial.zero(P.n, P.names)
    work = P
    witness = []
    while work.terms:
        m, c = work.leading_term()
        hit = None
        for idx, (lm, lc, Q) in enumerate(lead):
            if mdivides(lm, m):
                hit = (idx, lm, lc, Q)
                break
        if hit is None:
            R = R + Polynomial(P.n, {m: c}, P.names)
            work = work - Polynomial(P.n, {m: c}, P.names)
            continue
        idx, lm, lc, Q = hit
        mult_mono = tuple(a - b for a, b in zip(m, lm))
        coeff = c / lc
        witness.append((idx, mult_mono, coeff))
        work = work - Polynomial(P.n, {mult_mono: coeff}, P.names) * Q
    assert all(not diagram.contains(m) for m in R.terms)
    return R, witness


def diagram_stability_scan(xi: VectorField, sample_points, d: int,
                           threads: int = 1) -> dict:
    """Leading diagram at every sample; the most frequent diagram is
    reported generic, the rest exceptional."""
    from .util import pmap

    points = [_require_exact_point(p) for p in sample_points]

    def work(p):
        sl = ideal_slice(xi, p, d)
        return leading_diagram(sl)

    diagrams = pmap(work, points, threads)
    counts: Dict[MonomialDiagram, int] = {}
    for dg in diagrams:
        counts[dg] = counts.get(dg, 0) + 1
    generic = max(counts.items(), key=lambda kv: (kv[1], -len(kv[0].generators)))[0]
    exceptional = [i for i, dg in enumerate(diagrams) if dg != generic]
    return {
        "degree": d,
        "samples": len(points),
        "generic_diagram": generic,
        "diagram_counts": [(dg, c) for dg, c in counts.items()],
        "exceptional_indices": exceptional,
    }
