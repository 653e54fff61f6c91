"""Constructors and analyzers for the example systems: linear ODE
systems over rational functions of t, planar invariant-curve (Darboux)
analysis with rational first integrals, and the Schwarzian / modular
third-order equation with its translate fields."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .dynamics import VectorField, lie_derivative
from .linalg import det_poly_matrix, nullspace, rref
from .monomial import monomials_upto
from .polynomial import Polynomial, poly_exact_div, _as_gr
from .scalars import GR_ONE, GR_ZERO, GaussianRational, qq
from .series import Series


# ---------------------------------------------------------------------------
# Univariate utilities over the Gaussian rationals
# ---------------------------------------------------------------------------


def _uni_coeffs(P: Polynomial) -> List[GaussianRational]:
    """Dense coefficient list of a univariate polynomial."""
    if P.n != 1:
        raise ValueError("univariate polynomial expected")
    d = max(P.degree(), 0)
    out = [GR_ZERO] * (d + 1)
    for m, c in P.terms.items():
        out[m[0]] = c
    return out


def _uni_poly(coeffs: Sequence[GaussianRational], name: str = "t") -> Polynomial:
    terms = {(k,): c for k, c in enumerate(coeffs) if c}
    return Polynomial(1, terms, (name,))


def _uni_divmod(a: List[GaussianRational], b: List[GaussianRational]):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    b = list(b)
    while b and not b[-1]:
        b.pop()
    if not b:
        raise ZeroDivisionError("univariate division by zero")
    q = [GR_ZERO] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        k = len(a) - len(b)
        c = a[-1] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            a[k + i] = a[k + i] - c * bc
        while a and not a[-1]:
            a.pop()
    return q, a


def _uni_gcd(a, b):
    a, b = list(a), list(b)
    while any(c for c in b):
        _, r = _uni_divmod(a, b)
        a, b = b, r
    while a and not a[-1]:
        a.pop()
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _deflate(coeffs: List[GaussianRational], root: GaussianRational):
    """Synthetic division by (t - root); returns quotient, remainder."""
    q = []
    acc = GR_ZERO
    for c in reversed(coeffs):
        acc = acc * root + c
        q.append(acc)
    rem = q.pop()
    return list(reversed(q)), rem


def gaussian_roots(P: Polynomial, denom_bound: int = 10 ** 6) -> List[Tuple[GaussianRational, int]]:
    """Roots of a univariate polynomial that are Gaussian rationals, with
    multiplicities; raises if any root fails to be Gaussian rational."""
    import numpy as np

    coeffs = _uni_coeffs(P)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    if len(coeffs) <= 1:
        return []
    work = list(coeffs)
    found: Dict[Tuple, int] = {}
    # numeric roots of multiplicity m are perturbed by eps^(1/m), so snap
    # through a ladder of denominator bounds and verify each candidate
    ladder = [1, 6, 60, 1000, denom_bound]
    while len(work) > 1:
        cf = [c.to_complex() for c in work]
        roots = np.roots(list(reversed(cf)))
        progressed = False
        for r in roots:
            for bound in ladder:
                re = Fraction(float(r.real)).limit_denominator(bound)
                im = Fraction(float(r.imag)).limit_denominator(bound)
                cand = GaussianRational(mpq(re.numerator, re.denominator),
                                        mpq(im.numerator, im.denominator))
                q, rem = _deflate(work, cand)
                if rem.is_zero():
                    key = (cand.re, cand.im)
                    found[key] = found.get(key, 0) + 1
                    work = q
                    progressed = True
                    break
            if progressed:
                break
        if not progressed:
            raise ValueError(
                "polynomial has a root that is not Gaussian rational "
                f"(residual degree {len(work) - 1})")
    return [(GaussianRational(re, im), k) for (re, im), k in sorted(found.items())]


class RationalFunction:
    """Univariate rational function with exact Gaussian-rational data."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Optional[Polynomial] = None):
        if den is None:
            den = Polynomial.constant(1, 1, num.names)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = _uni_gcd(_uni_coeffs(num), _uni_coeffs(den)) if not num.is_zero() else []
        if len(g) > 1:
            gp = _uni_poly(g, num.names[0])
            num = poly_exact_div(num, gp)
            den = poly_exact_div(den, gp)
        lead = den.leading_term()[1] if not den.is_zero() else GR_ONE
        if lead != GR_ONE:
            inv = GR_ONE / lead
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den

    @classmethod
    def parse(cls, text: str, var: str = "t") -> "RationalFunction":
        return _parse_rational_function(text, var)

    @classmethod
    def constant(cls, c, var: str = "t") -> "RationalFunction":
        return cls(Polynomial.constant(1, c, (var,)))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() <= 0

    def __add__(self, other):
        other = self._lift(other)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + self._lift(other)

    def __mul__(self, other):
        other = self._lift(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def _lift(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        return RationalFunction.constant(other, self.num.names[0])

    def diff(self) -> "RationalFunction":
        return RationalFunction(self.num.diff(0) * self.den - self.num * self.den.diff(0),
                                self.den * self.den)

    def poles(self) -> List[Tuple[GaussianRational, int]]:
        return gaussian_roots(self.den)

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __repr__(self):
        if self.den.degree() <= 0 and self.den.constant_term() == GR_ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"


def _parse_rational_function(text: str, var: str) -> RationalFunction:
    """Parse with the polynomial grammar but rational-function division."""
    from .polyparse import PolyParseError, _Parser, _tokenize

    class _RatParser(_Parser):
        def parse_term(self):
            result = RationalFunction(self.parse_factor_poly())
            while True:
                kind, val = self.peek()
                if kind == "op" and val == "*":
                    self.take()
                    result = result * RationalFunction(self.parse_factor_poly())
                elif kind == "op" and val == "/":
                    self.take()
                    result = result / RationalFunction(self.parse_factor_poly())
                else:
                    return result

        def parse_factor_poly(self):
            return super().parse_factor()

        def parse_expr(self):
            sign = 1
            while self.peek() == ("op", "-") or self.peek() == ("op", "+"):
                if self.take()[1] == "-":
                    sign = -sign
            result = self.parse_term()
            if sign < 0:
                result = -result
            while self.peek()[0] == "op" and self.peek()[1] in "+-":
                op = self.take()[1]
                term = self.parse_term()
                result = result + term if op == "+" else result - term
            return result

    parser = _RatParser(_tokenize(text), (var,))
    out = parser.parse_expr()
    if parser.peek()[0] != "end":
        raise PolyParseError(f"trailing input at {parser.peek()[1]!r}")
    if isinstance(out, Polynomial):
        out = RationalFunction(out)
    return out


class RationalMatrixODE:
    """Linear system y' = A(t) y with rational-function entries."""

    __slots__ = ("n", "entries")

    def __init__(self, entries: Sequence[Sequence[RationalFunction]]):
        self.n = len(entries)
        for row in entries:
            if len(row) != self.n:
                raise ValueError("square matrix required")
        self.entries = [list(row) for row in entries]

    @classmethod
    def parse(cls, rows: Sequence[Sequence[str]], var: str = "t") -> "RationalMatrixODE":
        return cls([[RationalFunction.parse(s, var) for s in row] for row in rows])


def linear_system_field(A: RationalMatrixODE, names: Optional[Tuple[str, ...]] = None) -> VectorField:
    """Vector field q(t) [d/dt + A(t) y d/dy] with q minimal such that
    q A is polynomial and vanishes at every pole of A; the singular locus
    then agrees exactly with the polar locus of A."""
    n = A.n
    if names is None:
        names = ("t",) + tuple(f"y{i + 1}" for i in range(n))
    nvars = n + 1
    # per-pole clearing exponent: 1 + max entry pole order
    pole_orders: Dict[Tuple, Tuple[GaussianRational, int]] = {}
    for row in A.entries:
        for e in row:
            for root, k in e.poles():
                key = (root.re, root.im)
                prev = pole_orders.get(key)
                if prev is None or k > prev[1]:
                    pole_orders[key] = (root, k)
    t_uni = Polynomial.variable(0, 1, ("t",))
    q_uni = Polynomial.constant(1, 1, ("t",))
    for _, (root, k) in sorted(pole_orders.items()):
        factor = t_uni - Polynomial.constant(1, root, ("t",))
        q_uni = q_uni * factor ** (k + 1)
    q_full = _embed_univariate(q_uni, nvars, 0, names)
    components = [q_full]
    for i in range(n):
        acc = Polynomial.zero(nvars, names)
        for j in range(n):
            e = A.entries[i][j]
            if e.is_zero():
                continue
            qa_uni_num = q_uni * e.num
            qa_uni, rem = _uni_divmod(_uni_coeffs(qa_uni_num), _uni_coeffs(e.den))
            if any(rem):
                raise ArithmeticError("clearing polynomial failed to clear a pole")
            qa = _embed_univariate(_uni_poly(qa_uni, "t"), nvars, 0, names)
            acc = acc + qa * Polynomial.variable(j + 1, nvars, names)
        components.append(acc)
    return VectorField(components, names)


def _embed_univariate(P: Polynomial, nvars: int, position: int, names) -> Polynomial:
    terms = {}
    for m, c in P.terms.items():
        e = [0] * nvars
        e[position] = m[0]
        terms[tuple(e)] = c
    return Polynomial(nvars, terms, names)


# ---------------------------------------------------------------------------
# Darboux invariant curves and rational first integrals
# ---------------------------------------------------------------------------


class InvariantCurve:
    __slots__ = ("f", "cofactor")

    def __init__(self, f: Polynomial, cofactor: Polynomial):
        self.f = f
        self.cofactor = cofactor

    def verify(self, xi: VectorField) -> bool:
        return (lie_derivative(xi, self.f) - self.cofactor * self.f).is_zero()

    def __repr__(self):
        return f"InvariantCurve(f={self.f}, K={self.cofactor})"


class DarbouxResult:
    __slots__ = ("curves", "partial", "notes")

    def __init__(self, curves: List[InvariantCurve], partial: bool, notes: List[str]):
        self.curves = curves
        self.partial = partial
        self.notes = notes

    def __iter__(self):
        return iter(self.curves)

    def __len__(self):
        return len(self.curves)


def jouanolou_threshold(m: int) -> int:
    """Curve count forcing a rational first integral: 2 + m(m+1)/2."""
    return 2 + m * (m + 1) // 2


def _normalize_curve(f: Polynomial) -> Polynomial:
    lead = f.leading_term()[1]
    if lead == GR_ONE:
        return f
    return f * (GR_ONE / lead)


def darboux_curves(xi: VectorField, N: int, seed: int = 0,
                   max_degree_cap: int = 4) -> DarbouxResult:
    """Invariant algebraic curves xi f = K f with deg f <= N (deg K is at
    most m-1).  Complete for fields of degree m <= 2 up to the stated
    caps (Gaussian-rational cofactor data); degenerate strata and m >= 3
    are searched partially and flagged."""
    if xi.n != 2:
        raise ValueError("planar vector fields only")
    if N > max_degree_cap:
        raise ValueError(f"degree cap {max_degree_cap} exceeded")
    m = max(xi.delta, 1)
    notes: List[str] = []
    partial = False
    curves: List[InvariantCurve] = []
    seen = set()

    def add(f: Polynomial, K: Polynomial):
        if f.degree() < 1:
            return
        f = _normalize_curve(f)
        key = (frozenset((mm, c.re, c.im) for mm, c in f.terms.items()))
        if key in seen:
            return
        cand = InvariantCurve(f, K)
        if not cand.verify(xi):
            raise AssertionError("unverified invariant curve candidate")
        seen.add(key)
        curves.append(cand)

    if m == 1:
        for k0, kernel in _pencil_eigensolve_const(xi, N, notes):
            K = Polynomial.constant(2, k0, xi.names)
            for vec_poly in kernel:
                add(vec_poly, K)
    elif m == 2:
        found_all = _darboux_quadratic(xi, N, seed, add, notes)
        partial = partial or not found_all
    else:
        notes.append(f"field degree {m} >= 3: only cofactor-free curves searched")
        partial = True
        for f in _kernel_curves(xi, N, Polynomial.zero(2, xi.names)):
            add(f, Polynomial.zero(2, xi.names))
    curves.sort(key=lambda c: (c.f.degree(), str(c.f)))
    return DarbouxResult(curves, partial, notes)


def _poly_space_matrix(xi: VectorField, N: int, K: Polynomial):
    """Matrix of f -> xi f - K f on polynomials of degree <= N, rows
    indexed by monomials of degree <= N + max(deg K, delta-1)."""
    cols = monomials_upto(2, N)
    out_deg = N + max(max(xi.delta - 1, 0), max(K.degree(), 0))
    rows_idx = monomials_upto(2, out_deg)
    row_pos = {mm: i for i, mm in enumerate(rows_idx)}
    mat = [[GR_ZERO] * len(cols) for _ in rows_idx]
    for j, mm in enumerate(cols):
        base = Polynomial(2, {mm: GR_ONE}, xi.names)
        img = lie_derivative(xi, base) - K * base
        for mi, c in img.terms.items():
            mat[row_pos[mi]][j] = c
    return mat, cols


def _kernel_curves(xi: VectorField, N: int, K: Polynomial) -> List[Polynomial]:
    mat, cols = _poly_space_matrix(xi, N, K)
    out = []
    for vec in nullspace(mat, len(cols)):
        f = Polynomial(2, {mm: c for mm, c in zip(cols, vec) if c}, xi.names)
        if f.degree() >= 1:
            out.append(f)
    return out


def _pencil_eigensolve_const(xi: VectorField, N: int, notes: List[str]):
    """For fields of degree 1 the cofactor is a constant k; the valid k
    are the Gaussian-rational roots of det(L - k I) on the degree-N
    polynomial space."""
    cols = monomials_upto(2, N)
    D = len(cols)
    pos = {mm: i for i, mm in enumerate(cols)}
    kvar = Polynomial.variable(0, 1, ("k",))
    pencil = [[Polynomial.zero(1, ("k",)) for _ in range(D)] for _ in range(D)]
    for j, mm in enumerate(cols):
        base = Polynomial(2, {mm: GR_ONE}, xi.names)
        img = lie_derivative(xi, base)
        for mi, c in img.terms.items():
            if mi not in pos:
                raise AssertionError("degree-1 field must preserve the space")
            pencil[pos[mi]][j] = pencil[pos[mi]][j] + Polynomial.constant(1, c, ("k",))
        pencil[j][j] = pencil[j][j] - kvar
    charpoly = det_poly_matrix(pencil)
    results = []
    try:
        roots = gaussian_roots(charpoly)
    except ValueError:
        notes.append("non-Gaussian eigenvalue in the cofactor pencil; "
                     "those strata skipped")
        roots = []
        for cand, mult in _snapable_roots(charpoly):
            roots.append((cand, mult))
    for k0, _mult in roots:
        K = Polynomial.constant(2, k0, xi.names)
        kernel = _kernel_curves(xi, N, K)
        if kernel:
            results.append((k0, kernel))
    return results


def _snapable_roots(P: Polynomial):
    import numpy as np

    coeffs = _uni_coeffs(P)
    cf = [c.to_complex() for c in coeffs]
    while cf and abs(cf[-1]) == 0.0:
        cf.pop()
    if len(cf) <= 1:
        return []
    out = []
    seen = set()
    for r in np.roots(list(reversed(cf))):
        re = Fraction(float(r.real)).limit_denominator(10 ** 6)
        im = Fraction(float(r.imag)).limit_denominator(10 ** 6)
        cand = GaussianRational(mpq(re.numerator, re.denominator),
                                mpq(im.numerator, im.denominator))
        key = (cand.re, cand.im)
        if key in seen:
            continue
        seen.add(key)
        if _uni_poly(_uni_coeffs(P)).evaluate_exact([cand]).is_zero():
            out.append((cand, 1))
    return out


def _darboux_quadratic(xi: VectorField, N: int, seed: int, add, notes) -> bool:
    """Degree-2 fields: enumerate candidate top cofactor structures from
    the exceptional directions of the top form, then solve the remaining
    scalar-cofactor pencil exactly."""
    names = xi.names
    P2 = _homogeneous_part(xi.components[0], 2)
    Q2 = _homogeneous_part(xi.components[1], 2)
    x = Polynomial.variable(0, 2, names)
    y = Polynomial.variable(1, 2, names)
    T = x * Q2 - y * P2
    complete = True
    if T.is_zero():
        notes.append("degenerate top form (x Q_m - y P_m = 0); "
                     "only cofactor-free curves searched")
        for f in _kernel_curves(xi, N, Polynomial.zero(2, names)):
            add(f, Polynomial.zero(2, names))
        return False
    lines = _binary_form_lines(T, names, notes)
    if lines is None:
        complete = False
        lines = []
    tried = set()
    for Nprime in range(1, N + 1):
        for combo in _line_combos(lines, Nprime):
            f_top = Polynomial.constant(2, 1, names)
            for L in combo:
                f_top = f_top * L
            try:
                K1 = poly_exact_div(_homogeneous_part(lie_derivative(xi, f_top),
                                                      Nprime + 1), f_top)
            except ValueError:
                continue
            key = str(K1) + "|" + str(Nprime)
            if key in tried:
                continue
            tried.add(key)
            ok = _solve_cofactor_pencil(xi, Nprime, f_top, K1, seed, add)
            complete = complete and ok
    # cofactor-free curves (first integrals) always included
    for f in _kernel_curves(xi, N, Polynomial.zero(2, names)):
        add(f, Polynomial.zero(2, names))
    return complete


def _homogeneous_part(P: Polynomial, d: int) -> Polynomial:
    return Polynomial(P.n, {m: c for m, c in P.terms.items() if sum(m) == d}, P.names)


def _binary_form_lines(T: Polynomial, names, notes) -> Optional[List[Polynomial]]:
    """Linear factors of a binary form over the Gaussian rationals.

    Dehomogenizing with x = 1 gives T(1, s); each root s0 yields the
    line y - s0 x, and the degree drop accounts for x factors."""
    n_deg = T.degree()
    x = Polynomial.variable(0, 2, names)
    y = Polynomial.variable(1, 2, names)
    uni = [GR_ZERO] * (n_deg + 1)
    for (mi, mj), c in T.terms.items():
        uni[mj] = uni[mj] + c
    Puni = _uni_poly(uni, "s")
    try:
        roots = gaussian_roots(Puni)
    except ValueError:
        notes.append("top exceptional directions not Gaussian rational; "
                     "those strata skipped")
        return None
    lines = []
    for s0, mult in roots:
        lines.extend([y - Polynomial.constant(2, s0, names) * x] * mult)
    deg_drop = n_deg - (Puni.degree() if not Puni.is_zero() else 0)
    lines.extend([x] * deg_drop)
    return lines


def _line_combos(lines: List[Polynomial], k: int):
    from itertools import combinations

    idx = list(range(len(lines)))
    seen = set()
    for combo in combinations(idx, k):
        key = tuple(sorted(str(lines[i]) for i in combo))
        if key in seen:
            continue
        seen.add(key)
        yield [lines[i] for i in combo]


def _solve_cofactor_pencil(xi: VectorField, Nprime: int, f_top: Polynomial,
                           K1: Polynomial, seed: int, add) -> bool:
    """Lower coefficients of f plus the scalar cofactor part: the system
    (xi - K1 - k0) f = 0 with f = tau f_top + f_low is a linear pencil in
    k0; its rank-drop values are roots of compressed determinants."""
    names = xi.names
    low_monos = monomials_upto(2, Nprime - 1)
    cols = len(low_monos) + 1  # + tau
    out_deg = Nprime + 1
    rows_idx = monomials_upto(2, out_deg)
    row_pos = {mm: i for i, mm in enumerate(rows_idx)}
    R = len(rows_idx)
    kname = ("k",)
    zero_k = Polynomial.zero(1, kname)
    kvar = Polynomial.variable(0, 1, kname)
    pencil = [[zero_k for _ in range(cols)] for _ in range(R)]

    def put(row_poly: Polynomial, col: int, with_k_times: Polynomial):
        for mi, c in row_poly.terms.items():
            pencil[row_pos[mi]][col] = pencil[row_pos[mi]][col] + \
                Polynomial.constant(1, c, kname)
        for mi, c in with_k_times.terms.items():
            pencil[row_pos[mi]][col] = pencil[row_pos[mi]][col] - \
                kvar * Polynomial.constant(1, c, kname)

    for j, mm in enumerate(low_monos):
        base = Polynomial(2, {mm: GR_ONE}, names)
        img = lie_derivative(xi, base) - K1 * base
        put(img, j, base)
    img_top = lie_derivative(xi, f_top) - K1 * f_top
    put(img_top, cols - 1, f_top)

    rng = random.Random(seed)
    dets = []
    for attempt in range(3):
        S = [[Polynomial.constant(1, rng.randint(-5, 5), kname) for _ in range(R)]
             for _ in range(cols)]
        comp = [[sum_poly(S[i][r] * pencil[r][j] for r in range(R))
                 for j in range(cols)] for i in range(cols)]
        det = det_poly_matrix(comp)
        if not det.is_zero():
            dets.append(det)
        if len(dets) == 2:
            break
    if not dets:
        return False
    g = dets[0]
    if len(dets) == 2:
        g = _uni_poly(_uni_gcd(_uni_coeffs(dets[0]), _uni_coeffs(dets[1])), "k")
    try:
        roots = gaussian_roots(g)
    except ValueError:
        roots = _snapable_roots(g)
        complete = False
    else:
        complete = True
    for k0, _ in roots:
        K = K1 + Polynomial.constant(2, k0, names)
        # exact kernel of the full (uncompressed) system at k0
        mat = [[_eval_k(pencil[r][j], k0) for j in range(cols)] for r in range(R)]
        for vec in nullspace(mat, cols):
            f = Polynomial(2, {mm: c for mm, c in zip(low_monos, vec[:-1]) if c}, names)
            f = f + f_top * vec[-1]
            if f.degree() >= 1 and (lie_derivative(xi, f) - K * f).is_zero():
                add(f, K)
    return complete


def sum_poly(items):
    total = None
    for it in items:
        total = it if total is None else total + it
    return total


def _eval_k(P: Polynomial, k0: GaussianRational) -> GaussianRational:
    return P.evaluate_exact([k0])


def first_integral_from_curves(curves: Sequence[InvariantCurve], xi: VectorField):
    """Rational first integral from cofactor cancellation: integer lambda
    with sum lambda_i K_i = 0 gives R = prod f_i^lambda_i with xi R = 0.

    Returns (numerator, denominator) or None when no cancellation exists."""
    if not curves:
        return None
    monos = set()
    for c in curves:
        monos.update(c.cofactor.terms)
    monos = sorted(monos)
    rows = []
    for mm in monos:
        rows.append([c.cofactor.terms.get(mm, GR_ZERO) for c in curves])
        # split real and imaginary parts to force rational lambda
    real_rows = []
    for row in rows:
        real_rows.append([GaussianRational(v.re) for v in row])
        real_rows.append([GaussianRational(v.im) for v in row])
    if not real_rows:
        real_rows = [[GR_ZERO for _ in curves]]
    kernel = nullspace(real_rows, len(curves))
    if not kernel:
        return None
    vec = kernel[0]
    first = next((v for v in vec if v), None)
    if first is not None and first.re < 0:
        vec = [-v for v in vec]
    # scale to coprime integers
    denoms = 1
    for v in vec:
        denoms = denoms * int(v.re.denominator) // math.gcd(denoms, int(v.re.denominator))
    ints = [int(v.re * denoms) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    num = Polynomial.constant(2, 1, xi.names)
    den = Polynomial.constant(2, 1, xi.names)
    for lam, c in zip(ints, curves):
        if lam > 0:
            num = num * c.f ** lam
        elif lam < 0:
            den = den * c.f ** (-lam)
    # exact verification xi(num/den) = 0
    residual = lie_derivative(xi, num) * den - num * lie_derivative(xi, den)
    if not residual.is_zero():
        return None
    return num, den


# ---------------------------------------------------------------------------
# Schwarzian derivative, the modular operator chi, and translate fields
# ---------------------------------------------------------------------------


def schwarzian(f: Series) -> Series:
    """S(f) = (f''/f')' - (1/2)(f''/f')^2, exact to the available order."""
    if f.order < 3:
        raise ValueError("need at least order 3 for the Schwarzian")
    d1 = f.diff()
    if not d1.coeffs[0]:
        raise ValueError("Schwarzian needs f'(0) != 0")
    d2 = d1.diff()
    g = d2 * d1.inverse()          # order K-2
    return g.diff() - g * g * mpq(1, 2)


_J_SHIFT = 1728
_R_NUM = (1, -1968, 2654208)


def chi(f: Series) -> Series:
    """chi(f) = S(f) + R(f) (f')^2 with
    R(w) = (w^2 - 1968 w + 2654208) / (2 w^2 (w - 1728)^2)."""
    c0 = f.coeffs[0]
    if not c0 or c0 == GaussianRational(_J_SHIFT):
        raise ValueError("chi has a pole where f(0) is 0 or 1728")
    if f.order < 3 or not f.diff().coeffs[0]:
        raise ValueError("chi needs order >= 3 and f'(0) != 0")
    S = schwarzian(f)
    K = S.order
    fw = f.truncate(K + 1) if f.order > K else f
    num = (fw * fw + fw * _R_NUM[1] + Series.constant(_R_NUM[2], fw.order)).truncate(K)
    shift = fw - Series.constant(_J_SHIFT, fw.order)
    den = (fw * fw * shift * shift * 2).truncate(K)
    R = num * den.inverse()
    d1 = f.diff()
    return S + (R * (d1 * d1).truncate(K)).truncate(K)


def jfunction_field() -> VectorField:
    """Third-order automorphic equation as a polynomial field on
    (t, y, y', y''): the clearing factor is y^3 (y-1728)^3 (y')^2.

    The cleared equation is q y''' = qA with
    A = (3/2)(y'')^2/y' - R(y)(y')^3, the unique sign for which
    chi(f) = 0 along every nonsingular trajectory."""
    names = ("t", "y", "dy", "ddy")
    n = 4
    y = Polynomial.variable(1, n, names)
    y1 = Polynomial.variable(2, n, names)
    y2 = Polynomial.variable(3, n, names)
    shift = y - Polynomial.constant(n, _J_SHIFT, names)
    num_R = y * y + y * _R_NUM[1] + Polynomial.constant(n, _R_NUM[2], names)
    q = y ** 3 * shift ** 3 * y1 ** 2
    qA = y ** 3 * shift ** 3 * y1 * y2 ** 2 * mpq(3, 2) - \
        num_R * y * shift * y1 ** 5 * mpq(1, 2)
    return VectorField([q, q * y1, q * y2, qA], names)


def translates_field(rs: Sequence[RationalFunction]) -> VectorField:
    """Shared-time product field whose trajectories carry one automorphic
    block (y_k, y_k', y_k'') per reparametrization r_k(t)."""
    rs = list(rs)
    if not rs:
        raise ValueError("need at least one rational function")
    for r in rs:
        if r.is_constant():
            raise ValueError("translates need nonconstant rational functions")
    n = len(rs)
    nvars = 1 + 3 * n
    names = ("t",) + tuple(f"{nm}{k + 1}" for k in range(n) for nm in ("y", "dy", "ddy"))
    blocks = []
    T_uni = Polynomial.constant(1, 1, ("t",))
    for r in rs:
        u, v = r.num, r.den
        w1 = u.diff(0) * v - u * v.diff(0)
        w2 = w1.diff(0) * v - v.diff(0) * w1 * 2
        w3 = w2.diff(0) * v - v.diff(0) * w2 * 3
        blocks.append((w1, w2, w3, v))
        T_uni = T_uni * (w1 * v) ** 3
    Q = _embed_univariate(T_uni, nvars, 0, names)
    B_polys = []
    for k in range(n):
        y = Polynomial.variable(1 + 3 * k, nvars, names)
        y1 = Polynomial.variable(2 + 3 * k, nvars, names)
        shift = y - Polynomial.constant(nvars, _J_SHIFT, names)
        B = y ** 3 * shift ** 3 * y1 ** 2
        B_polys.append(B)
        Q = Q * B
    components = [Q]
    for k in range(n):
        y1 = Polynomial.variable(2 + 3 * k, nvars, names)
        y2 = Polynomial.variable(3 + 3 * k, nvars, names)
        components.append(Q * y1)
        components.append(Q * y2)
        w1, w2, w3, v = blocks[k]
        y = Polynomial.variable(1 + 3 * k, nvars, names)
        shift = y - Polynomial.constant(nvars, _J_SHIFT, names)
        num_R = y * y + y * _R_NUM[1] + Polynomial.constant(nvars, _R_NUM[2], names)
        W1 = _embed_univariate(w1, nvars, 0, names)
        W2 = _embed_univariate(w2, nvars, 0, names)
        W3 = _embed_univariate(w3, nvars, 0, names)
        V = _embed_univariate(v, nvars, 0, names)
        # A_k D_k = -num_R y'^4 w1^2 v^2 + 3 y^2 s^2 (y'' w1 v - y' w2)^2
        #           + 2 y^2 s^2 y' (y' w1 w3 + 3 y'' v w1 w2 - 3 y' w2^2)
        N_k = -(num_R * y1 ** 4 * W1 ** 2 * V ** 2) + \
            (y ** 2 * shift ** 2 * (y2 * W1 * V - y1 * W2) ** 2) * 3 + \
            (y ** 2 * shift ** 2 * y1 *
             (y1 * W1 * W3 + y2 * V * W1 * W2 * 3 - y1 * W2 ** 2 * 3)) * 2
        D_k = y ** 2 * shift ** 2 * y1 * W1 ** 2 * V ** 2 * 2
        quot = poly_exact_div(Q, D_k)
        components.append(quot * N_k)
    return VectorField(components, names)


# ---------------------------------------------------------------------------
# Verification helpers for the third-order fields
# ---------------------------------------------------------------------------


def germ_time_series(germ, coord: int, t_index: int = 0) -> Series:
    """A trajectory coordinate as a series in w = t - t0, obtained by
    reverting the internal-time series t(z)."""
    t_series = germ.series[t_index]
    w = Series([GR_ZERO] + list(t_series.coeffs[1:]))
    z_of_w = w.reversion()
    return germ.series[coord].compose(z_of_w)


def block_residual(xi: VectorField, germ, block: int = 0) -> Series:
    """Residual Q * f''' - (cleared A) for one automorphic block, with f
    the block's first coordinate as a function of t; identically zero
    (to truncation) exactly when the germ solves the third-order ODE."""
    from .series import poly_at_series

    t_series = germ.series[0]
    w = Series([GR_ZERO] + list(t_series.coeffs[1:]))
    z_of_w = w.reversion()
    f = germ.series[1 + 3 * block].compose(z_of_w)
    f3 = f.diff().diff().diff()
    order = f3.order
    t0 = germ.base[0]
    args = []
    tser = Series.constant(t0, order)
    if order >= 1:
        tser = tser + Series.identity(order)
    args.append(tser)
    for i in range(1, xi.n):
        args.append(germ.series[i].compose(z_of_w).truncate(order)
                    if germ.series[i].order >= 1 else Series.constant(germ.base[i], order))
    Qv = poly_at_series(xi.components[0], args, order)
    Av = poly_at_series(xi.components[3 * block + 3], args, order)
    return (Qv * f3.truncate(order)) - Av


def chi_of_germ(germ, block: int = 0) -> Series:
    """chi applied to a block coordinate viewed as a function of t."""
    f = germ_time_series(germ, 1 + 3 * block)
    return chi(f)
