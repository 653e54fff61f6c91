"""Sparse multivariate polynomials over the Gaussian rationals.

Terms are stored as a dict mapping exponent tuples to nonzero
GaussianRational coefficients.  The term order everywhere is deglex
with x1 > x2 > ... > xn.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .monomial import Monomial, deglex_key, mdeg, mmul
from .scalars import GR_ONE, GR_ZERO, GaussianRational, _coerce, denominator_lcm, qq


class Polynomial:
    __slots__ = ("n", "terms", "names")

    def __init__(self, n: int, terms: Optional[Dict[Monomial, GaussianRational]] = None,
                 names: Optional[Tuple[str, ...]] = None):
        self.n = n
        self.terms = {} if terms is None else terms
        self.names = names if names is not None else default_names(n)

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, n: int, names=None) -> "Polynomial":
        return cls(n, {}, names)

    @classmethod
    def constant(cls, n: int, c, names=None) -> "Polynomial":
        c = _as_gr(c)
        if c.is_zero():
            return cls(n, {}, names)
        return cls(n, {(0,) * n: c}, names)

    @classmethod
    def variable(cls, i: int, n: int, names=None) -> "Polynomial":
        if not 0 <= i < n:
            raise ValueError(f"variable index {i} out of range for {n} variables")
        e = tuple(1 if j == i else 0 for j in range(n))
        return cls(n, {e: GR_ONE}, names)

    @classmethod
    def from_terms(cls, n: int, items: Iterable[Tuple[Monomial, GaussianRational]],
                   names=None) -> "Polynomial":
        terms: Dict[Monomial, GaussianRational] = {}
        for m, c in items:
            acc = terms.get(m)
            c = c if acc is None else acc + c
            if c:
                terms[m] = c
            elif acc is not None:
                del terms[m]
        return cls(n, terms, names)

    # -- basic queries --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(mdeg(m) for m in self.terms)

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=deglex_key)

    def leading_term(self) -> Tuple[Monomial, GaussianRational]:
        m = self.leading_monomial()
        return m, self.terms[m]

    def coefficient(self, m: Monomial) -> GaussianRational:
        return self.terms.get(m, GR_ZERO)

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * self.n, GR_ZERO)

    def num_terms(self) -> int:
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset((m, c.re, c.im) for m, c in self.terms.items())))

    # -- ring operations -------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.n != other.n:
            raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            c = _as_gr_or_none(other)
            if c is None:
                return NotImplemented
            other = Polynomial.constant(self.n, c)
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            acc = terms.get(m)
            s = c if acc is None else acc + c
            if s:
                terms[m] = s
            elif acc is not None:
                del terms[m]
        return Polynomial(self.n, terms, self.names)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, {m: -c for m, c in self.terms.items()}, self.names)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            c = _as_gr_or_none(other)
            if c is None:
                return NotImplemented
            other = Polynomial.constant(self.n, c)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = _as_gr_or_none(other)
            if c is None:
                return NotImplemented
            if c.is_zero():
                return Polynomial.zero(self.n, self.names)
            return Polynomial(self.n, {m: v * c for m, v in self.terms.items()}, self.names)
        self._check(other)
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        terms: Dict[Monomial, GaussianRational] = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = mmul(m1, m2)
                c = c1 * c2
                acc = terms.get(m)
                s = c if acc is None else acc + c
                if s:
                    terms[m] = s
                elif acc is not None:
                    del terms[m]
        return Polynomial(self.n, terms, self.names)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.constant(self.n, 1, self.names)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def diff(self, i: int) -> "Polynomial":
        """Partial derivative with respect to variable i."""
        terms: Dict[Monomial, GaussianRational] = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                m2 = m[:i] + (e - 1,) + m[i + 1:]
                c2 = c * e
                acc = terms.get(m2)
                s = c2 if acc is None else acc + c2
                if s:
                    terms[m2] = s
        return Polynomial(self.n, terms, self.names)

    def map_coefficients(self, fn) -> "Polynomial":
        terms = {}
        for m, c in self.terms.items():
            v = fn(c)
            if v:
                terms[m] = v
        return Polynomial(self.n, terms, self.names)

    # -- evaluation -------------------------------------------------------

    def evaluate_exact(self, point: Sequence[GaussianRational]) -> GaussianRational:
        if len(point) != self.n:
            raise ValueError(f"point dimension {len(point)} != {self.n} variables")
        point = [_as_gr(x) for x in point]
        total = GR_ZERO
        powers: List[Dict[int, GaussianRational]] = [dict() for _ in range(self.n)]

        def pw(i, e):
            if e == 0:
                return GR_ONE
            cache = powers[i]
            v = cache.get(e)
            if v is None:
                v = point[i] if e == 1 else pw(i, e - 1) * point[i]
                cache[e] = v
            return v

        for m, c in self.terms.items():
            v = c
            for i, e in enumerate(m):
                if e:
                    v = v * pw(i, e)
            total = total + v
        return total

    def evaluate_complex(self, point: Sequence[complex]) -> complex:
        """Plain floating evaluation (for numeric search, not certified)."""
        if len(point) != self.n:
            raise ValueError(f"point dimension {len(point)} != {self.n} variables")
        total = 0j
        for m, c in self.terms.items():
            v = c.to_complex()
            for i, e in enumerate(m):
                if e:
                    v *= point[i] ** e
            total += v
        return total

    def with_names(self, names: Tuple[str, ...]) -> "Polynomial":
        if len(names) != self.n:
            raise ValueError("wrong number of variable names")
        return Polynomial(self.n, self.terms, tuple(names))

    # -- printing -----------------------------------------------------------

    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"Polynomial({poly_str(self)!r}, n={self.n})"


def default_names(n: int) -> Tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


def _as_gr(c) -> GaussianRational:
    v = _coerce(c)
    if v is NotImplemented:
        raise TypeError(f"cannot use {type(c).__name__} as a coefficient")
    return v


def _as_gr_or_none(c):
    v = _coerce(c)
    return None if v is NotImplemented else v


# -- height, norms, certified evaluation -----------------------------------


def integer_cleared_terms(P: Polynomial) -> Dict[Monomial, GaussianRational]:
    """Terms of P scaled by the lcm of all coefficient denominators."""
    if P.is_zero():
        raise ValueError("height of the zero polynomial is undefined")
    lcm = denominator_lcm(P.terms.values())
    if lcm == 1:
        return dict(P.terms)
    return {m: c * lcm for m, c in P.terms.items()}


def height(P: Polynomial) -> float:
    """Logarithmic height: log of the max coefficient modulus after
    clearing denominators by their lcm."""
    cleared = integer_cleared_terms(P)
    best = max(c.abs2() for c in cleared.values())
    return 0.5 * _log_mpq(best)


def _log_mpq(q) -> float:
    # log of a positive rational, safe against float overflow for big ints
    num, den = q.numerator, q.denominator
    return _log_int(num) - _log_int(den)


def _log_int(k) -> float:
    k = int(k)
    if k <= 0:
        raise ValueError("log of a non-positive integer")
    if k.bit_length() <= 900:
        return math.log(k)
    shift = k.bit_length() - 64
    return math.log(k >> shift) + shift * math.log(2)


def l2_norm_sq(P: Polynomial):
    """Exact sum of squared coefficient moduli (an mpq)."""
    total = qq(0)
    for c in P.terms.values():
        total += c.abs2()
    return total


def l2_norm(P: Polynomial) -> float:
    return math.sqrt(float(l2_norm_sq(P)))


def evaluate(P: Polynomial, point, precision_bits: Optional[int] = None):
    """Evaluate P at a point.

    Exact GaussianRational coordinates give an exact value.  ComplexBall
    coordinates (or precision_bits set) give a certified enclosing ball.
    """
    from .balls import ComplexBall, eval_poly_ball

    if any(isinstance(x, ComplexBall) for x in point):
        return eval_poly_ball(P, list(point))
    if precision_bits is not None:
        prec = precision_bits
        pts = [ComplexBall.from_exact(_as_gr(x), prec) for x in point]
        return eval_poly_ball(P, pts)
    return P.evaluate_exact(point)


def poly_exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact quotient f / g; raises ValueError if g does not divide f."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return Polynomial.zero(f.n, f.names)
    f._check(g)
    gm, gc = g.leading_term()
    rem = f
    q_terms: Dict[Monomial, GaussianRational] = {}
    while rem.terms:
        m, c = rem.leading_term()
        if not all(a <= b for a, b in zip(gm, m)):
            raise ValueError("polynomial division is not exact")
        qm = tuple(b - a for a, b in zip(gm, m))
        qc = c / gc
        q_terms[qm] = qc
        rem = rem - Polynomial(f.n, {qm: qc}, f.names) * g
    return Polynomial(f.n, q_terms, f.names)


def divides(g: Polynomial, f: Polynomial) -> bool:
    try:
        poly_exact_div(f, g)
        return True
    except ValueError:
        return False


# -- canonical text form -----------------------------------------------------


def _monomial_str(m: Monomial, names: Tuple[str, ...]) -> str:
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _coeff_prefix(c: GaussianRational, lead_term: bool, has_monomial: bool) -> str:
    from .scalars import gaussian_str, rational_str

    if c.im:
        if c.re:
            body = f"({gaussian_str(c)})"
            sign = "+"
        else:
            im = c.im
            sign = "-" if im < 0 else "+"
            mag = abs(im)
            body = "i" if mag == 1 else f"{rational_str(mag)}*i"
    else:
        sign = "-" if c.re < 0 else "+"
        mag = abs(c.re)
        body = rational_str(mag)
        if has_monomial and mag == 1:
            body = ""
    if has_monomial and body:
        body += "*"
    if lead_term:
        return body if sign == "+" else "-" + body
    return f" {sign} {body}" if sign == "+" or body or not has_monomial else " - "


def poly_str(P: Polynomial) -> str:
    if P.is_zero():
        return "0"
    out = []
    for idx, m in enumerate(sorted(P.terms, key=deglex_key, reverse=True)):
        c = P.terms[m]
        mono = _monomial_str(m, P.names)
        lead = idx == 0
        if c.im and c.re:
            prefix = _coeff_prefix(c, lead, bool(mono))
            out.append(prefix + mono)
            continue
        sign = "-" if ((c.re or c.im) < 0) else "+"
        mag = c if sign == "+" else -c
        from .scalars import gaussian_str

        body = gaussian_str(mag)
        if mono and body == "1":
            body = ""
        piece = body + ("*" if body and mono else "") + mono
        if lead:
            out.append(piece if sign == "+" else "-" + piece)
        else:
            out.append(f" {sign} {piece}")
    return "".join(out)
