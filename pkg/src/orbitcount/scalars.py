"""Exact scalar arithmetic: rationals and Gaussian rationals.

Rationals are gmpy2.mpq values (always reduced, positive denominator).
Gaussian rationals are pairs of rationals closed under field operations;
they are the coefficient domain for every polynomial in this package.
"""

from __future__ import annotations

import math
from fractions import Fraction

from gmpy2 import mpq

QQ = mpq


def qq(x) -> mpq:
    """Coerce ints, strings like "3/4", Fractions or mpq to mpq."""
    if isinstance(x, mpq):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


_MPQ_ZERO = mpq(0)
_MPQ_ONE = mpq(1)


class GaussianRational:
    """Element of Q(i), stored as exact real and imaginary rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = qq(re)
        self.im = qq(im)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_parts(cls, re: mpq, im: mpq) -> "GaussianRational":
        v = object.__new__(cls)
        v.re = re
        v.im = im
        return v

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational.from_parts(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational.from_parts(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return GaussianRational.from_parts(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational.from_parts(a * c, _MPQ_ZERO)
        return GaussianRational.from_parts(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not d:
            if not c:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GaussianRational.from_parts(a / c, b / c)
        n = c * c + d * d
        return GaussianRational.from_parts((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** (-k))
        result = GR_ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational.from_parts(self.re, -self.im)

    def abs2(self) -> mpq:
        """Exact squared modulus re^2 + im^2."""
        return self.re * self.re + self.im * self.im

    def abs_float(self) -> float:
        return math.sqrt(float(self.abs2()))

    # -- comparisons / hashing ----------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    # -- conversions ---------------------------------------------------

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return gaussian_str(self)


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, mpq, Fraction)):
        return GaussianRational.from_parts(qq(x), _MPQ_ZERO)
    return NotImplemented


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)
GR_I = GaussianRational(0, 1)


def gr(re=0, im=0) -> GaussianRational:
    """Shorthand constructor accepting anything qq() accepts."""
    return GaussianRational(re, im)


def rational_str(q: mpq) -> str:
    """Canonical text form of a rational: "3", "-3/4"."""
    q = qq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def gaussian_str(v: GaussianRational) -> str:
    """Canonical text form: "3/4", "2*i", "1/2+3*i", "1/2-3*i"."""
    if not v.im:
        return rational_str(v.re)
    im_part = "i" if v.im == 1 else ("-i" if v.im == -1 else f"{rational_str(v.im)}*i")
    if not v.re:
        return im_part
    if v.im > 0 and not im_part.startswith("-"):
        return f"{rational_str(v.re)}+{im_part}"
    return f"{rational_str(v.re)}{im_part}"


def parse_gaussian(text: str) -> GaussianRational:
    """Parse the forms produced by gaussian_str (used by serializers)."""
    from .polyparse import parse_scalar

    return parse_scalar(text)


def lcm_int(a: int, b: int) -> int:
    return abs(a * b) // math.gcd(a, b) if a and b else abs(a or b)


def denominator_lcm(values) -> int:
    """LCM of the denominators of all real/imaginary parts."""
    acc = 1
    for v in values:
        acc = lcm_int(acc, int(v.re.denominator))
        acc = lcm_int(acc, int(v.im.denominator))
    return acc
