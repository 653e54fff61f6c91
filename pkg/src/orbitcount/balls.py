"""Certified complex midpoint-radius arithmetic.

Midpoints are mpmath complex numbers at an explicit precision; radii
are Python floats treated as upper bounds.  Every operation inflates
the radius enough to cover both the interval arithmetic and the
rounding of the midpoint, so the exact result of an exact-input
computation is always contained in the output ball.
"""

from __future__ import annotations

import math
from typing import List, Sequence

import mpmath

from .scalars import GaussianRational

# Upward slack factor: strictly dominates accumulated double rounding in
# the (short) radius formulas below.
_UP = 1.0 + 2.0 ** -40
_TINY = 2.0 ** -1000


def _up(x: float) -> float:
    return x * _UP + _TINY


class ComplexBall:
    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid, rad: float, prec: int):
        self.mid = mid
        self.rad = rad
        self.prec = prec

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_exact(cls, v, prec: int) -> "ComplexBall":
        """Ball containing an exact Gaussian rational (or int/mpq)."""
        if not isinstance(v, GaussianRational):
            v = GaussianRational(v)
        with mpmath.workprec(prec):
            mid = mpmath.mpc(mpmath.mpf(v.re.numerator) / mpmath.mpf(v.re.denominator),
                             mpmath.mpf(v.im.numerator) / mpmath.mpf(v.im.denominator))
        rad = _up(_abs_up(mid, prec) * 2.0 ** (2 - prec))
        return cls(mid, rad, prec)

    @classmethod
    def from_mid_rad(cls, mid, rad: float, prec: int) -> "ComplexBall":
        return cls(mid, rad, prec)

    @classmethod
    def exact_zero(cls, prec: int) -> "ComplexBall":
        return cls(mpmath.mpc(0), 0.0, prec)

    # -- arithmetic -------------------------------------------------------

    def _lift(self, other) -> "ComplexBall":
        if isinstance(other, ComplexBall):
            return other
        return ComplexBall.from_exact(other, self.prec)

    def __add__(self, other):
        other = self._lift(other)
        prec = min(self.prec, other.prec)
        with mpmath.workprec(prec):
            mid = self.mid + other.mid
        rad = _up(self.rad + other.rad + _abs_up(mid, prec) * 2.0 ** (2 - prec))
        return ComplexBall(mid, rad, prec)

    __radd__ = __add__

    def __neg__(self):
        # negation at the ball's own precision keeps the mantissa exact
        with mpmath.workprec(self.prec):
            mid = -self.mid
        return ComplexBall(mid, self.rad, self.prec)

    def __sub__(self, other):
        other = self._lift(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        prec = min(self.prec, other.prec)
        with mpmath.workprec(prec):
            mid = self.mid * other.mid
        a = _abs_up(self.mid, prec)
        b = _abs_up(other.mid, prec)
        # complex multiplication rounds the cross products before the
        # final sum, so the rounding term scales with |x||y|, not |xy|
        rad = _up(a * other.rad + b * self.rad + self.rad * other.rad
                  + (a * b + _abs_up(mid, prec)) * 2.0 ** (3 - prec))
        return ComplexBall(mid, rad, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        lo = other.abs_lower()
        if lo <= 0.0:
            raise ZeroDivisionError("division by a ball containing zero")
        prec = min(self.prec, other.prec)
        with mpmath.workprec(prec):
            mid = self.mid / other.mid
        # |x/y - mx/my| <= (|mx| ry + |my| rx) / (|my| (|my| - ry))
        a = _abs_up(self.mid, prec)
        b = _abs_up(other.mid, prec)
        denom = b * (lo / _UP)
        rad = _up((a * other.rad + b * self.rad) / denom
                  + (a / denom * b + _abs_up(mid, prec)) * 2.0 ** (4 - prec))
        return ComplexBall(mid, rad, prec)

    # -- bounds and predicates ----------------------------------------------

    def abs_upper(self) -> float:
        return _up(_abs_up(self.mid, self.prec) + self.rad)

    def abs_lower(self) -> float:
        lo = _abs_down(self.mid, self.prec) - _up(self.rad)
        return lo if lo > 0.0 else 0.0

    def contains_zero(self) -> bool:
        return self.abs_lower() <= 0.0

    def contains_exact(self, v) -> bool:
        """Certified test that an exact value lies inside the ball."""
        diff = ComplexBall.from_exact(v, self.prec) - ComplexBall(self.mid, 0.0, self.prec)
        return diff.abs_upper() <= self.rad

    def widened(self, extra: float) -> "ComplexBall":
        return ComplexBall(self.mid, _up(self.rad + extra), self.prec)

    def arg_halfwidth(self) -> float:
        """Upper bound for angular half-width as seen from the origin."""
        lo = self.abs_lower()
        if lo <= 0.0:
            return math.pi
        s = _up(self.rad) / lo
        if s >= 1.0:
            return math.pi
        return _up(math.asin(s))

    def to_complex(self) -> complex:
        return complex(self.mid)

    def __repr__(self):
        return f"ComplexBall({complex(self.mid)!r}, rad={self.rad:.3e}, prec={self.prec})"


class FloatBall:
    """Double-precision complex ball with conservatively inflated radii.

    IEEE round-to-nearest guarantees relative error <= 2^-53 per
    operation; every radius update is multiplied by (1 + 2^-40) and
    floored upward, which strictly dominates the accumulated rounding.
    Used as the fast path for contour subdivision (prec <= 53)."""

    __slots__ = ("mid", "rad")

    prec = 48  # conservative effective precision claim

    def __init__(self, mid: complex, rad: float):
        self.mid = mid
        self.rad = rad

    @classmethod
    def from_exact(cls, v, prec: int = 48) -> "FloatBall":
        if isinstance(v, GaussianRational):
            z = v.to_complex()
        else:
            z = complex(v)
        return cls(z, _up(abs(z) * 2.0 ** -52))

    @classmethod
    def exact_zero(cls, prec: int = 48) -> "FloatBall":
        return cls(0j, 0.0)

    def _lift(self, other) -> "FloatBall":
        if isinstance(other, FloatBall):
            return other
        return FloatBall.from_exact(other)

    def __add__(self, other):
        other = self._lift(other)
        mid = self.mid + other.mid
        rad = _up(self.rad + other.rad + abs(mid) * 2.0 ** -51)
        return FloatBall(mid, rad)

    __radd__ = __add__

    def __neg__(self):
        return FloatBall(-self.mid, self.rad)

    def __sub__(self, other):
        other = self._lift(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        mid = self.mid * other.mid
        a = abs(self.mid)
        b = abs(other.mid)
        rad = _up(a * other.rad + b * self.rad + self.rad * other.rad
                  + (a * b + abs(mid)) * 2.0 ** -50)
        return FloatBall(mid, rad)

    __rmul__ = __mul__

    def abs_upper(self) -> float:
        return _up(abs(self.mid) + self.rad)

    def abs_lower(self) -> float:
        lo = abs(self.mid) * (1.0 - 2.0 ** -40) - _up(self.rad)
        return lo if lo > 0.0 else 0.0

    def contains_zero(self) -> bool:
        return self.abs_lower() <= 0.0

    def widened(self, extra: float) -> "FloatBall":
        return FloatBall(self.mid, _up(self.rad + extra))

    def arg_halfwidth(self) -> float:
        lo = self.abs_lower()
        if lo <= 0.0:
            return math.pi
        s = _up(self.rad) / lo
        if s >= 1.0:
            return math.pi
        return _up(math.asin(s))

    def to_complex(self) -> complex:
        return self.mid

    def __repr__(self):
        return f"FloatBall({self.mid!r}, rad={self.rad:.3e})"


def _abs_up(mid, prec: int) -> float:
    # |mid| rounded up enough to stay an upper bound as a float
    with mpmath.workprec(prec):
        v = mpmath.fabs(mid)
    return _up(float(v))


def _abs_down(mid, prec: int) -> float:
    with mpmath.workprec(prec):
        v = mpmath.fabs(mid)
    out = float(v) * (1.0 - 2.0 ** -40) - _TINY
    return out if out > 0.0 else 0.0


def ball_point_on_circle(radius, theta: float, prec: int):
    """Ball containing radius * e^{i theta} for float theta, exact radius."""
    if prec <= 53:
        mid = complex(radius) * complex(math.cos(theta), math.sin(theta))
        return FloatBall(mid, _up(float(radius) * 2.0 ** -49))
    with mpmath.workprec(prec):
        mid = mpmath.mpf(radius) * mpmath.expjpi(mpmath.mpf(theta) / mpmath.pi)
    rad = _up(float(radius) * 2.0 ** (4 - prec))
    return ComplexBall(mid, rad, prec)


def ball_arc(radius, t0: float, t1: float, prec: int):
    """Ball containing the whole circular arc radius*e^{i t}, t in [t0, t1]."""
    tc = 0.5 * (t0 + t1)
    half = 0.5 * (t1 - t0)
    center = ball_point_on_circle(radius, tc, prec)
    # chord bound: |e^{it} - e^{itc}| <= |t - tc|
    return center.widened(_up(float(radius) * half))


def eval_poly_ball(P, point: List[ComplexBall]) -> ComplexBall:
    """Certified evaluation of a Polynomial at a vector of balls."""
    if len(point) != P.n:
        raise ValueError(f"point dimension {len(point)} != {P.n} variables")
    prec = min(b.prec for b in point) if point else 53
    total = ComplexBall.exact_zero(prec)
    powers = [dict() for _ in range(P.n)]

    def pw(i, e):
        if e == 0:
            return None
        cache = powers[i]
        v = cache.get(e)
        if v is None:
            v = point[i] if e == 1 else pw(i, e - 1) * point[i]
            cache[e] = v
        return v

    for m, c in P.terms.items():
        v = ComplexBall.from_exact(c, prec)
        for i, e in enumerate(m):
            if e:
                v = v * pw(i, e)
        total = total + v
    return total


def eval_series_ball(coeffs: Sequence[GaussianRational], z: ComplexBall,
                     tail: float = 0.0) -> ComplexBall:
    """Horner evaluation of an exact-coefficient series at a ball, plus an
    extra tail radius."""
    prec = z.prec
    acc = ComplexBall.exact_zero(prec)
    for c in reversed(list(coeffs)):
        acc = acc * z + ComplexBall.from_exact(c, prec)
    if tail:
        acc = acc.widened(tail)
    return acc
