"""Truncated univariate power series with exact Gaussian-rational
coefficients.

A Series carries coefficients for z^0..z^K and remembers K; binary
operations truncate to the smaller order.  Nothing here is certified:
tail bounds for trajectory germs live in dynamics.certify_radius.
"""

from __future__ import annotations

from typing import Callable, List, Optional, Sequence

from .scalars import GR_ONE, GR_ZERO, GaussianRational, _coerce


def _gr(c) -> GaussianRational:
    v = _coerce(c)
    if v is NotImplemented:
        raise TypeError(f"bad series coefficient of type {type(c).__name__}")
    return v


class Series:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        self.coeffs = [_gr(c) for c in coeffs]
        if not self.coeffs:
            raise ValueError("series needs at least the constant coefficient")

    @classmethod
    def constant(cls, c, order: int) -> "Series":
        out = [_gr(c)] + [GR_ZERO] * order
        return cls(out)

    @classmethod
    def identity(cls, order: int) -> "Series":
        # the series "z"
        out = [GR_ZERO] * (order + 1)
        if order >= 1:
            out[1] = GR_ONE
        return cls(out)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> GaussianRational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else GR_ZERO

    def truncate(self, order: int) -> "Series":
        if order >= self.order:
            return self
        return Series(self.coeffs[: order + 1])

    def pad(self, order: int) -> "Series":
        if order <= self.order:
            return self
        return Series(self.coeffs + [GR_ZERO] * (order - self.order))

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def valuation(self) -> Optional[int]:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.coeffs == other.coeffs

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Series):
            other = Series.constant(other, self.order)
        K = min(self.order, other.order)
        return Series([self[k] + other[k] for k in range(K + 1)])

    __radd__ = __add__

    def __neg__(self):
        return Series([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Series):
            other = Series.constant(other, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            c = _gr(other)
            return Series([v * c for v in self.coeffs])
        K = min(self.order, other.order)
        out = [GR_ZERO] * (K + 1)
        for i, a in enumerate(self.coeffs[: K + 1]):
            if not a:
                continue
            for j in range(0, K - i + 1):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return Series(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Series":
        if k < 0:
            raise ValueError("negative series power")
        result = Series.constant(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def diff(self) -> "Series":
        if self.order == 0:
            return Series([GR_ZERO])
        return Series([self.coeffs[k] * k for k in range(1, len(self.coeffs))])

    def integrate(self) -> "Series":
        out = [GR_ZERO] * (len(self.coeffs) + 1)
        for k, c in enumerate(self.coeffs):
            if c:
                out[k + 1] = c / (k + 1)
        return Series(out)

    def inverse(self) -> "Series":
        """Multiplicative inverse; requires a nonzero constant term."""
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("series with zero constant term has no inverse")
        K = self.order
        inv0 = GR_ONE / c0
        out = [inv0] + [GR_ZERO] * K
        for k in range(1, K + 1):
            acc = GR_ZERO
            for j in range(1, k + 1):
                a = self[j]
                if a:
                    acc = acc + a * out[k - j]
            out[k] = -inv0 * acc
        return Series(out)

    def __truediv__(self, other):
        if not isinstance(other, Series):
            c = _gr(other)
            return Series([v / c for v in self.coeffs])
        return self * other.inverse()

    def compose(self, inner: "Series") -> "Series":
        """Self(inner(z)); requires inner(0) = 0."""
        if inner.coeffs[0]:
            raise ValueError("composition needs inner constant term 0")
        K = min(self.order, inner.order)
        inner = inner.truncate(K)
        result = Series.constant(0, K)
        for c in reversed(self.coeffs):
            result = result * inner
            if c:
                result = result + Series.constant(c, K)
        return result

    def reversion(self) -> "Series":
        """Compositional inverse g with g(self(z)) = z; needs self(0)=0
        and self'(0) != 0."""
        if self.coeffs[0]:
            raise ValueError("reversion needs constant term 0")
        if len(self.coeffs) < 2 or not self.coeffs[1]:
            raise ValueError("reversion needs nonzero linear coefficient")
        K = self.order
        g = [GR_ZERO, GR_ONE / self.coeffs[1]] + [GR_ZERO] * (K - 1)
        # Newton-free fixed point: determine g coefficients order by order
        for m in range(2, K + 1):
            comp = Series(g[: m + 1]).compose(self.truncate(m))
            err = comp[m]
            # composing with f: coefficient m gets g_m * f1^m plus known terms
            g[m] = -err / (self.coeffs[1] ** m)
        return Series(g)

    def eval_exact(self, z) -> GaussianRational:
        """Horner evaluation of the truncated polynomial at an exact point."""
        z = _gr(z)
        acc = GR_ZERO
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def scale_variable(self, c) -> "Series":
        """Series of self(c*z)."""
        c = _gr(c)
        out = []
        power = GR_ONE
        for k, v in enumerate(self.coeffs):
            out.append(v * power)
            power = power * c
        return Series(out)

    def map(self, fn: Callable[[GaussianRational], GaussianRational]) -> "Series":
        return Series([fn(c) for c in self.coeffs])

    def __repr__(self):
        from .scalars import gaussian_str

        bits = []
        for k, c in enumerate(self.coeffs[:8]):
            if c:
                bits.append(f"{gaussian_str(c)}*z^{k}")
        tail = " + ..." if self.order >= 8 else ""
        return f"Series({' + '.join(bits) or '0'}{tail}, order={self.order})"


def poly_at_series(P, pieces: Sequence["Series"], order: int) -> "Series":
    """Evaluate a multivariate Polynomial at a vector of series."""
    if len(pieces) != P.n:
        raise ValueError(f"{len(pieces)} series for {P.n} variables")
    pieces = [s.pad(order).truncate(order) for s in pieces]
    cache = {}

    def pw(i, e):
        key = (i, e)
        v = cache.get(key)
        if v is None:
            v = pieces[i] if e == 1 else pw(i, e - 1) * pieces[i]
            cache[key] = v
        return v

    out = Series.constant(0, order)
    for m, c in P.terms.items():
        term = Series.constant(c, order)
        for i, e in enumerate(m):
            if e:
                term = term * pw(i, e)
        out = out + term
    return out
