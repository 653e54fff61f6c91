"""Polynomial vector fields, Lie derivatives, exact trajectory power
series and certified convergence radii.

The key identity used throughout: for the natural-time solution x(z) of
x' = xi(x), x(0) = p, and any polynomial P,

    k! * [z^k] (P o x)  =  (xi^k P)(p).

Trajectory coefficients are produced by an incremental product engine so
that order-K expansion of P o x costs O(K^2) coefficient operations per
product node instead of the naive O(K^3).
"""

from __future__ import annotations

import json
import math
from typing import Dict, List, Optional, Sequence, Tuple

from .monomial import Monomial
from .polynomial import Polynomial, default_names
from .scalars import GR_ONE, GR_ZERO, GaussianRational, gaussian_str
from .series import Series


class CertificationError(RuntimeError):
    """A requested certified bound could not be established."""


class VectorField:
    """A polynomial vector field: n components in n variables."""

    __slots__ = ("n", "components", "names")

    def __init__(self, components: Sequence[Polynomial], names: Optional[Tuple[str, ...]] = None):
        components = list(components)
        if not components:
            raise ValueError("vector field needs at least one component")
        n = components[0].n
        if len(components) != n:
            raise ValueError(f"{len(components)} components for {n} variables")
        for c in components:
            if c.n != n:
                raise ValueError("component variable counts differ")
        self.n = n
        self.components = tuple(components)
        self.names = tuple(names) if names is not None else components[0].names

    @property
    def delta(self) -> int:
        """Degree of the field: max component degree (0 for the zero field)."""
        return max(max(c.degree(), 0) for c in self.components)

    def is_singular_at(self, p: Sequence[GaussianRational]) -> bool:
        return all(c.evaluate_exact(p).is_zero() for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def __repr__(self):
        comps = ", ".join(str(c) for c in self.components)
        return f"VectorField([{comps}]; vars={','.join(self.names)})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "variables": list(self.names),
            "components": [str(c) for c in self.components],
        }

    @classmethod
    def from_json(cls, data: dict) -> "VectorField":
        from .polyparse import parse_polynomial

        names = tuple(data["variables"])
        comps = [parse_polynomial(s, names) for s in data["components"]]
        return cls(comps, names)


def lie_derivative(xi: VectorField, P: Polynomial) -> Polynomial:
    """Directional derivative of P along xi: sum_i xi_i dP/dx_i."""
    if P.n != xi.n:
        raise ValueError(f"polynomial in {P.n} variables, field in {xi.n}")
    total = Polynomial.zero(P.n, P.names)
    for i, comp in enumerate(xi.components):
        d = P.diff(i)
        if not d.is_zero() and not comp.is_zero():
            total = total + comp * d
    return total


def iterated_lie(xi: VectorField, P: Polynomial, k: int) -> List[Polynomial]:
    """[P, xi P, ..., xi^k P], all exact."""
    if k < 0:
        raise ValueError("negative iteration count")
    out = [P]
    for _ in range(k):
        out.append(lie_derivative(xi, out[-1]))
    return out


def morse_multiplicity_cap(n: int, d: int, delta: int) -> int:
    """Explicit multiplicity bound 2^(n+1) (d + (n-1) delta)^n."""
    base = d + (n - 1) * delta
    return 2 ** (n + 1) * base ** n


# ---------------------------------------------------------------------------
# Incremental trajectory expansion engine
# ---------------------------------------------------------------------------


class _Node:
    """A product of two coefficient streams, extended on demand."""

    __slots__ = ("a", "b", "coeffs")

    def __init__(self, a, b):
        self.a = a
        self.b = b
        self.coeffs: List[GaussianRational] = []

    def coeff(self, k: int) -> GaussianRational:
        while len(self.coeffs) <= k:
            m = len(self.coeffs)
            acc = GR_ZERO
            for j in range(m + 1):
                x = self.a.coeff(j)
                if x:
                    y = self.b.coeff(m - j)
                    if y:
                        acc = acc + x * y
            self.coeffs.append(acc)
        return self.coeffs[k]


class _Stream:
    """A plain coefficient list that the expander appends to."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = coeffs

    def coeff(self, k: int) -> GaussianRational:
        return self.coeffs[k] if k < len(self.coeffs) else GR_ZERO


class TrajectoryExpander:
    """Generates the exact Taylor coefficients of the natural-time
    solution of x' = xi(x), x(0) = p, one order at a time."""

    def __init__(self, xi: VectorField, p: Sequence[GaussianRational]):
        from .polynomial import _as_gr

        self.xi = xi
        self.p = [_as_gr(v) for v in p]
        if len(self.p) != xi.n:
            raise ValueError(f"point dimension {len(self.p)} != {xi.n}")
        self.coords = [[v] for v in self.p]
        self.streams = [_Stream(c) for c in self.coords]
        self.order = 0
        self._monomial_nodes: Dict[Monomial, object] = {}

    def _node_for(self, m: Monomial):
        if sum(m) == 0:
            return _Stream([GR_ONE])
        node = self._monomial_nodes.get(m)
        if node is not None:
            return node
        i = max(range(len(m)), key=lambda j: m[j])
        rest = m[:i] + (m[i] - 1,) + m[i + 1:]
        if sum(rest) == 0:
            node = self.streams[i]
        else:
            node = _Node(self._node_for(rest), self.streams[i])
        self._monomial_nodes[m] = node
        return node

    def _component_coeff(self, i: int, k: int) -> GaussianRational:
        """Coefficient of z^k in xi_i(x(z)); needs x known to order k."""
        acc = GR_ZERO
        for m, c in self.xi.components[i].terms.items():
            v = self._node_for(m).coeff(k)
            if v:
                acc = acc + c * v
        return acc

    def extend_to(self, K: int):
        while self.order < K:
            k = self.order
            for i in range(self.xi.n):
                nxt = self._component_coeff(i, k) / (k + 1)
                self.coords[i].append(nxt)
            self.order += 1

    def poly_coeff(self, P: Polynomial, k: int) -> GaussianRational:
        """Exact coefficient of z^k in P(x(z))."""
        self.extend_to(k)
        acc = GR_ZERO
        for m, c in P.terms.items():
            v = self._node_for(m).coeff(k)
            if v:
                acc = acc + c * v
        return acc

    def series(self, K: int) -> List[Series]:
        self.extend_to(K)
        return [Series(list(c[: K + 1])) for c in self.coords]


class TrajectoryGerm:
    """Truncated exact power-series solution through a base point."""

    __slots__ = ("base", "order", "series", "field", "time_scale", "_expander")

    def __init__(self, base, order: int, series: List[Series], field: VectorField,
                 time_scale=GR_ONE, expander: Optional[TrajectoryExpander] = None):
        self.base = list(base)
        self.order = order
        self.series = series
        self.field = field
        self.time_scale = time_scale
        self._expander = expander

    def extended(self, K: int) -> "TrajectoryGerm":
        """Same germ with order at least K (recomputed if needed)."""
        if K <= self.order:
            return self
        if self._expander is None:
            raise ValueError("germ carries no expander; cannot extend")
        return TrajectoryGerm(self.base, K, self._expander.series(K), self.field,
                              self.time_scale, self._expander)

    def compose_poly(self, P: Polynomial, K: Optional[int] = None) -> Series:
        """Series of P o x to order K (defaults to the germ's order)."""
        K = self.order if K is None else K
        if self._expander is not None:
            self._expander.extend_to(K)
            return Series([self._expander.poly_coeff(P, k) for k in range(K + 1)])
        # constant germs and user-supplied series
        pieces = [s.pad(K).truncate(K) for s in self.series]
        out = Series.constant(0, K)
        for m, c in P.terms.items():
            term = Series.constant(c, K)
            for i, e in enumerate(m):
                if e:
                    term = term * pieces[i] ** e
            out = out + term
        return out

    def scale_time(self, c) -> "TrajectoryGerm":
        """Germ of x(c z), a trajectory of the field c*xi."""
        from .polynomial import _as_gr

        c = _as_gr(c)
        scaled = [s.scale_variable(c) for s in self.series]
        field = VectorField([comp * c for comp in self.field.components], self.field.names)
        return TrajectoryGerm(self.base, self.order, scaled, field,
                              self.time_scale * c, None)

    def is_constant(self) -> bool:
        return all(all(not c for c in s.coeffs[1:]) for s in self.series)

    def to_json(self) -> dict:
        return {
            "base": [gaussian_str(v) for v in self.base],
            "order": self.order,
            "time_scale": gaussian_str(self.time_scale),
            "coefficients": [[gaussian_str(c) for c in s.coeffs] for s in self.series],
        }

    def export_json(self, radius: Optional[float] = None) -> str:
        data = self.to_json()
        if radius is not None:
            data["certified_radius"] = radius
        return json.dumps(data, sort_keys=True)


def trajectory_series(xi: VectorField, p: Sequence[GaussianRational], K: int) -> TrajectoryGerm:
    """Exact Taylor expansion of the natural-time trajectory through p.

    A singular base point yields the constant germ at p."""
    from .polynomial import _as_gr

    p = [_as_gr(v) for v in p]
    if xi.is_singular_at(p):
        const = [Series([v] + [GR_ZERO] * K) for v in p]
        return TrajectoryGerm(p, K, const, xi, GR_ONE, None)
    ex = TrajectoryExpander(xi, p)
    return TrajectoryGerm(p, K, ex.series(K), xi, GR_ONE, ex)


def multiplicity(xi: VectorField, p: Sequence[GaussianRational], P: Polynomial,
                 cap: Optional[int] = None) -> Optional[int]:
    """Order of vanishing of P o x at z = 0 along the trajectory through p.

    Returns None when the order exceeds cap (the explicit multiplicity
    bound by default), which certifies that P vanishes identically on
    the orbit-closure slice."""
    from .polynomial import _as_gr

    p = [_as_gr(v) for v in p]
    if xi.is_singular_at(p):
        raise ValueError("multiplicity along a trajectory needs a nonsingular point")
    if cap is None:
        cap = morse_multiplicity_cap(xi.n, max(P.degree(), 1), max(xi.delta, 1))
    if P.is_zero():
        return None
    ex = TrajectoryExpander(xi, p)
    for k in range(cap + 2):
        if ex.poly_coeff(P, k):
            return k if k <= cap else None
    return None


# ---------------------------------------------------------------------------
# Certified convergence radius (a-posteriori Picard contraction)
# ---------------------------------------------------------------------------


def _poly_sup_on_polydisc(P: Polynomial, bounds: List[float]) -> float:
    """Upper bound for |P| on the polydisc |x_i| <= bounds[i]."""
    total = 0.0
    for m, c in P.terms.items():
        v = c.abs_float()
        for i, e in enumerate(m):
            if e:
                v *= bounds[i] ** e
        total += v
    return total * (1.0 + 1e-12)


def _series_sup_on_disc(coeffs: Sequence[GaussianRational], r: float) -> float:
    total = 0.0
    for k, c in enumerate(coeffs):
        if c:
            total += c.abs_float() * r ** k
    return total * (1.0 + 1e-12)


class ParametrizedTrajectory:
    """A germ together with a certified radius and ball evaluator.

    For |z| <= radius the true solution satisfies, componentwise,
    |x_i(z) - germ_i(z)| <= tail, with tail = 0 for components marked
    exact (their truncated series is the whole solution)."""

    __slots__ = ("germ", "radius", "tail", "exact_mask")

    def __init__(self, germ: TrajectoryGerm, radius: float, tail: float,
                 exact_mask: List[bool]):
        self.germ = germ
        self.radius = radius
        self.tail = tail
        self.exact_mask = exact_mask

    @property
    def field(self) -> VectorField:
        return self.germ.field

    def eval_ball(self, z, prec: int) -> List["ComplexBall"]:
        from .balls import ComplexBall, eval_series_ball

        if not isinstance(z, ComplexBall):
            z = ComplexBall.from_exact(z, prec)
        out = []
        for i, s in enumerate(self.germ.series):
            tail = 0.0 if self.exact_mask[i] else self.tail
            out.append(eval_series_ball(s.coeffs, z, tail))
        return out

    def eval_exact(self, z) -> Optional[List[GaussianRational]]:
        """Exact evaluation where possible: at z = 0, or anywhere if all
        components are exact polynomials.  Returns None otherwise."""
        from .polynomial import _as_gr

        z = _as_gr(z)
        if z.is_zero():
            return list(self.germ.base)
        if all(self.exact_mask):
            return [s.eval_exact(z) for s in self.germ.series]
        return None

    def to_json(self) -> dict:
        data = self.germ.to_json()
        data["certified_radius"] = self.radius
        data["tail_bound"] = self.tail
        data["exact_components"] = list(self.exact_mask)
        return data


def _exact_component_mask(xi: VectorField, germ: TrajectoryGerm) -> List[bool]:
    """Components whose series is provably the entire solution.

    A component is exact if its field equation only involves components
    already known exact (transitively, starting from none), because the
    Picard map then reproduces a polynomial of bounded degree.  The germ
    order must exceed that degree for the coefficients to have settled."""
    n = xi.n
    exact = [False] * n
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if exact[i]:
                continue
            deps = set()
            for m in xi.components[i].terms:
                for j, e in enumerate(m):
                    if e:
                        deps.add(j)
            if all(exact[j] for j in deps):
                # degree of xi_i along the (polynomial) exact components
                max_deg = 0
                for m in xi.components[i].terms:
                    deg = 0
                    for j, e in enumerate(m):
                        if e:
                            deg += e * _poly_series_degree(germ.series[j])
                    max_deg = max(max_deg, deg)
                if germ.order >= max_deg + 1:
                    exact[i] = True
                    changed = True
    return exact


def _poly_series_degree(s: Series) -> int:
    deg = 0
    for k, c in enumerate(s.coeffs):
        if c:
            deg = k
    return deg


def certify_radius(germ: TrajectoryGerm, radius: Optional[float] = None,
                   search_cap: float = 4.0) -> ParametrizedTrajectory:
    """Certify a convergence-radius lower bound for a trajectory germ.

    Uses an a-posteriori Picard contraction bound: with defect
    d = sup_{|z|<=r} |p + int xi(x_K) - x_K| and L a Lipschitz bound for
    xi on a tube around the truncated solution, the weighted-norm Picard
    operator is a 1/2-contraction and the true solution stays within
    tail = 2 d e^{2 L r} of the germ.  If no radius is requested, the
    largest certifiable dyadic radius below search_cap is found; if that
    is <= 1 the germ is rescaled in z so the returned radius exceeds 1.
    """
    if all(all(not c for c in s.coeffs[1:]) for s in germ.series):
        # constant germ: trivially certified at any radius
        mask = [True] * germ.field.n
        return ParametrizedTrajectory(germ, radius or search_cap, 0.0, mask)
    if radius is not None:
        tail, mask = _try_certify(germ, float(radius))
        if tail is None:
            raise CertificationError(f"cannot certify radius {radius}")
        return ParametrizedTrajectory(germ, float(radius), tail, mask)
    # probe the cap, then bisect
    best = None
    tail, mask = _try_certify(germ, float(search_cap))
    if tail is not None:
        best = (float(search_cap), tail, mask)
    else:
        lo, hi = 0.0, float(search_cap)
        for _ in range(18):
            mid = 0.5 * (lo + hi)
            tail, mask = _try_certify(germ, mid)
            if tail is not None:
                best = (mid, tail, mask)
                lo = mid
            else:
                hi = mid
    if best is None:
        raise CertificationError("cannot certify any positive radius")
    r, tail, mask = best
    if r > 1.0:
        return ParametrizedTrajectory(germ, r, tail, mask)
    # rescale time so the certified disc has radius > 1
    from gmpy2 import mpq

    scale = mpq(1, max(2, math.ceil(2.0 / r)))
    scaled = germ.scale_time(scale)
    new_r = r / float(scale)
    tail, mask = _try_certify(scaled, new_r)
    if tail is None:
        raise CertificationError("rescaled germ failed certification")
    return ParametrizedTrajectory(scaled, new_r, tail, mask)


def _try_certify(germ: TrajectoryGerm, r: float):
    """Attempt the contraction bound at radius r.

    Returns (tail, exact_mask) or (None, None)."""
    xi = germ.field
    n = xi.n
    if r <= 0.0:
        return None, None
    # Defect polynomial p + int xi(x_K) - x_K with x_K the truncated germ.
    # xi(x_K) is a polynomial of degree up to K*delta, so the evaluation
    # must NOT be truncated at K: the high-degree part is the defect.
    K = germ.order
    full = K * max(xi.delta, 1) + 1
    pieces = [s.pad(full) for s in germ.series]
    evals = []
    for i in range(n):
        comp = xi.components[i]
        val = Series.constant(0, full)
        for m, c in comp.terms.items():
            term = Series.constant(c, full)
            for j, e in enumerate(m):
                if e:
                    term = term * pieces[j] ** e
            val = val + term
        evals.append(val)
    defects = []
    for i in range(n):
        integ = evals[i].integrate().pad(full + 1)
        x_pad = germ.series[i].pad(full + 1)
        d_coeffs = [germ.base[i] + integ[0] - x_pad[0]] + \
                   [integ[k] - x_pad[k] for k in range(1, full + 2)]
        defects.append(Series(d_coeffs))
    defect_sup = max(_series_sup_on_disc(d.coeffs, r) for d in defects)

    exact_mask = _exact_component_mask(xi, germ)
    if all(exact_mask):
        if defect_sup == 0.0:
            return 0.0, exact_mask
        # exact detection says polynomial but defect nonzero: germ too short
        exact_mask = [False] * n

    sup_x = [_series_sup_on_disc(s.coeffs, r) for s in germ.series]
    for eps in (1e-12, 1e-9, 1e-6, 1e-3, 1e-1, 1.0):
        bounds = [sx + eps for sx in sup_x]
        L = 0.0
        for i in range(n):
            row = 0.0
            for j in range(n):
                dij = xi.components[i].diff(j)
                if not dij.is_zero():
                    row += _poly_sup_on_polydisc(dij, bounds)
            L = max(L, row)
        L = max(L, 1e-9)
        exponent = 2.0 * L * r
        if exponent > 700.0:
            continue
        tail = 2.0 * defect_sup * math.exp(exponent) * (1.0 + 1e-10)
        if tail <= eps:
            return tail, exact_mask
    return None, None
