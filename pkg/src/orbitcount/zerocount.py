"""Certified zero counting on the closed unit disc via the argument
principle, the Jensen-type growth bound, and the polynomial-degree
growth harness.

The winding computation subdivides the contour into arcs whose image
balls exclude zero; the argument increment across each such arc equals
the principal angle between its endpoint values, so the total winding
is exact up to a rigorously bounded (tiny) float error.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from typing import List, Optional, Sequence, Tuple

from .balls import (ComplexBall, FloatBall, ball_arc, ball_point_on_circle,
                    eval_series_ball)
from .dynamics import CertificationError, ParametrizedTrajectory, VectorField
from .monomial import monomials_upto
from .polynomial import Polynomial, _as_gr
from .scalars import GR_ZERO, GaussianRational
from .series import Series
from .util import child_seed, pmap


class IdenticallyZeroError(ValueError):
    """The disc function is (or cannot be told apart from) zero."""


class DiscFunction:
    """P composed with a certified trajectory, evaluable on |z| <= radius.

    Evaluation composes the polynomial with the truncated germ exactly
    (so coefficient cancellations happen in exact arithmetic) and adds
    two rigorous error terms: the trajectory tail propagated through a
    Lipschitz bound for P, and a Cauchy bound for the composed-series
    coefficients dropped beyond the compose order."""

    __slots__ = ("trajectory", "poly", "radius", "_series_cache",
                 "max_compose_order", "_eval_coeffs", "_eval_B", "_eval_lip",
                 "_eval_full", "_ball_cache")

    def __init__(self, trajectory: ParametrizedTrajectory, poly: Polynomial,
                 radius: Optional[float] = None, max_compose_order: int = 160):
        self.trajectory = trajectory
        self.poly = poly
        self.radius = float(radius) if radius is not None else trajectory.radius
        if self.radius > trajectory.radius:
            raise ValueError("disc radius exceeds the certified trajectory radius")
        self.max_compose_order = max_compose_order
        self._series_cache: Optional[Series] = None
        self._eval_coeffs = None
        self._ball_cache = {}

    def series(self, K: Optional[int] = None) -> Series:
        """Exact truncated series of P o x (no tail information)."""
        if K is None or K <= self.trajectory.germ.order:
            if self._series_cache is None:
                self._series_cache = self.trajectory.germ.compose_poly(self.poly)
            if K is None:
                return self._series_cache
            return self._series_cache.truncate(K)
        germ = self.trajectory.germ.extended(K)
        return germ.compose_poly(self.poly, K)

    def _prepare_eval(self):
        """Composed polynomial coefficients plus tail-bound ingredients."""
        from .dynamics import _poly_sup_on_polydisc, _series_sup_on_disc

        if self._eval_coeffs is not None:
            return
        traj = self.trajectory
        germ = traj.germ
        K = germ.order
        d = max(self.poly.degree(), 0)
        full_deg = K * max(d, 1)
        M = min(full_deg, self.max_compose_order)
        self._eval_full = M >= full_deg
        pieces = [s.pad(M) for s in germ.series]
        out = Series.constant(0, M)
        power_cache = {}

        def piece_power(i, e):
            key = (i, e)
            v = power_cache.get(key)
            if v is None:
                v = pieces[i] if e == 1 else piece_power(i, e - 1) * pieces[i]
                power_cache[key] = v
            return v

        for m, c in self.poly.terms.items():
            term = Series.constant(c, M)
            for i, e in enumerate(m):
                if e:
                    term = term * piece_power(i, e)
            out = out + term
        self._eval_coeffs = out.coeffs
        R = traj.radius
        sups = [_series_sup_on_disc(s.coeffs, R) + traj.tail for s in germ.series]
        # Lipschitz constant of P on the product box; exact components
        # contribute no trajectory error, so they are skipped
        lip = 0.0
        for i in range(self.poly.n):
            if traj.exact_mask[i]:
                continue
            dPi = self.poly.diff(i)
            if not dPi.is_zero():
                lip += _poly_sup_on_polydisc(dPi, sups)
        self._eval_lip = lip
        self._eval_B = _poly_sup_on_polydisc(self.poly, sups) if not self._eval_full else 0.0

    def eval_tail(self, z_abs_upper: float) -> float:
        """Rigorous bound for |f(z) - composed_poly(z)| when |z| <= the
        given value (which must stay below the trajectory radius)."""
        self._prepare_eval()
        traj = self.trajectory
        tail = self._eval_lip * traj.tail
        if not self._eval_full:
            R = traj.radius
            ratio = z_abs_upper / R
            if ratio >= 1.0:
                raise ValueError("evaluation point outside the certified disc")
            M = len(self._eval_coeffs) - 1
            tail += self._eval_B * ratio ** (M + 1) / (1.0 - ratio) * (1 + 1e-12)
        return tail * (1 + 1e-12) + 2.0 ** -1000

    def _coeff_balls(self, prec: int):
        cached = self._ball_cache.get(prec)
        if cached is None:
            if prec <= 53:
                cached = [FloatBall.from_exact(c) for c in self._eval_coeffs]
            else:
                cached = [ComplexBall.from_exact(c, prec) for c in self._eval_coeffs]
            self._ball_cache[prec] = cached
        return cached

    def _deriv_balls(self, prec: int):
        key = ("deriv", prec)
        cached = self._ball_cache.get(key)
        if cached is None:
            derivs = [c * (k + 1) for k, c in enumerate(self._eval_coeffs[1:])]
            if prec <= 53:
                cached = [FloatBall.from_exact(c) for c in derivs]
            else:
                cached = [ComplexBall.from_exact(c, prec) for c in derivs]
            self._ball_cache[key] = cached
        return cached

    def eval_arc(self, radius: float, t0: float, t1: float, prec: int,
                 center: complex = 0j):
        """Enclosure of f on the arc center + radius*e^{it}, t in [t0, t1],
        via the centered first-order form f(midpoint) + chord * sup |f'|
        (much tighter than interval Horner on oscillatory series)."""
        self._prepare_eval()
        tc = 0.5 * (t0 + t1)
        half = 0.5 * (t1 - t0)
        center_val = self.eval_ball(
            _shift_ball(ball_point_on_circle(radius, tc, prec), center), prec)
        zball = _shift_ball(ball_arc(radius, t0, t1, prec), center)
        rho = zball.abs_upper()
        R2 = 0.5 * (rho + self.trajectory.radius)
        if not rho < R2:
            return self.eval_ball(zball, prec)
        # |d/dz of the evaluation error| via a Cauchy estimate at R2
        err_deriv = self.eval_tail(R2) / ((R2 - rho) * (1 - 1e-12))
        dcoeffs = self._deriv_balls(prec if prec > 53 else 53)
        if not dcoeffs:
            return center_val.widened(float(radius) * half * err_deriv * (1 + 1e-12))
        acc = dcoeffs[0].exact_zero(getattr(zball, "prec", 53))
        for c in reversed(dcoeffs):
            acc = acc * zball + c
        dsup = acc.abs_upper() + err_deriv
        chord = float(radius) * half * (1 + 1e-12)
        return center_val.widened(chord * dsup)

    def eval_ball(self, z, prec: int = 128):
        self._prepare_eval()
        if isinstance(z, ComplexBall):
            use_float = False
            prec = z.prec
        elif isinstance(z, FloatBall):
            use_float = True
        else:
            use_float = prec <= 53
            z = FloatBall.from_exact(z) if use_float else ComplexBall.from_exact(z, prec)
        zhi = z.abs_upper()
        tail = self.eval_tail(zhi)
        if use_float:
            coeffs = self._coeff_balls(53)
            acc = FloatBall.exact_zero()
        else:
            coeffs = self._coeff_balls(prec)
            acc = ComplexBall.exact_zero(prec)
        for c in reversed(coeffs):
            acc = acc * z + c
        if tail:
            acc = acc.widened(tail)
        return acc

    def check_not_identically_zero(self):
        s = self.series()
        if s.valuation() is None:
            raise IdenticallyZeroError(
                "series truncation of the disc function vanishes; "
                "cannot certify a nonzero function")


class CountResult:
    __slots__ = ("count", "certified", "radius_used", "precision")

    def __init__(self, count: int, certified: bool, radius_used: float, precision: int):
        self.count = count
        self.certified = certified
        self.radius_used = radius_used
        self.precision = precision

    def __repr__(self):
        return (f"CountResult(count={self.count}, certified={self.certified}, "
                f"radius={self.radius_used}, prec={self.precision})")

    def to_json(self) -> dict:
        return {"count": self.count, "certified": self.certified,
                "radius_used": self.radius_used, "precision": self.precision}


def _winding_number(point_fn, arc_fn, max_arcs: int = 8192) -> Optional[int]:
    """Certified winding number of an analytic function around a circle.

    point_fn(t) must return a value ball at angle t; arc_fn(t0, t1) an
    enclosure of the values on the whole arc.  Returns None if zero-free
    arcs cannot be established within the subdivision budget."""
    two_pi = 2.0 * math.pi
    arcs: List[Tuple[float, float]] = [(two_pi * k / 16.0, two_pi * (k + 1) / 16.0)
                                       for k in range(16)]
    good: List[Tuple[float, float]] = []
    while arcs:
        if len(arcs) + len(good) > max_arcs:
            return None
        t0, t1 = arcs.pop()
        ball = arc_fn(t0, t1)
        lo = ball.abs_lower()
        if lo > 0.0 and ball.rad <= 0.8 * lo:
            good.append((t0, t1))
            continue
        tm = 0.5 * (t0 + t1)
        if tm == t0 or tm == t1:
            return None
        arcs.append((t0, tm))
        arcs.append((tm, t1))
    good.sort()
    total = 0.0
    err = 0.0
    prev_val = None
    first_val = None
    for (t0, t1) in good:
        v = point_fn(t0)
        if v.contains_zero():
            return None
        if prev_val is not None:
            d, e = _principal_angle(prev_val, v)
            total += d
            err += e
        else:
            first_val = v
        prev_val = v
    d, e = _principal_angle(prev_val, first_val)
    total += d
    err += e + 1e-9 * len(good)
    if err >= 1.5:
        return None
    w = total / two_pi
    rounded = round(w)
    if abs(w - rounded) * two_pi + err >= 3.0:
        return None
    return int(rounded)


def _principal_angle(a: ComplexBall, b: ComplexBall) -> Tuple[float, float]:
    """Principal argument difference arg(b) - arg(a) and an error bound."""
    za, zb = a.to_complex(), b.to_complex()
    d = math.atan2((zb * za.conjugate()).imag, (zb * za.conjugate()).real)
    return d, a.arg_halfwidth() + b.arg_halfwidth() + 1e-12


def count_zeros(f: DiscFunction, precision: int = 128,
                radius: float = 1.0, max_precision: int = 4096) -> CountResult:
    """Zeros of f (with multiplicity) in the closed disc of the given
    counting radius, certified by the argument principle.

    If a zero sits on the contour at the working precision, the counting
    radius is dilated slightly inside (radius, f.radius); the radius
    actually used is reported."""
    f.check_not_identically_zero()
    if not radius < f.radius:
        raise ValueError("counting radius must be below the evaluable radius")
    prec = precision
    while prec <= max_precision:
        rad = radius
        for bump in range(8):
            w = _winding_number(
                lambda t, _r=rad: f.eval_ball(ball_point_on_circle(_r, t, prec), prec),
                lambda t0, t1, _r=rad: f.eval_arc(_r, t0, t1, prec))
            if w is not None:
                return CountResult(w, True, rad, prec)
            room = f.radius - radius
            rad = radius + room * (0.5 ** (6 - 0.7 * bump)) if room > 0 else radius
            if rad >= f.radius:
                break
        prec *= 2
    raise CertificationError(
        f"contour certification failed up to precision {max_precision}")


# ---------------------------------------------------------------------------
# Jensen-type bound
# ---------------------------------------------------------------------------


def _circle_max_upper(f: DiscFunction, radius: float, prec: int,
                      arcs: int = 64, refine: int = 2) -> float:
    """Certified upper bound for max |f| on the circle."""
    two_pi = 2.0 * math.pi
    segs = [(two_pi * k / arcs, two_pi * (k + 1) / arcs) for k in range(arcs)]
    for _ in range(refine + 1):
        vals = [(f.eval_ball(ball_arc(radius, t0, t1, prec), prec).abs_upper(), t0, t1)
                for (t0, t1) in segs]
        vals.sort(reverse=True)
        if _ == refine:
            return vals[0][0]
        keep = vals[: max(4, arcs // 8)]
        segs = []
        for _v, t0, t1 in keep:
            tm = 0.5 * (t0 + t1)
            segs.extend([(t0, tm), (tm, t1)])
    return vals[0][0]


def _circle_max_lower(f: DiscFunction, radius: float, prec: int,
                      samples: int = 128) -> float:
    """Certified lower bound for max |f| on the circle (point samples)."""
    two_pi = 2.0 * math.pi
    best = 0.0
    for k in range(samples):
        t = two_pi * k / samples
        v = f.eval_ball(ball_point_on_circle(radius, t, prec), prec)
        best = max(best, v.abs_lower())
    return best


def jensen_bound(f: DiscFunction, r: Optional[float] = None,
                 precision: int = 128) -> float:
    """Growth-ratio bound on the number of zeros in the closed unit disc:
    C_r log(M/m) with M the max on |z| <= r, m the max on |z| <= 1 and
    C_r = 1/log((1+r)/2) from centering at an interior maximizer.

    Upper bound for M, lower bound for m, so the result is a valid upper
    envelope whenever the counting succeeds."""
    r = f.radius if r is None else float(r)
    if not r > 1.0:
        raise ValueError("jensen bound needs an outer radius above 1")
    s = f.series()
    if s.valuation() is None:
        raise IdenticallyZeroError("cannot bound zeros of the zero function")
    f._prepare_eval()
    if all(not c for c in f._eval_coeffs[1:]) and f._eval_full and \
            f._eval_lip * f.trajectory.tail == 0.0:
        return 0.0  # provably constant on the disc
    prec = precision
    for _ in range(6):
        M = _circle_max_upper(f, r, prec)
        m = _circle_max_lower(f, 1.0, prec)
        if m > 0.0:
            Cr = 1.0 / math.log((1.0 + r) / 2.0)
            return Cr * max(math.log(M / m), 0.0)
        prec *= 2
    raise CertificationError("max on the unit circle could not be bounded away from 0")


# ---------------------------------------------------------------------------
# Root localization cross-check
# ---------------------------------------------------------------------------


def locate_zeros(f: DiscFunction, expected: int, precision: int = 128,
                 radius: float = 1.0) -> List[Tuple[complex, float]]:
    """Locate the zeros counted by count_zeros: disjoint certified
    enclosures, each holding exactly one zero (with multiplicity).

    Returns (center, radius) discs whose winding numbers sum to expected."""
    if expected == 0:
        return []
    s = f.series(max(f.trajectory.germ.order, 24))
    import numpy as np

    coeffs = [c.to_complex() for c in s.coeffs]
    while coeffs and abs(coeffs[-1]) == 0.0:
        coeffs.pop()
    roots = np.roots(list(reversed(coeffs))) if len(coeffs) > 1 else []
    cands = [complex(z) for z in roots if abs(z) <= radius + 0.2]
    # cluster candidates, then certify each cluster with a small circle
    clusters: List[List[complex]] = []
    for z in sorted(cands, key=lambda w: (w.real, w.imag)):
        for cl in clusters:
            if abs(cl[0] - z) < 1e-4:
                cl.append(z)
                break
        else:
            clusters.append([z])
    enclosures = []
    found = 0
    for cl in clusters:
        center = sum(cl) / len(cl)
        for rad in (1e-3, 1e-2, 5e-2):
            w = _winding_number(
                lambda t, _r=rad: f.eval_ball(
                    _shift_ball(ball_point_on_circle(_r, t, precision), center),
                    precision),
                lambda t0, t1, _r=rad: f.eval_arc(_r, t0, t1, precision, center),
                max_arcs=512)
            if w:
                enclosures.append((center, rad))
                found += w
                break
    if found != expected:
        raise CertificationError(
            f"located {found} zeros, expected {expected}")
    return enclosures


def _shift_ball(zb, center: complex):
    if isinstance(zb, FloatBall):
        return FloatBall(zb.mid + center, zb.rad * (1 + 1e-12) + 1e-290)
    import mpmath

    with mpmath.workprec(zb.prec):
        mid = zb.mid + mpmath.mpc(center.real, center.imag)
    return ComplexBall(mid, zb.rad * (1 + 1e-12) + 1e-290, zb.prec)


# ---------------------------------------------------------------------------
# Degree-growth harness
# ---------------------------------------------------------------------------


def random_polynomial(n: int, degree: int, rng: random.Random,
                      names=None, coeff_bound: int = 9) -> Polynomial:
    """Random polynomial of exact degree <= degree with nonzero top part."""
    monos = monomials_upto(n, degree)
    while True:
        terms = {}
        for m in monos:
            c = rng.randint(-coeff_bound, coeff_bound)
            if c:
                terms[m] = _as_gr(c)
        P = Polynomial(n, terms, names)
        if not P.is_zero():
            return P


class GrowthTable:
    __slots__ = ("rows", "kappa", "m", "fitted_c", "seed")

    def __init__(self, rows: List[dict], kappa: int, m: int, fitted_c: float, seed: int):
        self.rows = rows
        self.kappa = kappa
        self.m = m
        self.fitted_c = fitted_c
        self.seed = seed

    def to_json(self) -> dict:
        return {"rows": self.rows, "kappa": self.kappa, "m": self.m,
                "fitted_c": self.fitted_c, "seed": self.seed}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "samples", "maxCount", "envelope", "fittedC"])
        for row in self.rows:
            w.writerow([row["d"], row["samples"], row["max_count"],
                        row["envelope"], row["fitted_c"]])
        return buf.getvalue()


def main_theorem_harness(xi: VectorField, trajectory: ParametrizedTrajectory,
                         degrees: Sequence[int], samples_per_degree: int,
                         seed: int, precision: int = 128,
                         threads: int = 1, max_compose_order: int = 100) -> GrowthTable:
    """Empirical growth of the max zero count against the polynomial
    envelope d^(2 kappa (m+1)) log d; kappa is read off the leading
    diagram at the base point and m is the ambient dimension."""
    from .orbitideal import ideal_slice, leading_diagram

    if not trajectory.radius > 1.0:
        raise ValueError("growth harness needs a certified radius above 1")
    base = trajectory.germ.base
    sl = ideal_slice(xi, base, 2)
    kappa = max(leading_diagram(sl).kappa, 1)
    m = xi.n
    rows = []
    fitted = 0.0
    for d in degrees:
        def one_sample(i, _d=d):
            rng = random.Random(child_seed(seed, _d * 1_000 + i))
            P = random_polynomial(xi.n, _d, rng, xi.names)
            f = DiscFunction(trajectory, P, max_compose_order=max_compose_order)
            try:
                res = count_zeros(f, precision)
                return res.count
            except IdenticallyZeroError:
                return 0
        counts = pmap(lambda i: one_sample(i), list(range(samples_per_degree)),
                      threads)
        max_count = max(counts) if counts else 0
        envelope = (d ** (2 * kappa * (m + 1))) * math.log(d) if d >= 2 else 0.0
        fit = (max_count / envelope) if envelope > 0 else 0.0
        fitted = max(fitted, fit)
        rows.append({"d": d, "samples": samples_per_degree,
                     "max_count": max_count, "envelope": envelope,
                     "fitted_c": fit})
    return GrowthTable(rows, kappa, m, fitted, seed)
