"""Bounded-height rational points on planar projections of a
trajectory: heights, the census, minimal containing-curve degree, and
the log-growth checks for the point counts.

Census verdicts are three-valued: certified members (exact equality
established), certified non-members (no admissible rational inside the
value enclosure), and undecided (an admissible rational lies inside an
enclosure but exactness is not provable numerically).
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .dynamics import ParametrizedTrajectory
from .linalg import nullspace, rref
from .monomial import monomials_upto
from .polynomial import Polynomial, _as_gr
from .scalars import GR_ZERO, GaussianRational, gaussian_str, qq
from .series import Series
from .util import child_seed, pmap
from .zerocount import DiscFunction, IdenticallyZeroError, count_zeros, locate_zeros


def height_of(q) -> int:
    """Height of a reduced rational max(|num|, den); vectors take the
    max over components; H(0) = 1 by the usual convention."""
    if isinstance(q, (list, tuple)):
        return max(height_of(v) for v in q)
    if isinstance(q, GaussianRational):
        if q.im:
            raise ValueError("height is defined for rational values only")
        q = q.re
    q = qq(q)
    return max(abs(int(q.numerator)), int(q.denominator))


def rationals_of_height_upto(H: int, bound_abs: Optional[float] = None) -> List[mpq]:
    """All reduced rationals with height <= H, optionally restricted to
    |q| <= bound_abs; deterministic order (by denominator, then numerator)."""
    out = [mpq(0)]
    for b in range(1, H + 1):
        for a in range(1, H + 1):
            if max(a, b) <= H and math.gcd(a, b) == 1:
                v = mpq(a, b)
                if bound_abs is None or abs(float(v)) <= bound_abs + 1e-15:
                    out.append(v)
                    out.append(-v)
    return out


def simplest_rational_in_interval(lo: mpq, hi: mpq) -> Optional[mpq]:
    """The rational with minimal denominator (and among those minimal
    numerator magnitude) in [lo, hi]; None for an empty interval."""
    if lo > hi:
        return None
    if lo <= 0 <= hi:
        return mpq(0)
    if hi < 0:
        v = simplest_rational_in_interval(-hi, -lo)
        return -v if v is not None else None
    # now 0 < lo <= hi: continued-fraction walk (Stern-Brocot first hit)
    coefs = []
    a, b = mpq(lo), mpq(hi)
    while True:
        ceil_a = -((-a.numerator) // a.denominator)
        if ceil_a <= b:
            coefs.append(ceil_a)
            break
        fl = a.numerator // a.denominator
        coefs.append(fl)
        a, b = 1 / (b - fl), 1 / (a - fl)
    v = mpq(coefs[-1])
    for c in reversed(coefs[:-1]):
        v = c + 1 / v
    return v


class CensusMember:
    __slots__ = ("z", "pair", "height", "exact")

    def __init__(self, z, pair: Tuple[mpq, mpq], height: int, exact: bool):
        self.z = z
        self.pair = pair
        self.height = height
        self.exact = exact

    def to_json(self) -> dict:
        z = self.z
        if isinstance(z, GaussianRational):
            zrep = gaussian_str(z)
        else:
            zrep = {"center": [z[0].real, z[0].imag], "radius": z[1]}
        return {"z": zrep,
                "pair": [str(self.pair[0]), str(self.pair[1])],
                "height": self.height,
                "exact": self.exact}


class PointCensus:
    __slots__ = ("members", "undecided", "H", "meta")

    def __init__(self, members: List[CensusMember], undecided: List[dict],
                 H: int, meta: dict):
        self.members = members
        self.undecided = undecided
        self.H = H
        self.meta = meta

    def pairs(self) -> List[Tuple[mpq, mpq]]:
        return [m.pair for m in self.members]

    def to_json(self) -> dict:
        return {
            "H": self.H,
            "members": [m.to_json() for m in self.members],
            "undecided": self.undecided,
            "meta": self.meta,
        }


def _exact_linear_series(f: DiscFunction):
    """(a, b) with f = a*z + b exactly, or None."""
    f._prepare_eval()
    if not f._eval_full or f._eval_lip * f.trajectory.tail != 0.0:
        return None
    coeffs = f._eval_coeffs
    if any(c for c in coeffs[2:]):
        return None
    a = coeffs[1] if len(coeffs) > 1 else GR_ZERO
    if not a:
        return None
    return a, coeffs[0]


def _is_exact_poly(f: DiscFunction) -> bool:
    f._prepare_eval()
    return f._eval_full and f._eval_lip * f.trajectory.tail == 0.0


def census(phi1: DiscFunction, phi2: DiscFunction, H: int,
           precision: int = 128, threads: int = 1) -> PointCensus:
    """Certified census of rational pairs of height <= H on the image of
    (phi1, phi2) over the closed unit disc."""
    if phi1.trajectory is not phi2.trajectory:
        raise ValueError("census components must share one trajectory")
    phi1.check_not_identically_zero()
    s1 = phi1.series()
    if all(not c for c in s1.coeffs[1:]):
        raise ValueError("first census component must be nonconstant")
    lin = _exact_linear_series(phi1)
    if lin is not None:
        return _census_linear(phi1, phi2, lin, H, precision, threads)
    return _census_general(phi1, phi2, H, precision, threads)


def _census_linear(phi1, phi2, lin, H, precision, threads) -> PointCensus:
    """Fast path: phi1 = a z + b exactly, so each rational target q1 has
    the single exact preimage z = (q1 - b)/a."""
    a, b = lin
    members: List[CensusMember] = []
    undecided: List[dict] = []
    phi2._prepare_eval()
    exact2 = _is_exact_poly(phi2)
    targets = []
    for q1 in rationals_of_height_upto(H):
        z = (GaussianRational(q1) - b) / a
        if float(z.abs2()) <= 1.0 + 1e-18:
            if z.abs2() <= 1:
                targets.append((q1, z))
    # exact evaluations at z = 0 or on exact polynomial components
    pending = []
    for q1, z in targets:
        v2 = None
        if exact2:
            v2 = Series(phi2._eval_coeffs).eval_exact(z)
        elif z.is_zero():
            v2 = phi2.poly.evaluate_exact(phi2.trajectory.germ.base)
        if v2 is not None:
            if not v2.im and height_of(v2.re) <= H:
                members.append(CensusMember(z, (q1, v2.re),
                                            max(height_of(q1), height_of(v2.re)),
                                            True))
            continue
        pending.append((q1, z))
    if pending:
        real_coeffs = all(c.is_real() for c in phi2._eval_coeffs) and \
            all(z.is_real() for _, z in pending)
        if real_coeffs:
            mem2, und2 = _screen_real_batch(phi2, pending, H)
        else:
            mem2, und2 = _screen_complex(phi2, pending, H, precision)
        members.extend(mem2)
        undecided.extend(und2)
    members.sort(key=lambda m: (float(m.pair[0]), float(m.pair[1])))
    return PointCensus(members, undecided, H,
                       {"method": "linear-exact", "precision": precision})


def _screen_real_batch(phi2: DiscFunction, pending, H: int):
    """Vectorized certified screen for real exact preimages: evaluate the
    composed series with a directed-rounding float Horner, then test for
    admissible rationals inside each value interval."""
    import numpy as np

    members: List[CensusMember] = []
    undecided: List[dict] = []
    qs = np.array([float(z.re) for _, z in pending], dtype=float)
    qerr = np.abs(qs) * 2.0 ** -52 + 1e-300
    coeffs = phi2._eval_coeffs
    cf = np.array([float(c.re) for c in coeffs], dtype=float)
    cerr = np.abs(cf) * 2.0 ** -52 + 1e-300
    INFL = 1.0 + 2.0 ** -40
    mid = np.zeros_like(qs)
    rad = np.zeros_like(qs)
    for k in range(len(coeffs) - 1, -1, -1):
        new_mid = mid * qs + cf[k]
        rad = (rad * (np.abs(qs) + qerr) + np.abs(mid) * qerr + cerr[k]
               + np.abs(new_mid) * 2.0 ** -51) * INFL + 1e-300
        mid = new_mid
    tail = phi2.eval_tail(1.0)
    rad = (rad + tail) * INFL + 1e-300
    for i, (q1, z) in enumerate(pending):
        cand = Fraction(float(mid[i])).limit_denominator(H)
        dist = abs(Fraction(float(mid[i])) - cand)
        if dist > Fraction(float(rad[i])) * 2:
            continue  # certified out: nearest admissible rational too far
        # escalate: exact interval around the exact truncated value
        v = Series(coeffs).eval_exact(z)
        tau = _float_up_mpq(tail)
        lo, hi = v.re - tau, v.re + tau
        r2 = simplest_rational_in_interval(lo, hi)
        if r2 is None or height_of(r2) > H:
            continue
        if tau == 0 and lo == hi:
            if height_of(r2) <= H:
                members.append(CensusMember(z, (q1, r2),
                                            max(height_of(q1), height_of(r2)), True))
            continue
        undecided.append({"q1": str(q1), "candidate": str(r2),
                          "interval_width": float(hi - lo)})
    return members, undecided


def _float_up_mpq(x: float) -> mpq:
    return mpq(Fraction(x * (1.0 + 2.0 ** -40) + 2.0 ** -1000))


def _screen_complex(phi2: DiscFunction, pending, H: int, precision: int):
    """Per-candidate certified screen via ball evaluation."""
    members: List[CensusMember] = []
    undecided: List[dict] = []
    for q1, z in pending:
        ball = phi2.eval_ball(z, precision)
        out = _classify_ball_value(ball, H)
        if out is None:
            continue
        undecided.append({"q1": str(q1), "candidate": str(out),
                          "interval_width": 2.0 * ball.rad})
    return members, undecided


def _classify_ball_value(ball, H: int) -> Optional[mpq]:
    """Admissible rational inside the ball, or None when provably none."""
    z = ball.to_complex()
    if abs(z.imag) > ball.rad * (1 + 1e-9) + 1e-300:
        im_lo = abs(z.imag) - ball.rad
        if im_lo > 0:
            return None
    lo = mpq(Fraction(z.real)) - _float_up_mpq(ball.rad)
    hi = mpq(Fraction(z.real)) + _float_up_mpq(ball.rad)
    r2 = simplest_rational_in_interval(lo, hi)
    if r2 is None or height_of(r2) > H:
        return None
    return r2


def _census_general(phi1, phi2, H, precision, threads) -> PointCensus:
    """Fallback: solve phi1(z) = q1 by counting and locating zeros, then
    screen phi2 on each certified enclosure."""
    members: List[CensusMember] = []
    undecided: List[dict] = []
    exact_poly1 = _is_exact_poly(phi1)
    s1 = Series(phi1._eval_coeffs) if exact_poly1 else None

    def handle(q1):
        local_members, local_und = [], []
        target = phi1.poly - Polynomial.constant(phi1.poly.n, GaussianRational(q1),
                                                 phi1.poly.names)
        f = DiscFunction(phi1.trajectory, target,
                         max_compose_order=phi1.max_compose_order)
        try:
            res = count_zeros(f, precision)
        except IdenticallyZeroError:
            return local_members, local_und
        if res.count == 0:
            return local_members, local_und
        if exact_poly1:
            # try exact rational roots first
            remaining = res.count
            for cand in _exact_roots_in_disc(s1, q1, H * H * 4):
                v2 = None
                if _is_exact_poly(phi2):
                    v2 = Series(phi2._eval_coeffs).eval_exact(cand)
                elif cand.is_zero():
                    v2 = phi2.poly.evaluate_exact(phi2.trajectory.germ.base)
                if v2 is not None and not v2.im and height_of(v2.re) <= H:
                    local_members.append(
                        CensusMember(cand, (q1, v2.re),
                                     max(height_of(q1), height_of(v2.re)), True))
                remaining -= 1
            if remaining <= 0:
                return local_members, local_und
        try:
            encl = locate_zeros(f, res.count, precision)
        except Exception:
            local_und.append({"q1": str(q1), "candidate": None,
                              "reason": "zero localization failed"})
            return local_members, local_und
        for center, rad in encl:
            zb = phi2.eval_ball(_center_ball(center, rad, precision), precision)
            r2 = _classify_ball_value(zb, H)
            if r2 is not None:
                local_und.append({"q1": str(q1), "candidate": str(r2),
                                  "z_center": [center.real, center.imag],
                                  "z_radius": rad})
        return local_members, local_und

    q1s = rationals_of_height_upto(H)
    results = pmap(handle, q1s, threads)
    for mem, und in results:
        members.extend(mem)
        undecided.extend(und)
    members.sort(key=lambda m: (float(m.pair[0]), float(m.pair[1])))
    return PointCensus(members, undecided, H,
                       {"method": "subdivision", "precision": precision})


def _center_ball(center: complex, rad: float, prec: int):
    from .balls import ComplexBall, FloatBall
    import mpmath

    if prec <= 53:
        return FloatBall(center, rad)
    with mpmath.workprec(prec):
        mid = mpmath.mpc(center.real, center.imag)
    return ComplexBall(mid, rad, prec)


def _exact_roots_in_disc(s: Series, q1: mpq, denom_bound: int) -> List[GaussianRational]:
    """Exact rational roots of the polynomial s(z) = q1 inside the closed
    unit disc (numeric roots snapped and verified exactly)."""
    import numpy as np

    coeffs = list(s.coeffs)
    coeffs[0] = coeffs[0] - GaussianRational(q1)
    cf = [c.to_complex() for c in coeffs]
    while cf and abs(cf[-1]) == 0.0:
        cf.pop()
    if len(cf) <= 1:
        return []
    roots = np.roots(list(reversed(cf)))
    out = []
    seen = set()
    for r in roots:
        if abs(r) > 1.0 + 1e-9:
            continue
        re = Fraction(float(r.real)).limit_denominator(denom_bound)
        im = Fraction(float(r.imag)).limit_denominator(denom_bound)
        cand = GaussianRational(mpq(re.numerator, re.denominator),
                                mpq(im.numerator, im.denominator))
        key = (cand.re, cand.im)
        if key in seen:
            continue
        seen.add(key)
        val = Series(coeffs).eval_exact(cand)
        if val.is_zero() and float(cand.abs2()) <= 1.0 and cand.abs2() <= 1:
            out.append(cand)
    return out


# ---------------------------------------------------------------------------
# Minimal containing-curve degree and the growth checks
# ---------------------------------------------------------------------------


def minimal_curve_degree(S: Sequence[Tuple], names=("x", "y")) -> Tuple[int, Polynomial]:
    """Smallest d such that some nonzero curve of degree <= d passes
    through every point of S, plus one kernel curve."""
    if not S:
        raise ValueError("need at least one point")
    pts = [[_as_gr(x), _as_gr(y)] for (x, y) in S]
    d = 0
    while True:
        d += 1
        monos = monomials_upto(2, d)
        rows = []
        for p in pts:
            row = []
            for m in monos:
                v = Polynomial(2, {m: _as_gr(1)}).evaluate_exact(p)
                row.append(v)
            rows.append(row)
        kernel = nullspace(rows, len(monos))
        if kernel:
            vec = kernel[0]
            curve = Polynomial(2, {m: c for m, c in zip(monos, vec) if c}, tuple(names))
            return d, curve


def masser_check(phi1: DiscFunction, phi2: DiscFunction, H_sweep: Sequence[int],
                 precision: int = 128, threads: int = 1) -> dict:
    """Minimal containing-curve degree of the census members against the
    log H envelope; emits the per-H table and the fitted constant."""
    rows = []
    fitted = 0.0
    for H in H_sweep:
        c = census(phi1, phi2, H, precision, threads)
        pairs = c.pairs()
        if pairs:
            w, curve = minimal_curve_degree(pairs)
            curve_str = str(curve)
        else:
            w, curve_str = 0, None
        fit = w / math.log(H) if H >= 2 else 0.0
        fitted = max(fitted, fit)
        rows.append({"H": H, "members": len(pairs), "undecided": len(c.undecided),
                     "w": w, "curve": curve_str, "fit": fit})
    return {"rows": rows, "fitted_c": fitted}


def density_check(phi1: DiscFunction, phi2: DiscFunction, H_sweep: Sequence[int],
                  kappa: int, m: int, precision: int = 128,
                  curve_cutoff: int = 8, samples: int = 40,
                  threads: int = 1) -> dict:
    """Census counts against the polylog envelope
    log^(2 kappa (m+1)) H * loglog H.

    The not-contained-in-a-curve hypothesis is tested heuristically on a
    numeric sample up to the cutoff degree; algebraic images are rejected."""
    contained, wdeg = _image_in_curve_heuristic(phi1, phi2, curve_cutoff, samples)
    if contained:
        raise ValueError(
            f"image appears to lie on an algebraic curve of degree {wdeg}; "
            "the density hypothesis fails")
    exponent = 2 * kappa * (m + 1)
    rows = []
    fitted = 0.0
    for H in H_sweep:
        c = census(phi1, phi2, H, precision, threads)
        N = len(c.members)
        env = (math.log(H) ** exponent) * math.log(max(math.log(H), math.e))
        fit = N / env if env > 0 else 0.0
        fitted = max(fitted, fit)
        rows.append({"H": H, "N": N, "undecided": len(c.undecided),
                     "envelope": env, "fit": fit})
    return {"rows": rows, "fitted_c": fitted, "exponent": exponent,
            "curve_check_degree": curve_cutoff, "curve_check": "heuristic-numeric"}


def _image_in_curve_heuristic(phi1, phi2, cutoff: int, samples: int):
    """Exact-rank containment test on exact samples of the truncated
    compositions.  Truncation makes this a heuristic for the true image,
    but it is immune to the numeric floor of least-squares fits (which
    would flag transcendental images approximated well by low degrees)."""
    phi1._prepare_eval()
    phi2._prepare_eval()
    s1 = Series(phi1._eval_coeffs)
    s2 = Series(phi2._eval_coeffs)
    monos = monomials_upto(2, cutoff)
    count = max(samples, len(monos) + 6)
    zs = [mpq(2 * j - count, count + 3) for j in range(count)]
    pts = [(s1.eval_exact(z), s2.eval_exact(z)) for z in zs]
    for d in range(1, cutoff + 1):
        monos = monomials_upto(2, d)
        rows = []
        for (x, y) in pts:
            xp = [GaussianRational(1)]
            yp = [GaussianRational(1)]
            for _ in range(d):
                xp.append(xp[-1] * x)
                yp.append(yp[-1] * y)
            rows.append([xp[mi] * yp[mj] for (mi, mj) in monos])
        if nullspace(rows, len(monos)):
            return True, d
    return False, None
