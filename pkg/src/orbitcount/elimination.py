"""Elimination matrices of iterated trajectory derivatives, their top
minors, derivative lower-bound certificates, and the empirical
projective Lojasiewicz inequality checker.

The elimination matrix for a diagram and degree d has one row per
staircase monomial of degree <= d and columns 0..mu holding the
iterated Lie derivatives.  A nonzero top minor at a point certifies a
lower bound on the largest trajectory derivative of every polynomial
supported on the staircase.
"""

from __future__ import annotations

import json
import math
import random
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

from .balls import ComplexBall, eval_poly_ball
from .dynamics import VectorField, iterated_lie, morse_multiplicity_cap
from .linalg import det_exact, nullspace, rref
from .monomial import Monomial, mdeg
from .orbitideal import (IdealSlice, MonomialDiagram, ideal_slice,
                         leading_diagram, staircase_division)
from .polynomial import Polynomial, _as_gr, l2_norm
from .scalars import GR_ONE, GR_ZERO, GaussianRational, gaussian_str


EXHAUSTIVE_CAP = 10_000


class PipelineError(RuntimeError):
    """The lower-bound pipeline hit a degenerate configuration."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class EliminationMatrix:
    __slots__ = ("diagram", "degree", "mu", "rows", "entries", "field")

    def __init__(self, diagram: MonomialDiagram, degree: int, mu: int,
                 rows: List[Monomial], entries: List[List[Polynomial]],
                 field: VectorField):
        self.diagram = diagram
        self.degree = degree
        self.mu = mu
        self.rows = rows
        self.entries = entries
        self.field = field

    @property
    def rho(self) -> int:
        return len(self.rows)

    def evaluate_exact(self, p: Sequence[GaussianRational]) -> List[List[GaussianRational]]:
        return [[e.evaluate_exact(p) for e in row] for row in self.entries]

    def evaluate_ball(self, p: Sequence[ComplexBall]) -> List[List[ComplexBall]]:
        return [[eval_poly_ball(e, list(p)) for e in row] for row in self.entries]

    def entry_profile(self) -> dict:
        """Max degree and height over entries (for envelope checks)."""
        from .polynomial import height

        degs, heights = [], []
        for row in self.entries:
            for e in row:
                if not e.is_zero():
                    degs.append(e.degree())
                    heights.append(height(e))
        return {"max_degree": max(degs, default=0),
                "max_height": max(heights, default=0.0)}


def build_elimination_matrix(xi: VectorField, diagram: MonomialDiagram,
                             d: int, mu: int) -> EliminationMatrix:
    """Rows are staircase monomials of degree <= d; entry (alpha, k) is
    the exact polynomial xi^k x^alpha."""
    rows = diagram.staircase(d)
    rho = len(rows)
    # mu + 1 columns must strictly exceed the rho rows so that the top
    # minors overdetermine the kernel condition
    if mu < rho:
        raise ValueError(f"mu = {mu} must be at least the staircase count rho = {rho}")
    entries = []
    for m in rows:
        base = Polynomial(xi.n, {m: GR_ONE}, xi.names)
        entries.append(iterated_lie(xi, base, mu))
    return EliminationMatrix(diagram, d, mu, rows, entries, xi)


class MinorCertificate:
    """A nonzero top minor at a point."""

    __slots__ = ("columns", "value", "point", "best_index", "strategy")

    def __init__(self, columns: Tuple[int, ...], value, point, strategy: str):
        self.columns = columns
        self.value = value
        self.point = point
        self.best_index: Optional[int] = None
        self.strategy = strategy

    def abs_value(self) -> float:
        if isinstance(self.value, ComplexBall):
            return self.value.abs_lower()
        return self.value.abs_float()

    def to_json(self) -> str:
        val = (gaussian_str(self.value) if isinstance(self.value, GaussianRational)
               else repr(self.value))
        return json.dumps({
            "columns": list(self.columns),
            "value": val,
            "abs_value": self.abs_value(),
            "best_index": self.best_index,
            "strategy": self.strategy,
        }, sort_keys=True)


ALL_ZERO = "all zero"
INDETERMINATE = "indeterminate"


def max_minor_at_point(matrix: EliminationMatrix, p, strategy: str = "auto",
                       seed: int = 0, exhaustive_cap: int = EXHAUSTIVE_CAP):
    """Largest top minor of the matrix evaluated at p.

    Exact points allow the certified "all zero" verdict (returned with a
    kernel witness polynomial); balls can only certify a nonzero minor,
    so a rank-deficient ball evaluation returns "indeterminate".
    """
    ball_mode = any(isinstance(v, ComplexBall) for v in p)
    if ball_mode:
        values = matrix.evaluate_ball(list(p))
        return _max_minor_ball(matrix, values, p, strategy, seed, exhaustive_cap)
    p = [_as_gr(v) for v in p]
    values = matrix.evaluate_exact(p)
    rho = matrix.rho
    # certified rank test decides the "all minors vanish" verdict
    kernel = nullspace([list(col) for col in zip(*values)], rho)
    if kernel:
        vec = kernel[0]
        witness = Polynomial(matrix.field.n,
                             {m: c for m, c in zip(matrix.rows, vec) if c},
                             matrix.field.names)
        return ALL_ZERO, witness
    ncols = matrix.mu + 1
    n_minors = math.comb(ncols, rho)
    if strategy == "exhaustive" or (strategy == "auto" and n_minors <= exhaustive_cap):
        best_cols, best_val = None, None
        best_abs2 = None
        for cols in combinations(range(ncols), rho):
            sub = [[values[r][c] for c in cols] for r in range(rho)]
            det = det_exact(sub)
            a2 = det.abs2()
            if best_abs2 is None or a2 > best_abs2:
                best_abs2, best_cols, best_val = a2, cols, det
        if not best_abs2:
            return ALL_ZERO, None
        cert = MinorCertificate(tuple(best_cols), best_val, list(p), "exhaustive")
        return cert, None
    cols, det = _greedy_minor(values, rho, ncols, seed)
    cert = MinorCertificate(tuple(cols), det, list(p), "greedy")
    return cert, None


def _greedy_minor(values, rho: int, ncols: int, seed: int,
                  restarts: int = 4):
    """Rank-revealing greedy column selection with seeded restarts.

    Columns are chosen by modified Gram-Schmidt on float shadows; the
    winning subset's determinant is recomputed exactly."""
    cols_float = [[complex(values[r][c].to_complex()) for r in range(rho)]
                  for c in range(ncols)]
    rng = random.Random(seed)
    best = None
    for attempt in range(restarts):
        jitter = [0.0] * ncols if attempt == 0 else \
            [rng.uniform(0.0, 1e-9) for _ in range(ncols)]
        chosen: List[int] = []
        basis: List[List[complex]] = []
        for _ in range(rho):
            best_c, best_norm = None, -1.0
            for c in range(ncols):
                if c in chosen:
                    continue
                v = list(cols_float[c])
                for b in basis:
                    dot = sum(x * y.conjugate() for x, y in zip(v, b))
                    v = [x - dot * y for x, y in zip(v, b)]
                norm = math.sqrt(sum(abs(x) ** 2 for x in v)) + jitter[c]
                if norm > best_norm:
                    best_norm, best_c = norm, c
            chosen.append(best_c)
            v = list(cols_float[best_c])
            for b in basis:
                dot = sum(x * y.conjugate() for x, y in zip(v, b))
                v = [x - dot * y for x, y in zip(v, b)]
            norm = math.sqrt(sum(abs(x) ** 2 for x in v))
            if norm > 0:
                basis.append([x / norm for x in v])
        cols = tuple(sorted(chosen))
        sub = [[values[r][c] for c in cols] for r in range(rho)]
        det = det_exact(sub)
        key = (det.abs2(), tuple(-c for c in cols))
        if best is None or key > best[0]:
            best = (key, cols, det)
    return best[1], best[2]


def _max_minor_ball(matrix, values, p, strategy, seed, exhaustive_cap):
    rho = matrix.rho
    ncols = matrix.mu + 1
    n_minors = math.comb(ncols, rho)
    best = None
    if n_minors <= exhaustive_cap:
        for cols in combinations(range(ncols), rho):
            det = _ball_det([[values[r][c] for c in cols] for r in range(rho)])
            lo = det.abs_lower()
            if best is None or lo > best[0]:
                best = (lo, cols, det)
    else:
        # score with midpoints, certify the winner
        mid_vals = [[v.to_complex() for v in row] for row in values]
        idx, _ = _greedy_minor_complex(mid_vals, rho, ncols, seed)
        det = _ball_det([[values[r][c] for c in idx] for r in range(rho)])
        best = (det.abs_lower(), idx, det)
    lo, cols, det = best
    if lo <= 0.0:
        return INDETERMINATE, None
    cert = MinorCertificate(tuple(cols), det, list(p), "ball")
    return cert, None


def _greedy_minor_complex(mid_vals, rho, ncols, seed):
    cols_float = [[mid_vals[r][c] for r in range(rho)] for c in range(ncols)]
    chosen: List[int] = []
    basis: List[List[complex]] = []
    for _ in range(rho):
        best_c, best_norm = None, -1.0
        for c in range(ncols):
            if c in chosen:
                continue
            v = list(cols_float[c])
            for b in basis:
                dot = sum(x * y.conjugate() for x, y in zip(v, b))
                v = [x - dot * y for x, y in zip(v, b)]
            norm = math.sqrt(sum(abs(x) ** 2 for x in v))
            if norm > best_norm:
                best_norm, best_c = norm, c
        chosen.append(best_c)
        v = list(cols_float[best_c])
        for b in basis:
            dot = sum(x * y.conjugate() for x, y in zip(v, b))
            v = [x - dot * y for x, y in zip(v, b)]
        norm = math.sqrt(sum(abs(x) ** 2 for x in v))
        if norm > 0:
            basis.append([x / norm for x in v])
    return tuple(sorted(chosen)), None


def _ball_det(sub: List[List[ComplexBall]]) -> ComplexBall:
    """Determinant of a small ball matrix by cofactor expansion."""
    k = len(sub)
    if k == 1:
        return sub[0][0]
    if k == 2:
        return sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0]
    prec = sub[0][0].prec
    total = ComplexBall.exact_zero(prec)
    for j in range(k):
        minor = [[sub[r][c] for c in range(k) if c != j] for r in range(1, k)]
        term = sub[0][j] * _ball_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def derivative_lower_bound(matrix: EliminationMatrix, certificate: MinorCertificate,
                           P: Polynomial) -> Tuple[int, dict]:
    """Index k maximizing |xi^k P(p)| and the measured inequality data.

    P must be supported on the staircase rows of the matrix."""
    row_index = {m: i for i, m in enumerate(matrix.rows)}
    coeffs = [GR_ZERO] * matrix.rho
    for m, c in P.terms.items():
        if m not in row_index:
            raise ValueError("polynomial has support outside the staircase")
        coeffs[row_index[m]] = c
    p = certificate.point
    values = matrix.evaluate_exact(p)
    derivs = []
    for k in range(matrix.mu + 1):
        acc = GR_ZERO
        for i in range(matrix.rho):
            if coeffs[i]:
                acc = acc + coeffs[i] * values[i][k]
        derivs.append(acc)
    best_k, best_a2 = 0, derivs[0].abs2()
    for k in range(1, len(derivs)):
        a2 = derivs[k].abs2()
        if a2 > best_a2:
            best_k, best_a2 = k, a2
    certificate.best_index = best_k
    norm = l2_norm(P)
    eps = certificate.abs_value()
    kappa = max(matrix.diagram.kappa, 1)
    mu = matrix.mu
    pnorm = math.sqrt(sum(float(_as_gr(v).abs2()) for v in p))
    scale = (matrix.degree ** kappa if matrix.degree >= 1 else 1) * mu * (
        math.log(max(mu, 2)) + max(math.log(pnorm) if pnorm > 0 else 0.0, 0.0))
    lhs = 0.5 * math.log(float(best_a2)) if best_a2 else -math.inf
    rhs_base = math.log(norm) + math.log(eps) if (norm > 0 and eps > 0) else -math.inf
    c_required = (rhs_base - lhs) / scale if (scale > 0 and lhs > -math.inf) else 0.0
    report = {
        "k": best_k,
        "log_deriv": lhs,
        "log_norm": math.log(norm) if norm > 0 else -math.inf,
        "log_eps": math.log(eps) if eps > 0 else -math.inf,
        "scale": scale,
        "c_required": max(c_required, 0.0),
        "derivatives_abs": [0.5 * math.log(float(v.abs2())) if v else None
                            for v in derivs[: min(len(derivs), 64)]],
    }
    return best_k, report


def universal_lower_bound(xi: VectorField, p, P: Polynomial, d: int,
                          mu: Optional[int] = None, seed: int = 0) -> dict:
    """Full pipeline: slice -> diagram -> staircase reduction -> minors ->
    derivative lower bound; mirrors the proof it instruments."""
    p = [_as_gr(v) for v in p]
    if xi.is_singular_at(p):
        raise ValueError("pipeline needs a nonsingular base point")
    sl = ideal_slice(xi, p, d)
    diagram = leading_diagram(sl)
    R, witness = staircase_division(P, sl)
    if R.is_zero():
        return {
            "degenerate": True,
            "reason": "input vanishes on the orbit closure",
            "R": R,
            "k": None,
            "report": None,
            "diagram": diagram,
        }
    rho = diagram.rho(d)
    if mu is None:
        mu = morse_multiplicity_cap(xi.n, max(d, 1), max(xi.delta, 1))
    mu = max(mu, rho + 1)
    matrix = build_elimination_matrix(xi, diagram, d, mu)
    outcome, kernel_witness = max_minor_at_point(matrix, p, seed=seed)
    if outcome == ALL_ZERO:
        raise PipelineError(
            "all elimination minors vanish at the base point "
            "(exceptional stratum)",
            {"kernel_witness": kernel_witness, "diagram": diagram})
    if outcome == INDETERMINATE:
        raise PipelineError("ball evaluation cannot certify a nonzero minor", {})
    cert = outcome
    k, report = derivative_lower_bound(matrix, cert, R)
    kappa = max(diagram.kappa, 1)
    m = xi.n
    envelope = (d ** (2 * kappa * (m + 1))) * math.log(max(d, 2))
    gap = report["log_norm"] - report["log_deriv"]
    return {
        "degenerate": False,
        "R": R,
        "k": k,
        "mu": mu,
        "certificate": cert,
        "diagram": diagram,
        "report": report,
        "envelope": envelope,
        "measured_gap": gap,
        "gap_over_envelope": gap / envelope if envelope > 0 else 0.0,
    }


# ---------------------------------------------------------------------------
# Projective distance and the empirical Lojasiewicz inequality
# ---------------------------------------------------------------------------


def _normalize_rep(w: Sequence[complex]) -> List[complex]:
    w = [complex(x) for x in w]
    mx = max(abs(x) for x in w)
    if mx == 0.0:
        raise ValueError("zero vector is not a projective point")
    return [x / mx for x in w]


def projective_distance(w1: Sequence[complex], w2: Sequence[complex]) -> float:
    """Max modulus of the 2x2 minors of normalized representatives."""
    a = _normalize_rep(w1)
    b = _normalize_rep(w2)
    if len(a) != len(b):
        raise ValueError("projective points of different dimension")
    best = 0.0
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            best = max(best, abs(a[i] * b[j] - a[j] * b[i]))
    return best


def psi(p: Sequence[complex]) -> List[complex]:
    """Affine point to projective representative (1 : p)."""
    return [1.0 + 0j] + [complex(x) for x in p]


def distance_to_infinity(p: Sequence[complex]) -> float:
    """Upper estimate of the projective distance from psi(p) to the
    hyperplane at infinity, minimizing over candidate directions."""
    w = psi(p)
    n = len(w) - 1
    candidates = []
    for j in range(n):
        v = [0j] * (n + 1)
        v[j + 1] = 1.0 + 0j
        candidates.append(v)
    if any(abs(x) > 0 for x in w[1:]):
        v = [0j] + [x for x in w[1:]]
        candidates.append(v)
    return min(projective_distance(w, v) for v in candidates)


def _gauss_newton_zero(polys: Sequence[Polynomial], start: List[complex],
                       steps: int = 40, tol: float = 1e-13):
    """Least-squares Newton for a common zero; returns the point or None."""
    import numpy as np

    n = polys[0].n
    jac_polys = [[P.diff(j) for j in range(n)] for P in polys]
    x = np.array(start, dtype=complex)
    for _ in range(steps):
        F = np.array([P.evaluate_complex(list(x)) for P in polys], dtype=complex)
        if max(abs(v) for v in F) < tol:
            return list(x)
        J = np.array([[jac_polys[i][j].evaluate_complex(list(x)) for j in range(n)]
                      for i in range(len(polys))], dtype=complex)
        try:
            step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        except np.linalg.LinAlgError:
            return None
        x = x + step
        if not all(math.isfinite(abs(v)) for v in x):
            return None
    F = [P.evaluate_complex(list(x)) for P in polys]
    if max(abs(v) for v in F) < tol:
        return list(x)
    return None


def lojasiewicz_check(polys: Sequence[Polynomial], p, seed: int = 0,
                      starts: int = 64, search_radius: float = 4.0) -> dict:
    """Empirical check of the diophantine gradient inequality: if every
    poly is small at p, then p is close to a common zero (or infinity).

    Returns the measured quantities plus the constant the inequality
    requires; callers fit one constant across a battery."""
    from .polynomial import height as poly_height

    polys = list(polys)
    if not polys:
        raise ValueError("need at least one polynomial")
    n = polys[0].n
    d = max(max(P.degree(), 1) for P in polys)
    h = max(max(poly_height(P), 0.0) for P in polys)
    p_c = [complex(_as_gr(v).to_complex()) if not isinstance(v, complex) else v
           for v in p]
    eps = max(abs(P.evaluate_complex(p_c)) for P in polys)

    rng = random.Random(seed)
    zeros: List[List[complex]] = []
    for s in range(starts):
        if s == 0:
            start = list(p_c)
        else:
            shell = search_radius * rng.random()
            start = [v + complex(rng.gauss(0, 1), rng.gauss(0, 1)) * shell
                     for v in p_c]
        z = _gauss_newton_zero(polys, start)
        if z is None:
            continue
        if all(abs(x) < 1e8 for x in z) and \
                not any(max(abs(a - b) for a, b in zip(z, w)) < 1e-8 for w in zeros):
            zeros.append(z)
    dist_inf = distance_to_infinity(p_c)
    if zeros:
        dist_w = min(projective_distance(psi(p_c), psi(z)) for z in zeros)
        dist = min(dist_w, dist_inf)
        found = True
    else:
        dist = dist_inf
        found = False
    log_eps = math.log(eps) if eps > 0 else -math.inf
    log_dist = math.log(dist) if dist > 0 else -math.inf
    # log eps >= d^n [n log dist - c (d + h)]
    c_required = (n * log_dist - log_eps / (d ** n)) / (d + h)
    report = {
        "n": n,
        "d": d,
        "h": h,
        "eps": eps,
        "dist": dist,
        "distance_to_infinity": dist_inf,
        "zeros_found": len(zeros),
        "zero_search_succeeded": found,
        "log_eps": log_eps,
        "log_dist": log_dist,
        "c_required": max(c_required, 0.0),
        "holds_trivially": not found,
    }
    return report
