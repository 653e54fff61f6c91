import random

import pytest
from gmpy2 import mpq

from orbitcount import Polynomial, VectorField, qq
from orbitcount.scalars import GaussianRational


NAMES_TY = ("t", "y")


def var(i, n=2, names=NAMES_TY):
    return Polynomial.variable(i, n, names)


def const(c, n=2, names=NAMES_TY):
    return Polynomial.constant(n, c, names)


@pytest.fixture
def exp_field():
    """t' = 1, y' = y: trajectory (z, e^z) through (0, 1)."""
    return VectorField([const(1), var(1)], NAMES_TY)


@pytest.fixture
def quadratic_orbit_field():
    """t' = t, y' = 2y: orbit closures y = c t^2."""
    return VectorField([var(0), 2 * var(1)], NAMES_TY)


@pytest.fixture
def parabola_field():
    """t' = 1, y' = 2t: polynomial trajectory (z, z^2) through the origin."""
    return VectorField([const(1), 2 * var(0)], NAMES_TY)


def random_gr(rng, bound=9, den_bound=4, complex_ok=False):
    re = mpq(rng.randint(-bound, bound), rng.randint(1, den_bound))
    im = mpq(rng.randint(-bound, bound), rng.randint(1, den_bound)) if complex_ok else 0
    return GaussianRational(re, im)


def random_poly(rng, n, degree, names=None, bound=9, complex_ok=False,
                integer=False):
    from orbitcount.monomial import monomials_upto

    while True:
        terms = {}
        for m in monomials_upto(n, degree):
            if rng.random() < 0.35:
                continue
            if integer:
                c = GaussianRational(rng.randint(-bound, bound))
            else:
                c = random_gr(rng, bound, complex_ok=complex_ok)
            if c:
                terms[m] = c
        if terms:
            return Polynomial(n, terms, names)


def random_field(rng, n, delta, names=None, bound=5, integer=True):
    comps = [random_poly(rng, n, delta, names, bound, integer=integer)
             for _ in range(n)]
    return VectorField(comps, names)


def random_nonsingular_point(rng, xi, bound=3):
    for _ in range(100):
        p = [mpq(rng.randint(-bound, bound), rng.randint(1, 3)) for _ in range(xi.n)]
        if not xi.is_singular_at([GaussianRational(v) for v in p]):
            return [GaussianRational(v) for v in p]
    raise RuntimeError("could not find a nonsingular point")
