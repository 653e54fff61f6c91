import json
import math
import random

import pytest
from gmpy2 import mpq

from orbitcount import (CertificationError, Polynomial, VectorField,
                        certify_radius, iterated_lie, lie_derivative,
                        morse_multiplicity_cap, multiplicity, qq,
                        trajectory_series)
from orbitcount.scalars import GaussianRational

from conftest import (NAMES_TY, const, random_field, random_nonsingular_point,
                      random_poly, var)


class TestLieDerivative:
    def test_scaling_eigenfunction(self):
        names = ("x",)
        x = Polynomial.variable(0, 1, names)
        xi = VectorField([x], names)
        assert lie_derivative(xi, x * x) == 2 * x * x

    def test_rotation_invariant(self):
        names = ("x", "y")
        x, y = [Polynomial.variable(i, 2, names) for i in range(2)]
        rot = VectorField([-y, x], names)
        assert lie_derivative(rot, x * x + y * y).is_zero()

    def test_exp_eigen_chain(self, exp_field):
        y = var(1)
        out = y
        for _ in range(5):
            out = lie_derivative(exp_field, out)
            assert out == y

    def test_degree_bound(self):
        rng = random.Random(0)
        for _ in range(25):
            n = rng.randint(1, 3)
            xi = random_field(rng, n, rng.randint(1, 2))
            P = random_poly(rng, n, rng.randint(1, 3))
            out = lie_derivative(xi, P)
            if not out.is_zero():
                assert out.degree() <= P.degree() + xi.delta - 1

    def test_dimension_mismatch(self, exp_field):
        with pytest.raises(ValueError):
            lie_derivative(exp_field, Polynomial.variable(0, 3))

    def test_iterated_k0_and_t_chain(self, exp_field):
        t = var(0)
        chain = iterated_lie(exp_field, t, 3)
        assert chain[0] == t
        assert chain[1] == const(1)
        assert chain[2].is_zero() and chain[3].is_zero()
        assert iterated_lie(exp_field, t, 0) == [t]


class TestTrajectorySeries:
    def test_exp_series(self, exp_field):
        g = trajectory_series(exp_field, [qq(0), qq(1)], 8)
        assert g.series[0].coeffs[1] == GaussianRational(1)
        assert all(not c for k, c in enumerate(g.series[0].coeffs) if k != 1)
        fact = 1
        for k in range(9):
            assert g.series[1].coeffs[k] == GaussianRational(mpq(1, fact))
            fact *= k + 1

    def test_separable_pole(self):
        names = ("x",)
        x = Polynomial.variable(0, 1, names)
        xi = VectorField([x * x], names)
        g = trajectory_series(xi, [qq(1)], 7)
        # 1/(1-z) = sum z^k
        assert all(c == GaussianRational(1) for c in g.series[0].coeffs)

    def test_truncation_consistency(self):
        rng = random.Random(1)
        for _ in range(10):
            n = rng.randint(1, 3)
            xi = random_field(rng, n, rng.randint(1, 2))
            p = random_nonsingular_point(rng, xi)
            a = trajectory_series(xi, p, 6)
            b = trajectory_series(xi, p, 11)
            for i in range(n):
                assert b.series[i].coeffs[:7] == a.series[i].coeffs

    def test_singular_point_constant_germ(self, quadratic_orbit_field):
        g = trajectory_series(quadratic_orbit_field, [qq(0), qq(0)], 5)
        assert g.is_constant()

    def test_derivative_identity(self):
        # k! [z^k](P o phi) = (xi^k P)(p), both sides exact
        rng = random.Random(2)
        for _ in range(25):
            n = rng.randint(1, 3)
            xi = random_field(rng, n, rng.randint(1, 2))
            p = random_nonsingular_point(rng, xi)
            P = random_poly(rng, n, rng.randint(1, 3))
            germ = trajectory_series(xi, p, 12)
            comp = germ.compose_poly(P)
            chain = iterated_lie(xi, P, 12)
            fact = 1
            for k in range(13):
                assert comp[k] * fact == chain[k].evaluate_exact(p)
                fact *= k + 1

    def test_germ_export_json(self, exp_field):
        g = trajectory_series(exp_field, [qq(0), qq(1)], 4)
        data = json.loads(g.export_json(radius=2.0))
        assert data["coefficients"][1][2] == "1/2"
        assert data["certified_radius"] == 2.0


class TestMultiplicity:
    def test_exp_examples(self, exp_field):
        p = [qq(0), qq(1)]
        y, one = var(1), const(1)
        assert multiplicity(exp_field, p, y - one) == 1
        assert multiplicity(exp_field, p, (y - one) ** 2) == 2
        assert morse_multiplicity_cap(2, 2, 1) == 72

    def test_additivity(self):
        rng = random.Random(3)
        hits = 0
        while hits < 12:
            xi = random_field(rng, 2, rng.randint(1, 2))
            p = random_nonsingular_point(rng, xi)
            P = random_poly(rng, 2, 2)
            Q = random_poly(rng, 2, 2)
            # force vanishing at p so multiplicities are positive
            P = P - const(P.evaluate_exact(p))
            Q = Q - const(Q.evaluate_exact(p))
            if P.is_zero() or Q.is_zero():
                continue
            mP = multiplicity(xi, p, P)
            mQ = multiplicity(xi, p, Q)
            if mP is None or mQ is None:
                continue
            assert multiplicity(xi, p, P * Q) == mP + mQ
            hits += 1

    def test_identically_vanishing_reports_none(self, quadratic_orbit_field):
        p = [qq(1), qq(1)]
        P = var(1) - var(0) * var(0)
        assert multiplicity(quadratic_orbit_field, p, P) is None

    def test_singular_point_rejected(self, quadratic_orbit_field):
        with pytest.raises(ValueError):
            multiplicity(quadratic_orbit_field, [qq(0), qq(0)], var(1))


class TestCertifyRadius:
    def test_exp_any_radius(self, exp_field):
        g = trajectory_series(exp_field, [qq(0), qq(1)], 40)
        for r in (1.5, 2.0, 3.0):
            traj = certify_radius(g, r)
            assert traj.tail < 1e-20
            assert traj.exact_mask == [True, False]

    def test_pole_limits_radius(self):
        names = ("x",)
        x = Polynomial.variable(0, 1, names)
        xi = VectorField([x * x], names)
        g = trajectory_series(xi, [qq(1)], 60)
        traj = certify_radius(g, 0.6)
        assert traj.tail < 1e-6
        # true radius is 1 (pole of 1/(1-z)); beyond it certification
        # must fail no matter the truncation order
        with pytest.raises(CertificationError):
            certify_radius(g, 1.1)
        with pytest.raises(CertificationError):
            certify_radius(g.extended(120), 1.1)

    def test_auto_radius_rescales_above_one(self):
        names = ("x",)
        x = Polynomial.variable(0, 1, names)
        xi = VectorField([x * x], names)
        g = trajectory_series(xi, [qq(1)], 60)
        traj = certify_radius(g)
        assert traj.radius > 1.0
        assert traj.germ.time_scale != GaussianRational(1)

    def test_polynomial_trajectory_exact(self, parabola_field):
        g = trajectory_series(parabola_field, [qq(0), qq(0)], 6)
        traj = certify_radius(g, 5.0)
        assert traj.tail == 0.0
        assert traj.exact_mask == [True, True]
        vals = traj.eval_exact(mpq(1, 2))
        assert vals[1] == GaussianRational(mpq(1, 4))

    def test_ball_evaluation_contains_reference(self, exp_field):
        import mpmath

        g = trajectory_series(exp_field, [qq(0), qq(1)], 40)
        traj = certify_radius(g, 2.0)
        ball = traj.eval_ball(mpq(1, 2), 160)[1]
        with mpmath.workprec(250):
            ref = mpmath.exp(mpmath.mpf(1) / 2)
            diff = abs(ball.mid - ref)
        assert float(diff) <= ball.rad
