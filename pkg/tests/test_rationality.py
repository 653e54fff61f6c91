import random

import pytest
from gmpy2 import mpq

from orbitcount.rationality import (PadePair, TaylorPrefix, minimal_degree,
                                    pade_solve, rationality_conditions,
                                    reconstruct, uniform_degree_scan,
                                    verify_against_prefix)
from orbitcount.scalars import GaussianRational

from oracles import fraction_kernel


def geometric(n):
    return TaylorPrefix([1] * n)


def fibonacci(n):
    xs = [1, 1]
    while len(xs) < n:
        xs.append(xs[-1] + xs[-2])
    return TaylorPrefix(xs[:n])


def exp_prefix(n):
    out = [mpq(1)]
    for k in range(1, n):
        out.append(out[-1] / k)
    return TaylorPrefix(out)


class TestPadeSolve:
    def test_geometric(self):
        pair = pade_solve(geometric(4), 1, 4)
        assert str(pair.P) == "1"
        assert str(pair.Q) == "-t + 1"

    def test_exp_prefix_trivial_only(self):
        assert pade_solve(exp_prefix(4), 1, 4) is None

    def test_underdetermined_always_nontrivial(self):
        rng = random.Random(0)
        for _ in range(10):
            n = rng.randint(2, 5)
            prefix = TaylorPrefix([mpq(rng.randint(-9, 9), rng.randint(1, 5))
                                   for _ in range(n)])
            assert pade_solve(prefix, n - 1, n) is not None

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            pade_solve(geometric(4), 1, 5)
        with pytest.raises(ValueError):
            pade_solve(geometric(4), 4, 4)

    def test_remultiplication_identity(self):
        # any nontrivial solution satisfies P - f Q = O(t^N) exactly
        rng = random.Random(1)
        for _ in range(12):
            n = rng.randint(4, 9)
            prefix = TaylorPrefix([mpq(rng.randint(-6, 6), rng.randint(1, 4))
                                   for _ in range(n)])
            d = rng.randint(1, (n - 1) // 2 + 1)
            N = rng.randint(d + 1, n)
            pair = pade_solve(prefix, d, N)
            if pair is None:
                continue
            # multiply back: coefficients of f*Q through t^(N-1)
            qc = [pair.Q.coefficient((k,)) for k in range(d + 1)]
            pc = [pair.P.coefficient((k,)) for k in range(d + 1)]
            for k in range(N):
                conv = GaussianRational(0)
                for j in range(0, min(k, d) + 1):
                    conv = conv + qc[j] * prefix[k - j]
                lhs = pc[k] if k <= d else GaussianRational(0)
                assert lhs == conv

    def test_kernel_against_fraction_oracle(self):
        from orbitcount.rationality import _pade_matrix

        rng = random.Random(2)
        for _ in range(10):
            n = rng.randint(4, 8)
            prefix = TaylorPrefix([mpq(rng.randint(-5, 5), rng.randint(1, 3))
                                   for _ in range(n)])
            d = rng.randint(1, 2)
            N = min(n, 3 * d + 1)
            if N <= d:
                continue
            rows = _pade_matrix(prefix, d, N)
            oracle = fraction_kernel(rows, 2 * d + 2)
            assert (pade_solve(prefix, d, N) is not None) == bool(oracle)


class TestRationalityConditions:
    def test_fibonacci(self):
        assert rationality_conditions(fibonacci(8), 2, 7)
        assert not rationality_conditions(fibonacci(8), 1, 7)

    def test_constant_series(self):
        assert rationality_conditions(TaylorPrefix([mpq(7), mpq(0)]), 0, 2)

    def test_monotone_in_degree(self):
        f = fibonacci(10)
        assert rationality_conditions(f, 2, 7)
        assert rationality_conditions(f, 3, 9)


class TestReconstruct:
    def test_geometric(self):
        pair = reconstruct(geometric(8), 1)
        assert str(pair.P) == "1" and str(pair.Q) == "-t + 1"
        assert verify_against_prefix(pair, geometric(8))

    def test_fibonacci_degree_two(self):
        pair = reconstruct(fibonacci(10), 2)
        assert str(pair.Q) == "-t^2 - t + 1"
        assert str(pair.P) == "1"
        assert reconstruct(fibonacci(10), 1) is None

    def test_exp_rejected_all_degrees(self):
        f = exp_prefix(25)
        for d in range(0, 7):
            assert reconstruct(f, d) is None

    def test_uniqueness_across_orders(self):
        for f, d in ((geometric(8), 1), (fibonacci(12), 2)):
            a = pade_solve(f, d, 3 * d + 1)
            b = pade_solve(f, d, 3 * d + 3)
            assert a.P == b.P and a.Q == b.Q

    def test_length_requirement(self):
        with pytest.raises(ValueError):
            reconstruct(geometric(4), 1)

    def test_gaussian_coefficients(self):
        # 1/(1 - i t): coefficients i^k
        i = GaussianRational(0, 1)
        coeffs = [i ** k for k in range(8)]
        pair = reconstruct(TaylorPrefix(coeffs), 1)
        assert pair is not None
        assert verify_against_prefix(pair, TaylorPrefix(coeffs))


class TestUniformScan:
    def test_geometric_family(self):
        fam = {f"p{p}": [mpq(p) ** k for k in range(20)] for p in (1, 2, 3)}
        rep = uniform_degree_scan(fam, 3)
        assert rep["max_degree"] == 1
        assert rep["all_rational"]

    def test_mixed_degree_family(self):
        # (1 + p t)/(1 - t^2) has degree 2 uniformly for p != 1
        fam = {}
        for p in (2, 3, 5):
            coeffs = []
            for k in range(20):
                # series of (1+pt)/(1-t^2): a_k = 1 for even, p for odd
                coeffs.append(mpq(1) if k % 2 == 0 else mpq(p))
            fam[f"p{p}"] = coeffs
        rep = uniform_degree_scan(fam, 3)
        assert rep["max_degree"] == 2
        assert all(r["degree"] == 2 for r in rep["rows"])

    def test_non_rational_member_reported(self):
        fam = {"geo": [mpq(1)] * 20, "exp": [c for c in exp_prefix(20).coeffs]}
        rep = uniform_degree_scan(fam, 3)
        by_name = {r["index"]: r["degree"] for r in rep["rows"]}
        assert by_name["geo"] == 1
        assert by_name["exp"] is None
        assert not rep["all_rational"]

    def test_insufficient_terms_rejected(self):
        with pytest.raises(ValueError):
            uniform_degree_scan({"x": [mpq(1)] * 5}, 3)

    def test_threads_deterministic(self):
        fam = {f"p{p}": [mpq(p) ** k for k in range(14)] for p in (1, 2, 3, 4)}
        a = uniform_degree_scan(fam, 2, threads=1)
        b = uniform_degree_scan(fam, 2, threads=4)
        assert a == b


def test_minimal_degree_helper():
    assert minimal_degree(fibonacci(12), 3) == 2
    assert minimal_degree(exp_prefix(25), 6) is None


def test_pade_pair_series_matches_prefix():
    pair = reconstruct(fibonacci(10), 2)
    s = pair.series(9)
    fib = fibonacci(10)
    for k in range(10):
        assert s[k] == fib[k]
