"""Acceptance suite: one test per criterion, at the stated tolerances and time budgets."""

import math
import time
from fractions import Fraction as F

import pytest

from rellich.exact import (
    ProblemParams,
    adimurthi_santra_constant,
    critical_boundary_constant,
    critical_constant,
    critical_origin_constant,
)
from rellich.harness import (
    random_test_function,
    run_harness,
    sample_transform_cases,
    scaling_identity_check,
    special_alphas,
    transform_equivalence,
)
from rellich.logterm import closed_form_top_coefficient, coeff_table, recursion_top_coefficient, verify_table
from rellich.minimizer import default_windows, refinement_study
from rellich.rayleigh import default_eps_list, epsilon_sweep


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


def test_criterion_1_exact_constants():
    with Budget(1):
        assert critical_origin_constant(ProblemParams(8, 4)).exact_value() == 576
        assert adimurthi_santra_constant(8, 2).base ** 2 == 100
        for N in (4, 6, 8, 10):
            c = critical_origin_constant(ProblemParams(N, 2))
            # ((N-2)/sqrt(N))^N == ((N-2)^2/N)^(N/2)
            assert (c.base, c.exponent) == (F((N - 2) ** 2, N), F(N, 2))
            assert c.exact_value() ** 2 == F((N - 2) ** (2 * N), N**N)
        for k in range(2, 9):
            c = critical_boundary_constant(ProblemParams(2 * k, k))
            assert c.exact_value() == F(math.prod((2 * j - 1) ** 2 for j in range(1, k + 1)), 4**k)


def test_criterion_2_coefficient_recursion():
    with Budget(10):
        for m in range(1, 6):
            for N in range(5, 17):
                chk = verify_table(N, m)
                assert chk.passed, chk.mismatch
        for m in range(1, 9):
            for N in range(5, 17):
                top = coeff_table(N, m).C[(m, 2 * m - 1)]
                assert top == closed_form_top_coefficient(N, m) == recursion_top_coefficient(N, m)


@pytest.mark.parametrize("N,k,tol", [(4, 2, 0.02), (6, 3, 0.03), (8, 4, 0.03)])
def test_criterion_3_optimality_sweeps(N, k, tol):
    with Budget(60):
        for family, gamma in (("phi", F(N, k)), ("psi", F(N))):
            params = ProblemParams(N, k, gamma)
            res = epsilon_sweep(family, params, default_eps_list(params))
            exact = critical_constant(params).exact_value()
            assert exact == res.reference
            assert all(r.converged for r in res.rows)
            assert abs(res.extrapolated / float(exact) - 1) <= tol, (res.extrapolated, exact, res.fitted_order)
    if (N, k) == (4, 2):
        assert critical_origin_constant(ProblemParams(4, 2)).exact_value() == 1
        assert critical_boundary_constant(ProblemParams(4, 2)).exact_value() == F(9, 16)


def test_criterion_4_collapse_outside_the_window():
    eps = [F(1, 5), F(1, 10), F(1, 20), F(1, 40)]
    with Budget(30):
        for family, gamma, nearest in (("phi", F(3, 2), F(2)), ("psi", F(9, 2), F(4))):
            params = ProblemParams(4, 2, gamma)
            assert critical_constant(params).base == 0
            endpoint = float(critical_constant(ProblemParams(4, 2, nearest)))
            res = epsilon_sweep(family, params, eps)
            last = res.rows[-1]
            assert last.epsilon == F(1, 40)
            assert last.quotient < 0.1 * endpoint
            assert res.extrapolated == 0.0
            # the gamma-adapted family keeps the mass finite; its quotients shrink like eps
            adapted = epsilon_sweep(family, params, eps, adapted=True)
            q = [r.quotient for r in adapted.rows]
            assert all(b < a for a, b in zip(q, q[1:]))
            ratios = [qi / float(e) for qi, e in zip(q, eps)]
            assert max(ratios) / min(ratios) < 1.05


def test_criterion_5_inequality_harness():
    with Budget(120):
        rep = run_harness(seed=42, cases=100, workers=1)
    assert len(rep.summaries) == 18
    for name, s in rep.summaries.items():
        assert s.cases == 100
        assert s.passed == 100, (name, s.failures[:1])
    assert rep.all_passed


def test_criterion_6_transformation_equivalence():
    cases = sample_transform_cases(42, 10)
    assert len(cases) == 10
    N0, p0 = cases[0][0], cases[0][1]
    N1, p1 = cases[1][0], cases[1][1]
    assert cases[0][2] == special_alphas(N0, p0)[0] and cases[1][2] == special_alphas(N1, p1)[1]
    with Budget(30):
        for N, p, alpha, w in cases:
            rep = transform_equivalence(w, p, alpha, N)
            assert rep.passed(1e-8), rep.to_dict()
            assert all(c.rel_diff <= 1e-8 for c in rep.identities)


def test_criterion_7_scaling_identities():
    setups = [(ProblemParams(4, 2), random_test_function(11, 1, 3)),
              (ProblemParams(6, 2), random_test_function(12, 2, 3))]
    with Budget(10):
        for params, u in setups:
            p = params.p
            a = -(p - 1) / p
            for lam in (F(1, 8), F(1, 2), F(2), F(8)):
                rep = scaling_identity_check(u, params, lam, a)
                by_name = {c.name: c for c in rep.identities}
                assert by_name["log_term"].rel_diff <= 1e-10
                assert by_name["first_order_quotient"].rel_diff <= 1e-8


def _trend_study(gamma, levels):
    params = ProblemParams(4, 2, gamma)
    return refinement_study(params, windows=default_windows(params, levels), tol=1e-10)


def test_criterion_8_minimizer_trends():
    tol = 1e-10
    with Budget(300):
        for gamma, exact in ((F(2), 1.0), (F(4), 9 / 16)):
            st = _trend_study(gamma, 7)
            v, ind = st.values, st.indicators
            assert all(r.converged for r in st.results)
            assert all(b < a for a, b in zip(v, v[1:])), v
            assert all(x >= exact * (1 - 5 * tol) for x in v)
            assert v[-1] / exact - 1 <= 0.10
            assert all(b > a for a, b in zip(ind, ind[1:])), ind
        st = _trend_study(F(3), 5)
        v, ind = st.values, st.indicators
        assert all(r.converged for r in st.results)
        assert abs(v[-1] - v[-2]) <= 1e-3 * v[-1]
        assert abs(ind[-1] - ind[-2]) <= 1e-3
        assert ind[-1] < 0.05
        # interior minimum stays well above both endpoint constants
        assert v[-1] > 1.0


def test_criterion_9_virtual_minimizers_emerge():
    with Budget(60):
        params = ProblemParams(4, 2, F(2))
        origin = refinement_study(params, windows=default_windows(params, 7, factor=1e5)).results[-1]
        params = ProblemParams(4, 2, F(4))
        boundary = refinement_study(params, windows=default_windows(params, 8)).results[-1]
    p, N = 2.0, 4.0
    assert origin.cosine_similarity((p - 1) / p) >= 0.99
    assert boundary.cosine_similarity((N - 1) / p) >= 0.99
    # and each profile matches its own virtual minimizer, not the other one
    assert origin.cosine_similarity((N - 1) / p) < 0.9
    assert boundary.cosine_similarity((p - 1) / p) < 0.9
