import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rellich.logterm import (
    CoeffTable,
    Poly,
    TermSum,
    closed_form_top_coefficient,
    coeff_table,
    kth_radial_derivative,
    radial_diff,
    radial_laplacian,
    recursion_top_coefficient,
    verify_table,
)


def test_poly_arithmetic():
    p = Poly((1, 2)) * Poly((0, 1))
    assert p == Poly((0, 1, 2)) and p(F(1, 2)) == 1
    assert Poly.falling(2)(5) == 20


def test_laplacian_of_power():
    N, s = 5, F(3, 2)
    f = TermSum.monomial(N, r_power=s)
    assert radial_laplacian(f) == TermSum.monomial(N, r_power=s - 2, coeff=s * (s + N - 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.fractions(F(-3), F(3), max_denominator=4), st.floats(0.05, 0.95))
def test_laplacian_of_log_power_matches_closed_form(N, alpha, r):
    f = TermSum.log_power(N)
    lap = radial_laplacian(f)
    L = math.log(1 / r)
    a = float(alpha)
    expected = (a * (a - 1) * L ** (a - 2) - a * (N - 2) * L ** (a - 1)) / r**2
    assert math.isclose(lap.evaluate(alpha, r), expected, rel_tol=1e-11, abs_tol=1e-11)


def test_boundary_factor_derivative_against_difference_quotient():
    f = TermSum.monomial(3, r_power=2, bdry_power=3, log_power=F(1, 2))
    d = radial_diff(f)
    r, h = 0.4, 1e-6
    fd = (f.evaluate(None, r + h) - f.evaluate(None, r - h)) / (2 * h)
    assert math.isclose(d.evaluate(None, r), fd, rel_tol=1e-8)


def test_odd_order_is_derivative_of_laplacian_power():
    f = TermSum.polynomial([1, 0, -3, 0, 2], 6, bdry_power=2)
    assert kth_radial_derivative(f, 3) == radial_diff(radial_laplacian(f))


def test_symbolic_times_symbolic_rejected():
    with pytest.raises(ValueError):
        TermSum.log_power(3) * TermSum.log_power(3)


def test_coeff_table_small_case_and_json_round_trip():
    t = coeff_table(8, 3)
    assert t.C[(2, 3)] == -48 and t.D[(3, 6)] == -2304
    assert CoeffTable.from_json(t.to_json()).C == t.C


@pytest.mark.parametrize("m", range(1, 6))
def test_top_coefficient_closed_form_matches_recursion(m):
    for N in (5, 8, 13):
        assert closed_form_top_coefficient(N, m) == recursion_top_coefficient(N, m)


def test_verify_table_detects_a_corrupted_entry():
    t = coeff_table(7, 2)
    assert verify_table(7, 2, t).passed
    t.C[(2, 1)] += 1
    chk = verify_table(7, 2, t)
    assert not chk.passed and chk.mismatch[1] == 2
