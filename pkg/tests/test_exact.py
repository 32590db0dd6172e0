from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rellich.exact import (
    ExactConstant,
    ParameterRangeError,
    ProblemParams,
    adimurthi_santra_constant,
    chain_constant_D,
    chain_constant_E,
    critical_boundary_constant,
    critical_constant,
    critical_origin_constant,
    davies_hinz_constant,
    gap_analysis,
    hardy_weight_constant,
    subcritical_rellich_constant,
)


def test_params_derive_m_p_and_default_gamma():
    p = ProblemParams(6, 3)
    assert (p.m, p.odd, p.p, p.gamma) == (1, True, F(2), F(2))


@pytest.mark.parametrize("N,k", [(1, 1), (3, 3), (2, 0)])
def test_params_reject_invalid_dimension_order(N, k):
    with pytest.raises(ParameterRangeError):
        ProblemParams(N, k)


def test_params_reject_small_a_and_bad_radius():
    with pytest.raises(ParameterRangeError):
        ProblemParams(4, 2, a=F(1, 2))
    with pytest.raises(ParameterRangeError):
        ProblemParams(4, 2, R=0)


def test_origin_and_boundary_constants_at_n4_k2():
    p = ProblemParams(4, 2)
    assert critical_origin_constant(p).exact_value() == 1
    assert critical_boundary_constant(p).exact_value() == F(9, 16)


def test_constant_vanishes_outside_the_window():
    assert critical_constant(ProblemParams(4, 2, F(5))).exact_value() == 0
    assert critical_constant(ProblemParams(4, 2, F(3, 2))).exact_value() == 0


def test_interior_gamma_has_no_closed_form():
    with pytest.raises(ParameterRangeError):
        critical_constant(ProblemParams(4, 2, F(3)))


def test_render_and_decimal():
    c = ExactConstant(F(8, 9), F(3, 2))
    assert c.render() == "8/9^(3/2)"
    assert c.exact_value() is None
    assert abs(float(c) - (8 / 9) ** 1.5) < 1e-15
    assert str(ExactConstant(F(9, 4), F(1, 2)).exact_value()) == "3/2"


def test_ordering_needs_common_exponent():
    a, b = ExactConstant(2, 2), ExactConstant(3, 2)
    assert a < b and b > a and a <= a
    with pytest.raises(TypeError):
        _ = a < ExactConstant(3, 3)


def test_subcritical_constant_window_and_value():
    # k = 1, p = 2: the Hardy constant ((N - 2)/2)^2
    assert subcritical_rellich_constant(5, 1, 2).exact_value() == F(9, 4)
    with pytest.raises(ParameterRangeError):
        subcritical_rellich_constant(4, 2, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 12), st.fractions(F(11, 10), F(5)))
def test_subcritical_constant_tends_to_zero_at_the_critical_end(N, p):
    # the first factor N - 2p vanishes at p = N/2, so A shrinks as p approaches it
    k = 2
    hi = F(N, k)
    if not 1 < p < hi:
        return
    close = hi - (hi - 1) / 1000
    assert subcritical_rellich_constant(N, k, close).base < subcritical_rellich_constant(N, k, p).base or p > close


def test_davies_hinz_window():
    assert davies_hinz_constant(8, 0, 2, 3).base == 1
    with pytest.raises(ParameterRangeError):
        davies_hinz_constant(8, 2, 2, 8)


def test_chain_constants_relation():
    # E(alpha) = D(alpha + p) (N - alpha - p)/p
    N, m, p, a = 9, 1, F(2), F(0)
    assert chain_constant_E(N, m, p, a).base == chain_constant_D(N, m, p, a + p).base * (N - a - p) / p


def test_hardy_weight_constant_rejects_small_beta():
    assert hardy_weight_constant(2, 0).exact_value() == F(1, 4)
    with pytest.raises(ParameterRangeError):
        hardy_weight_constant(2, F(-2))


def test_gap_report_n8():
    rep = gap_analysis(2)
    assert (rep.A_squared, rep.R_rad, rep.ratio) == (100, 576, F(25, 144))
    d = rep.to_dict()
    assert d["chains"]["ours_product"] == "576" and d["chains"]["adimurthi_santra_product"] == "100"


def test_earlier_constant_only_for_n_equal_4m():
    with pytest.raises(ParameterRangeError):
        adimurthi_santra_constant(9, 2)


def test_perturbed_constant_is_detected():
    good = critical_origin_constant(ProblemParams(8, 4)).exact_value()
    assert good == 576 and good + F(1, 10**9) != 576
