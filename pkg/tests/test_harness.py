import json
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rellich.exact import ParameterRangeError, ProblemParams
from rellich.harness import (
    SAMPLERS,
    Margin,
    chain_factors,
    chain_products_match_gap,
    check_h1to0,
    check_lap_hardy2,
    check_musina,
    check_new_hardy,
    check_nonsharp_critical,
    random_test_function,
    run_case,
    run_harness,
    sample_transform_cases,
    scaling_identity_check,
    gap_chain_check,
    special_alphas,
    transform_equivalence,
)
from rellich.harness.transform import GaussianProfile, IdentityCheck, Transform


def test_margin_tolerance_rule():
    assert Margin("x", 1.0 + 5e-9, 1.0, 0.0).passed()
    assert not Margin("x", 1.0 + 5e-8, 1.0, 0.0).passed()
    assert Margin("x", 1.0 + 5e-8, 1.0, 1e-7).passed()
    with pytest.raises(ValueError):
        Margin("x", 1.0, 1.0, -1.0)


@settings(max_examples=8, deadline=None)
@given(st.fractions(F(1, 4), F(4), max_denominator=8), st.integers(0, 10**6))
def test_margins_are_homogeneous_of_degree_p(c, seed):
    u = random_test_function(seed, 2, 2)
    for check, args, p in ((check_new_hardy, (3, F(3, 2)), F(3, 2)), (check_musina, (4, F(5, 2), F(1)), F(5, 2))):
        m1, m2 = check(u, *args), check(u.scaled(c), *args)
        scale = float(c) ** float(p)
        assert math.isclose(m2.lhs, scale * m1.lhs, rel_tol=1e-12)
        assert math.isclose(m2.rhs, scale * m1.rhs, rel_tol=1e-12)


def test_raising_a_constant_past_the_slack_fails():
    m = check_h1to0(random_test_function(3, 1, 2), 5, F(2), F(0))
    assert m.passed()
    ratio = m.rhs / m.lhs
    bumped = Margin(m.inequality_id, m.lhs * ratio * 1.001, m.rhs, m.quad_error)
    assert not bumped.passed()


def test_parameter_windows_are_enforced():
    u = random_test_function(1)
    with pytest.raises(ParameterRangeError):
        check_new_hardy(u, 3, F(4))
    with pytest.raises(ParameterRangeError):
        check_h1to0(u, 3, F(2), F(-1))
    with pytest.raises(ParameterRangeError):
        check_nonsharp_critical(u, 4, 2, a=F(1, 2))


def test_lap_hardy2_passes_on_a_random_function():
    assert check_lap_hardy2(random_test_function(7, 2, 3), 6).passed()


def test_run_case_is_deterministic_and_order_free():
    a = run_case(42, "musina", 5)
    b = run_case(42, "musina", 5)
    assert a == b
    assert run_case(43, "musina", 5) != a


def test_small_harness_report_round_trips():
    names = ["new_hardy", "h1to0", "nscr_p_a10"]
    rep = run_harness(seed=42, cases=4, names=names, workers=1)
    assert rep.all_passed and list(rep.summaries) == names
    text = rep.to_json()
    assert json.dumps(json.loads(text), indent=2, ensure_ascii=False) == text


def test_unknown_inequality_rejected():
    with pytest.raises(ValueError):
        run_harness(cases=1, names=["nope"])


def test_sampler_list_covers_every_check_family():
    assert len(SAMPLERS) == 18
    for key in ("gene_main_I", "gene_main_IV", "lim_ineq_half", "lim_ineq_full", "nscr_p_a_decreasing"):
        assert key in SAMPLERS


def test_transform_is_a_bijection():
    tr = Transform(1.5, 2.0)
    for r in (0.01, 0.7, 1.99):
        assert math.isclose(tr.r_of_t(tr.t_of_r(r)), r, rel_tol=1e-13)


def test_transform_special_alphas_and_identities():
    a1, a2 = special_alphas(7, F(2))
    assert (a1, a2) == (F(3), F(1))
    rep = transform_equivalence(GaussianProfile((1.0, -0.5)), F(2), a2, 7)
    assert rep.beta == 0 and rep.passed()
    assert all(c.rel_diff < 1e-12 for c in rep.identities)


def test_identity_check_flags_a_perturbed_side():
    assert not IdentityCheck("x", 1.0, 1.0 + 1e-7, 0.0).holds(1e-8)


def test_transform_cases_are_seeded():
    a, b = sample_transform_cases(42, 4), sample_transform_cases(42, 4)
    assert a == b and a[0][2] == special_alphas(a[0][0], a[0][1])[0]


def test_scaling_identities_at_critical_n_equals_2p():
    u = random_test_function(11, 1, 3)
    rep = scaling_identity_check(u, ProblemParams(4, 2), 0.5, -0.5)
    assert rep.passed() and rep.bound is not None
    assert rep.identities[0].rel_diff <= 1e-10


def test_chain_products_and_margins():
    assert chain_products_match_gap(8)
    vec, lapw, rad = chain_factors(8).values()
    assert math.prod(rad) == 144
    margins = gap_chain_check(random_test_function(5, 2, 3))
    assert len(margins) == 10 and all(m.passed() for m in margins)


def test_chain_needs_enough_boundary_vanishing():
    with pytest.raises(ValueError):
        gap_chain_check(random_test_function(5, 2, 2))
