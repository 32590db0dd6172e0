import math
from fractions import Fraction as F

import numpy as np
import pytest
import scipy.linalg as sla
from sklearn.base import clone

from rellich.exact import ParameterRangeError, ProblemParams, critical_constant
from rellich.minimizer import (
    CriticalRellichMinimizer,
    DiscreteGrid,
    assemble,
    default_windows,
    min_eigen,
    minimize_quotient_general_p,
    refine_coefficients,
    refinement_study,
)
from rellich.profiles import make_phi_eps


def test_grid_invariants_and_nesting():
    g = DiscreteGrid.log_uniform(1e-3, 30, 0.05)
    assert g.t_min <= 1e-3 and g.t_max >= 30 and g.n >= 16
    wide = DiscreteGrid.log_uniform(1e-5, 3000, 0.05)
    assert np.all(np.isin(np.round(g.x / g.dx), np.round(wide.x / wide.dx)))
    with pytest.raises(ParameterRangeError):
        DiscreteGrid.log_uniform(1.0, 1.1, 0.05)
    with pytest.raises(ParameterRangeError):
        DiscreteGrid.log_uniform(2.0, 1.0)


def test_eigen_path_needs_p_two():
    with pytest.raises(ParameterRangeError):
        assemble(ProblemParams(6, 2), DiscreteGrid.log_uniform())


@pytest.mark.parametrize("N,k", [(2, 1), (4, 2), (6, 3), (8, 4)])
def test_stiffness_symmetric_semidefinite_and_mass_positive(N, k):
    pr = assemble(ProblemParams(N, k), DiscreteGrid.log_uniform(1e-2, 10, 0.05))
    K = pr.stiffness.toarray()
    assert np.allclose(K, K.T, rtol=0, atol=1e-12 * np.abs(K).max())
    assert np.all(pr.mass > 0)
    s = 1 / np.sqrt(pr.mass)
    assert np.linalg.eigvalsh(s[:, None] * K * s[None, :]).min() > 0


def test_zero_padding_into_a_wider_window_keeps_the_quotient():
    params = ProblemParams(4, 2, F(3))
    small = assemble(params, DiscreteGrid.log_uniform(1e-2, 10, 0.05))
    big = assemble(params, DiscreteGrid.log_uniform(1e-3, 100, 0.05))
    v = np.random.default_rng(0).standard_normal(len(small.t))
    off = int(round((math.log(small.t[0]) - math.log(big.t[0])) / 0.05))
    w = np.zeros(len(big.t))
    w[off: off + len(v)] = v
    assert math.isclose(small.quotient(v), big.quotient(w), rel_tol=1e-12)


@pytest.mark.parametrize("gamma", [F(2), F(3), F(4)])
def test_banded_inverse_iteration_matches_dense_solver(gamma):
    pr = assemble(ProblemParams(4, 2, gamma), DiscreteGrid.log_uniform(1e-3, 30, 0.05))
    res = min_eigen(pr)
    # dense eigenvalues carry eps * ||K|| absolute error (K reaches 1e15 here), so compare
    # Rayleigh quotients of the dense eigenvectors, which are accurate to second order
    _, vec = sla.eigh(pr.stiffness.toarray(), np.diag(pr.mass), subset_by_index=[0, 1])
    rq = [pr.quotient(vec[:, i]) for i in range(2)]
    assert math.isclose(res.value, rq[0], rel_tol=1e-9)
    assert math.isclose(res.second_value, rq[1], rel_tol=1e-6)
    assert res.converged and res.residual <= 1e-10


def test_first_order_sanity_value_approaches_quarter():
    st = refinement_study(ProblemParams(2, 1), levels=5)
    vals = st.values
    assert st.reference == 0.25
    assert all(a > b for a, b in zip(vals, vals[1:])) and all(v > 0.25 for v in vals)
    assert vals[-1] < 0.27


def test_study_needs_three_levels_and_reports_richardson():
    params = ProblemParams(4, 2, F(3))
    with pytest.raises(ParameterRangeError):
        refinement_study(params, levels=2)
    st = refinement_study(params, levels=3, dx=0.05, richardson=True)
    head = st.to_csv().splitlines()[0]
    assert head == "level,n,t_min,t_max,value,indicator,richardson"
    r = st.rows[-1]
    assert abs(r.richardson - r.value) < 0.05 * r.value


def test_default_windows_grow_toward_the_escaping_end():
    w_origin = default_windows(ProblemParams(4, 2, F(2)), 3)
    w_bdry = default_windows(ProblemParams(4, 2, F(4)), 3)
    assert w_origin[0][0] == w_origin[2][0] and w_origin[2][1] > w_origin[0][1]
    assert w_bdry[0][1] == w_bdry[2][1] and w_bdry[2][0] < w_bdry[0][0]


def test_profile_csv_has_two_columns():
    res = min_eigen(assemble(ProblemParams(4, 2, F(3)), DiscreteGrid.log_uniform(1e-2, 10, 0.05)))
    lines = res.profile_csv().splitlines()
    assert lines[0] == "t,value" and len(lines) == len(res.t) + 1
    assert max(abs(res.profile)) == 1.0


def test_spline_path_agrees_with_eigen_path_at_p_two():
    params = ProblemParams(4, 2, F(3))
    eig = min_eigen(assemble(params, DiscreteGrid.log_uniform(1e-3, 1e3, 0.02))).value
    spl = minimize_quotient_general_p(params, 48, t_min=1e-3, t_max=1e3).value
    assert abs(spl / eig - 1) < 0.01


def test_spline_bases_nest():
    params = ProblemParams(5, 2, F(5, 2))
    coarse = minimize_quotient_general_p(params, 20, t_min=1e-3, t_max=1e6)
    init = refine_coefficients(params, coarse.coefficients, 20, 1e-3, 1e6, 2 * (20 - 3) + 3)
    fine = minimize_quotient_general_p(params, 37, init=init, t_min=1e-3, t_max=1e6)
    assert fine.value <= coarse.value * (1 + 1e-12)


def test_phi_start_lands_within_five_percent_at_gamma_p():
    params = ProblemParams(4, 2)
    res = minimize_quotient_general_p(params, 48, init=make_phi_eps(params, F(1, 20)), t_min=1e-3, t_max=1e13)
    assert 1.0 <= res.value <= 1.05


@pytest.mark.parametrize("N,k", [(4, 2), (6, 2), (5, 2)])
def test_spline_values_stay_above_the_sharp_constants(N, k):
    for gamma, window in ((F(N, k), (1e-3, 1e12)), (F(N), (1e-12, 30.0))):
        params = ProblemParams(N, k, gamma)
        c = float(critical_constant(params))
        res = minimize_quotient_general_p(params, 32, t_min=window[0], t_max=window[1])
        assert res.value >= c * (1 - 1e-8)
        assert "upper bound" in res.notes[0]


def test_constants_raised_by_ten_percent_are_violated():
    origin = ProblemParams(4, 2, F(2))
    bdry = ProblemParams(4, 2, F(4))
    assert minimize_quotient_general_p(origin, 48, t_max=1e14).value < 1.1 * float(critical_constant(origin))
    assert minimize_quotient_general_p(bdry, 48, t_min=1e-14).value < 1.1 * float(critical_constant(bdry))


def test_estimator_wrapper():
    est = CriticalRellichMinimizer(N=4, k=2, gamma=3, levels=3, dx=0.05)
    assert clone(est).get_params()["levels"] == 3
    est.fit()
    assert est.study_ is not None and est.value_ == est.study_.values[-1]
    est2 = CriticalRellichMinimizer(N=6, k=2, basis_size=20).fit()
    assert est2.study_ is None and est2.value_ > 0
