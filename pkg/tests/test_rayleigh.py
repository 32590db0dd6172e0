import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.integrate import quad
from sklearn.base import clone

from rellich.exact import ParameterRangeError, ProblemParams
from rellich.logterm import TermSum
from rellich.profiles import CutoffSpec, RadialProfile, SmoothnessError, make_phi_eps, make_psi_eps
from rellich.rayleigh import EpsilonSweep, epsilon_sweep, extrapolate, rayleigh_quotient


def _bubble(N):
    # (1 - r^2)^3
    return RadialProfile([(F(0), F(1), TermSum.polynomial([1], N, bdry_power=3))], N, 1, smoothness=8)


def test_quotient_of_polynomial_bubble_against_scipy():
    N = 4
    params = ProblemParams(N, 2, F(3))
    q = rayleigh_quotient(_bubble(N), params, tol=1e-12)

    def lap(s):  # Laplacian of g(r^2) with g = (1 - s)^3
        return 24 * s * (1 - s) - 6 * N * (1 - s) ** 2

    # both integrals in t = log(1/r), r = e^-t
    num = quad(lambda t: lap(math.exp(-2 * t)) ** 2 * math.exp(-N * t), 0, math.inf, epsrel=1e-13, limit=200)[0]
    den_f = lambda t: (-math.expm1(-2 * t)) ** 6 * t**-3
    den = quad(den_f, 0, 1, epsrel=1e-13)[0] + quad(den_f, 1, math.inf, epsrel=1e-13)[0]
    assert abs(q - num / den) <= 1e-9 * q


def test_profile_evaluation_in_r_and_t_agree():
    u = make_phi_eps(ProblemParams(4, 2), F(1, 10))
    for r in (0.1, 0.6, 0.7):
        assert u(r) == u.value_at_t(-math.log(r)) or math.isclose(u(r), u.value_at_t(-math.log(r)), rel_tol=1e-14)
    # far inside, where r itself underflows
    assert math.isclose(u.value_at_t(1e4), 1e4 ** 0.4, rel_tol=1e-12)


def test_cutoff_too_rough_is_rejected():
    with pytest.raises(SmoothnessError):
        make_phi_eps(ProblemParams(4, 2), F(1, 10), cutoff=CutoffSpec(F(1, 2), F(3, 4), 2))


def test_family_exponent_window():
    with pytest.raises(ParameterRangeError):
        make_phi_eps(ProblemParams(4, 2), F(1, 2))
    with pytest.raises(ParameterRangeError):
        make_psi_eps(ProblemParams(4, 2), F(0))


def test_extrapolate_recovers_known_limit():
    eps = [0.2, 0.1, 0.05, 0.025]
    q = [2.0 + 3 * e + 5 * e * e for e in eps]
    limit, fitted, used = extrapolate(eps, q)
    assert used == 1.0 and abs(limit - 2.0) < 1e-12 and abs(fitted - 1) < 0.25


def test_sweep_rejects_non_decreasing_eps():
    with pytest.raises(ParameterRangeError):
        epsilon_sweep("phi", ProblemParams(4, 2), [F(1, 10), F(1, 5)])


def test_sweep_quotients_decrease_toward_origin_constant():
    res = epsilon_sweep("phi", ProblemParams(4, 2), [F(1, 5), F(1, 10), F(1, 20)])
    q = [r.quotient for r in res.rows]
    assert q[0] > q[1] > q[2] > 1.0
    assert res.to_csv().splitlines()[0] == "epsilon,quotient,quad_error,extrapolated"


def test_sweep_estimator_is_clonable_and_predicts():
    est = EpsilonSweep(family="psi", N=4, k=2, gamma=4, eps_list=[F(1, 5), F(1, 10), F(1, 20)])
    assert clone(est).get_params()["family"] == "psi"
    est.fit()
    pred = est.predict([F(1, 10)])
    assert np.isclose(pred[0], est.rows_[1].quotient, rtol=1e-10)
