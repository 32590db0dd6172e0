import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.integrate import quad

from rellich.logterm import TermSum
from rellich.profiles import RadialProfile
from rellich.quadrature import CompiledSum, DivergentIntegralError, gauss_kronrod, integrate_radial, integrate_t


def test_gauss_kronrod_smooth_against_scipy():
    f = lambda x: np.exp(-x) * np.cos(3 * x)
    res = gauss_kronrod(f, 0.0, 4.0, tol=1e-12)
    ref = quad(lambda x: math.exp(-x) * math.cos(3 * x), 0, 4, epsabs=0, epsrel=1e-13)[0]
    assert res.converged and abs(res.value - ref) <= 1e-12 * abs(ref)
    assert res.abs_error_estimate <= 1e-10 * abs(ref)


def test_integrate_t_algebraic_endpoints():
    # int_0^inf t^(-1/2) / (1 + t) dt = pi
    res = integrate_t(lambda t: t**-0.5 / (1 + t), tol=1e-11)
    assert abs(res.value - math.pi) <= 1e-10 * math.pi


def test_integrate_t_slow_tail_via_log_integrand():
    # int_1^inf t^(-1 - 0.05) dt = 20
    res = integrate_t(log_f=lambda lt: -1.05 * lt, support=(1.0, math.inf), tol=1e-11)
    assert abs(res.value - 20.0) <= 1e-9 * 20


def test_radial_integral_against_scipy():
    N = 3
    u = RadialProfile([(F(0), F(1), TermSum.polynomial([1, 0, -1], N, bdry_power=1))], N, 1, smoothness=6)
    res = integrate_radial([(u, 2)], log_weight=(1, -2), r_power=-N, tol=1e-12)
    # in t = log(1/r): int_0^inf (1 - e^(-2t))^4 t^-2 dt
    f = lambda t: (-math.expm1(-2 * t)) ** 4 / t**2
    ref = quad(f, 0, 1, epsrel=1e-13)[0] + quad(f, 1, math.inf, epsrel=1e-13, limit=200)[0]
    assert abs(res.value - ref) <= 1e-10 * ref


def test_divergent_mass_is_reported():
    N = 2
    u = RadialProfile([(F(0), F(1), TermSum.monomial(N, log_power=F(1, 2), bdry_power=1))], N, 1, smoothness=4)
    with pytest.raises(DivergentIntegralError):
        integrate_radial([(u, 2)], r_power=-N, log_weight=(1, -2), tol=1e-10)


def test_compiled_sum_centred_evaluation_keeps_relative_precision():
    # (1 - r^2)^3 near r = 1 cancels badly in the monomial basis
    ts = TermSum.polynomial([1, 0, -3, 0, 3, 0, -1], 2)
    comp = CompiledSum(ts, center=F(19, 20))
    r = 0.999
    t = -math.log(r)
    assert math.isclose(float(comp(t)), (1 - r * r) ** 3, rel_tol=1e-10)
