"""Margins of the supporting Hardy, Rellich and Hardy-Rellich inequalities on test functions.

Every inequality is written as lhs <= rhs with both sides as radial integrals
(the sphere factor omitted on both sides). ``t`` below is log(R/r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..exact import (
    ParameterRangeError,
    ProblemParams,
    as_fraction,
    chain_constant_D,
    chain_constant_E,
    critical_origin_constant,
    davies_hinz_constant,
)
from ..logterm import radial_laplacian
from ..profiles import RadialProfile, kth_derivative_profile
from ..quadrature import QuadratureResult, integrate_radial
from .testfunctions import TestFunction

DEFAULT_TOL = 1e-10


@dataclass
class Margin:
    inequality_id: str
    lhs: float
    rhs: float
    quad_error: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.quad_error < 0:
            raise ValueError("quad_error must be >= 0")

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def passed(self, rel: float = 1e-8) -> bool:
        return self.slack >= -(self.quad_error + rel * abs(self.rhs))

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "quad_error": self.quad_error,
            "params": dict(self.params),
        }


class _Side:
    """Linear combination of integrals with an accumulated error bound."""

    def __init__(self):
        self.value = 0.0
        self.err = 0.0

    def add(self, coeff: float, res: QuadratureResult | float):
        if isinstance(res, QuadratureResult):
            self.value += coeff * res.value
            self.err += abs(coeff) * res.abs_error_estimate
        else:
            self.value += coeff * res
        return self


def _integral(prof: RadialProfile, p, r_power=0, log_power=0, a=1, measure_power=None, tol=DEFAULT_TOL):
    """Integral of |prof|^p r^r_power log(aR/r)^log_power r^(N-1) dr (or r^measure_power dr)."""
    lw = None if log_power == 0 else (float(a), float(log_power))
    return integrate_radial([(prof, as_fraction(p))], r_power=as_fraction(r_power), log_weight=lw,
                            tol=tol, measure_power=measure_power)


def _derivative(prof: RadialProfile) -> RadialProfile:
    return prof.derivative(1)


def _laplacian(prof: RadialProfile) -> RadialProfile:
    return prof.map(radial_laplacian, smoothness=prof.smoothness - 2)


def _fmt(d: dict) -> dict:
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in d.items()}


def _margin(ident, lhs: _Side, rhs: _Side, **params) -> Margin:
    return Margin(ident, lhs.value, rhs.value, lhs.err + rhs.err, _fmt(params))


def _need_origin_free(u: TestFunction, why: str):
    if u.origin_cutoff is None:
        raise ParameterRangeError(f"{why} needs a test function vanishing near the origin")


# first order ----------------------------------------------------------------------


def check_new_hardy(u: TestFunction, N: int, p, R=1, tol=DEFAULT_TOL) -> Margin:
    """((p-1)/p)^p int |u|^p r^-p t^-p + phi_{N,p}(u) <= int |u'|^p, 1 < p <= N."""
    p = as_fraction(p)
    if not (1 < p <= N):
        raise ParameterRangeError(f"need 1 < p <= N, got p={p}, N={N}")
    prof = u.profile(N, R)
    c = (p - 1) / p
    lhs = _Side().add(_pow(c, p), _integral(prof, p, -p, -p, tol=tol))
    if p != N:
        lhs.add(float(N - p) * float(c) ** float(p - 1), _integral(prof, p, -p, 1 - p, tol=tol))
    rhs = _Side().add(1.0, _integral(_derivative(prof), p, tol=tol))
    return _margin("new_hardy", lhs, rhs, N=N, p=p)


def gh_remainder(prof: RadialProfile, N: int, p, alpha, beta, tol=DEFAULT_TOL) -> tuple[float, QuadratureResult | float]:
    """(coefficient, integral) of the remainder psi_{N,p,alpha,beta}.

    The alpha = N - p branch carries an unspecified constant and is dropped.
    """
    p, alpha, beta = as_fraction(p), as_fraction(alpha), as_fraction(beta)
    if alpha == N - p:
        return 0.0, 0.0
    c = float((beta + p - 1) / p)
    coeff = float(N - p - alpha) * c ** float(p - 1)
    if coeff == 0.0:
        return 0.0, 0.0
    return coeff, _integral(prof, p, -p - alpha, 1 - beta - p, tol=tol)


def check_gh(u: TestFunction, N: int, p, alpha, beta, R=1, tol=DEFAULT_TOL) -> Margin:
    """((beta+p-1)/p)^p int |u|^p r^(-alpha-p) t^(-beta-p) + psi~ <= int |u'|^p r^-alpha t^-beta."""
    p, alpha, beta = as_fraction(p), as_fraction(alpha), as_fraction(beta)
    if p <= 1:
        raise ParameterRangeError("need p > 1")
    if beta < 1 - p:
        raise ParameterRangeError(f"need beta >= 1-p, got beta={beta}")
    if alpha > N - p:
        _need_origin_free(u, "alpha > N - p")
    prof = u.profile(N, R)
    c = float((beta + p - 1) / p)
    lhs = _Side()
    if c > 0:
        lhs.add(c ** float(p), _integral(prof, p, -alpha - p, -beta - p, tol=tol))
        coeff, res = gh_remainder(prof, N, p, alpha, beta, tol)
        lhs.add(coeff, res)
    rhs = _Side().add(1.0, _integral(_derivative(prof), p, -alpha, -beta, tol=tol))
    return _margin("gh_pre", lhs, rhs, N=N, p=p, alpha=alpha, beta=beta)


def check_lap_hardy(u: TestFunction, N: int, p, alpha, beta, R=1, two_term: bool = False,
                    tol=DEFAULT_TOL) -> Margin:
    """((beta+p-1)/p)^p int |u'|^p r^(-alpha-p) t^(-beta-p) <= int |Delta u|^p r^-alpha t^-beta.

    ``two_term`` adds the lower-order term (N - alpha - Np)((beta+p-1)/p)^(p-1)
    int |u'|^p r^(-alpha-p) t^(-beta-p+1) produced by applying the first order
    inequality to r^(N-1) u'.
    """
    p, alpha, beta = as_fraction(p), as_fraction(alpha), as_fraction(beta)
    if p <= 1 or beta < 1 - p:
        raise ParameterRangeError("need p > 1 and beta >= 1-p")
    prof = u.profile(N, R)
    du = _derivative(prof)
    c = float((beta + p - 1) / p)
    lhs = _Side()
    if c > 0:
        lhs.add(c ** float(p), _integral(du, p, -alpha - p, -beta - p, tol=tol))
        if two_term:
            lhs.add(float(N - alpha - N * p) * c ** float(p - 1), _integral(du, p, -alpha - p, 1 - beta - p, tol=tol))
    rhs = _Side().add(1.0, _integral(_laplacian(prof), p, -alpha, -beta, tol=tol))
    ident = "lap_hardy_two_term" if two_term else "lap_hardy"
    return _margin(ident, lhs, rhs, N=N, p=p, alpha=alpha, beta=beta)


def check_lap_hardy2(u: TestFunction, N: int, R=1, tol=DEFAULT_TOL) -> Margin:
    """1/4 int |u'|^2 r^-2 t^-2 + (N-2)/2 int |u'|^2 r^-2 t^-1 <= int |Delta u|^2."""
    prof = u.profile(N, R)
    du = _derivative(prof)
    lhs = _Side().add(0.25, _integral(du, 2, -2, -2, tol=tol)).add((N - 2) / 2, _integral(du, 2, -2, -1, tol=tol))
    rhs = _Side().add(1.0, _integral(_laplacian(prof), 2, tol=tol))
    return _margin("lap_hardy2", lhs, rhs, N=N, p=2)


# higher order chains --------------------------------------------------------------


def _jp_product(p: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for j in range(1, n + 1):
        out *= (j * p - 1) / p
    return out


def _pow(x: Fraction, p: Fraction) -> float:
    return float(x**p) if p.denominator == 1 else float(x) ** float(p)


def check_gene_main(u: TestFunction, N: int, p, m: int, variant: str, alpha, R=1, tol=DEFAULT_TOL) -> Margin:
    """The four chained lower bounds for int |nabla^k u|^p r^-alpha, k = 2m (I, II) or 2m+1 (III, IV).

    The Davies-Hinz factor in the II/IV remainder uses the exponent the chain
    actually passes through: 2(m-1)p + alpha (II) and (2m-1)p + alpha (IV).
    """
    p, alpha = as_fraction(p), as_fraction(alpha)
    variant = variant.upper()
    if m < 1:
        raise ParameterRangeError("need m >= 1")
    odd = variant in ("III", "IV")
    k = 2 * m + (1 if odd else 0)
    prof = u.profile(N, R)
    lhs = _Side()

    def remainder(coeff_pow: Fraction, a1, b1):
        coeff, res = gh_remainder(prof, N, p, a1, b1, tol)
        lhs.add(_pow(coeff_pow, p) * coeff, res)

    if variant in ("I", "III"):
        if alpha > N - k * p:
            raise ParameterRangeError(f"variant {variant} needs alpha <= N - {k}p")
        lhs.add(_pow(_jp_product(p, k), p), _integral(prof, p, -alpha - k * p, -k * p, tol=tol))
        remainder(_jp_product(p, k - 1), alpha + (k - 1) * p, (k - 1) * p)
    elif variant == "II":
        D = chain_constant_D(N, m, p, alpha).base
        C = davies_hinz_constant(N, m - 1, p, 2 * (m - 1) * p + alpha).base
        K = (N * p - N + alpha + 2 * (m - 1) * p) / p
        lhs.add(_pow(D, p), _integral(prof, p, -alpha - 2 * m * p, -p, tol=tol))
        remainder(K / C, alpha + (2 * m - 1) * p, 0)
    elif variant == "IV":
        E = chain_constant_E(N, m, p, alpha).base
        C = davies_hinz_constant(N, m - 1, p, (2 * m - 1) * p + alpha).base
        K = (N * p - N + alpha + 2 * m * p - p) * (N - alpha - p) / p**2
        lhs.add(_pow(E, p), _integral(prof, p, -alpha - (2 * m + 1) * p, -p, tol=tol))
        remainder(K / C, alpha + 2 * m * p, 0)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    rhs = _Side().add(1.0, _integral(kth_derivative_profile(prof, k), p, -alpha, tol=tol))
    return _margin(f"gene_main_{variant}", lhs, rhs, N=N, p=p, m=m, alpha=alpha)


def check_davies_hinz(u: TestFunction, N: int, p, m: int, beta, R=1, tol=DEFAULT_TOL) -> Margin:
    """int |u|^p r^-beta <= C^p int |Delta^m u|^p r^(2mp - beta)."""
    p, beta = as_fraction(p), as_fraction(beta)
    C = davies_hinz_constant(N, m, p, beta).base
    prof = u.profile(N, R)
    lhs = _Side().add(1.0, _integral(prof, p, -beta, tol=tol))
    rhs = _Side().add(_pow(C, p), _integral(kth_derivative_profile(prof, 2 * m), p, 2 * m * p - beta, tol=tol))
    return _margin("davies_hinz", lhs, rhs, N=N, p=p, m=m, beta=beta)


def check_musina(u: TestFunction, N: int, p, delta, R=1, tol=DEFAULT_TOL) -> Margin:
    """|N - (N+delta)/p|^p int r^(delta-p) |u'|^p <= int r^delta |Delta u|^p."""
    p, delta = as_fraction(p), as_fraction(delta)
    if p <= 1:
        raise ParameterRangeError("need p > 1")
    if delta <= -N:
        raise ParameterRangeError("need delta > -N for finite integrals")
    prof = u.profile(N, R)
    c = abs(N - (N + delta) / p)
    lhs = _Side().add(_pow(c, p), _integral(_derivative(prof), p, delta - p, tol=tol))
    rhs = _Side().add(1.0, _integral(_laplacian(prof), p, delta, tol=tol))
    return _margin("musina", lhs, rhs, N=N, p=p, delta=delta)


def check_h1to0(u: TestFunction, N: int, p, delta, R=1, tol=DEFAULT_TOL) -> Margin:
    """((N+delta)/p - 1)^p int r^(delta-p) |u|^p <= int r^delta |u'|^p, p < N + delta."""
    p, delta = as_fraction(p), as_fraction(delta)
    if not (1 < p < N + delta):
        raise ParameterRangeError(f"need 1 < p < N + delta, got p={p}, delta={delta}")
    prof = u.profile(N, R)
    lhs = _Side().add(_pow((N + delta) / p - 1, p), _integral(prof, p, delta - p, tol=tol))
    rhs = _Side().add(1.0, _integral(_derivative(prof), p, delta, tol=tol))
    return _margin("h1to0", lhs, rhs, N=N, p=p, delta=delta)


def check_1dim_hardy(w: TestFunction, p, a_exp, R=1, tol=DEFAULT_TOL) -> Margin:
    """|(a+1-p)/p|^p int_0^R r^(a-p) |w|^p dr <= int_0^R r^a |w'|^p dr, w(0) = w(R) = 0."""
    p, a_exp = as_fraction(p), as_fraction(a_exp)
    _need_origin_free(w, "the one-dimensional inequality")
    prof = w.profile(2, R)
    c = abs((a_exp + 1 - p) / p)
    lhs = _Side()
    if c:
        lhs.add(_pow(c, p), _integral(prof, p, a_exp - p, measure_power=0, tol=tol))
    rhs = _Side().add(1.0, _integral(_derivative(prof), p, a_exp, measure_power=0, tol=tol))
    return _margin("one_dim_hardy", lhs, rhs, p=p, a=a_exp)


def check_nonsharp_critical(u: TestFunction, N: int, k: int, a=1, R=1, tol=DEFAULT_TOL) -> Margin:
    """R^rad_{k,p} int |u|^p r^-N log(aR/r)^-p <= int |nabla^k u|^p, p = N/k, a >= 1."""
    params = ProblemParams(N, k, R=R)
    if float(a) < 1:
        raise ParameterRangeError("need a >= 1")
    p = params.p
    prof = u.profile(N, R)
    const = float(critical_origin_constant(params))
    lhs = _Side().add(const, _integral(prof, p, -N, -p, a=a, tol=tol))
    rhs = _Side().add(1.0, _integral(kth_derivative_profile(prof, k), p, tol=tol))
    return _margin("nscr_p", lhs, rhs, N=N, k=k, p=p, a=float(a))


def check_lim_ineq(u: TestFunction, N: int, A_exp, R=1, tol=DEFAULT_TOL) -> Margin:
    """(2A/N)^(N/2) int |u|^(N/2) r^-N t^(-1-A) <= int |u'|^(N/2) r^(-N/2) t^(N/2-A-1)."""
    A_exp = as_fraction(A_exp)
    p = Fraction(N, 2)
    if p <= 1 or A_exp <= 0:
        raise ParameterRangeError("need N > 2 and A > 0")
    prof = u.profile(N, R)
    lhs = _Side().add(_pow(2 * A_exp / N, p), _integral(prof, p, -N, -1 - A_exp, tol=tol))
    rhs = _Side().add(1.0, _integral(_derivative(prof), p, -p, p - A_exp - 1, tol=tol))
    return _margin("lim_ineq", lhs, rhs, N=N, p=p, A=A_exp)
