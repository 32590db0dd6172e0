"""Rayleigh quotients of closed-form radial profiles and epsilon sweeps."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq
from sklearn.base import BaseEstimator

from .exact import ParameterRangeError, ProblemParams, as_fraction, critical_constant
from .profiles import RadialProfile, family, kth_derivative_profile
from .quadrature import DivergentIntegralError, QuadratureResult, integrate_radial


@dataclass
class QuotientParts:
    numerator: QuadratureResult
    denominator: QuadratureResult

    @property
    def value(self) -> float:
        return self.numerator.value / self.denominator.value

    @property
    def rel_error(self) -> float:
        n, d = self.numerator, self.denominator
        return n.abs_error_estimate / abs(n.value) + d.abs_error_estimate / abs(d.value)

    @property
    def converged(self) -> bool:
        return self.numerator.converged and self.denominator.converged


def weighted_mass(u: RadialProfile, params: ProblemParams, tol: float = 1e-10) -> QuadratureResult:
    """Integral of |u|^p |x|^-N log(aR/|x|)^-gamma over the ball (sphere factor dropped)."""
    return integrate_radial([(u, params.p)], r_power=-params.N, log_weight=(params.a, -params.gamma), tol=tol)


def derivative_energy(u: RadialProfile, params: ProblemParams, tol: float = 1e-10) -> QuadratureResult:
    """Integral of |nabla^k u|^p over the ball (sphere factor dropped)."""
    return integrate_radial([(kth_derivative_profile(u, params.k), params.p)], tol=tol)


def quotient_parts(u: RadialProfile, params: ProblemParams, tol: float = 1e-10) -> QuotientParts:
    return QuotientParts(derivative_energy(u, params, tol), weighted_mass(u, params, tol))


def rayleigh_quotient(u: RadialProfile, params: ProblemParams, tol: float = 1e-10) -> float:
    return quotient_parts(u, params, tol).value


@dataclass
class SweepRow:
    epsilon: Fraction
    quotient: float
    quad_error: float
    converged: bool = True
    mass_divergent: bool = False

    def __post_init__(self):
        # an infinite weighted mass makes the quotient exactly zero
        if not (self.quotient > 0 or (self.mass_divergent and self.quotient == 0)):
            raise ValueError(f"quotient must be positive, got {self.quotient}")


def _fit_order(eps: Sequence[float], q: Sequence[float]) -> float:
    """Order a with q(e) ~ q0 + c e^a through three points."""
    e1, e2, e3 = eps
    target = (q[0] - q[1]) / (q[1] - q[2])
    if not np.isfinite(target) or target <= 0:
        raise ArithmeticError("sweep rows are not monotone; no convergence order")

    def g(a):
        return (e1**a - e2**a) / (e2**a - e3**a) - target

    lo, hi = 1e-3, 20.0
    if g(lo) * g(hi) > 0:
        raise ArithmeticError("convergence order outside (0, 20)")
    return brentq(g, lo, hi, xtol=1e-12)


def extrapolate(eps: Sequence[float], q: Sequence[float]) -> tuple[float, float, float]:
    """Limit at eps = 0 from the last three rows.

    Returns (limit, fitted order, order used). The fitted order is snapped to
    the nearest integer when within 1/4 of it; the limit then comes from the
    expansion q0 + c1 e^a + c2 e^(2a) through the three points.
    """
    if len(eps) < 3:
        raise ValueError("need at least three rows")
    e = [float(x) for x in eps[-3:]]
    v = [float(x) for x in q[-3:]]
    a_fit = _fit_order(e, v)
    a = float(round(a_fit)) if round(a_fit) >= 1 and abs(a_fit - round(a_fit)) <= 0.25 else a_fit
    A = np.array([[1.0, x**a, x ** (2 * a)] for x in e])
    q0 = float(np.linalg.solve(A, v)[0])
    return q0, a_fit, a


@dataclass
class SweepResult:
    family: str
    params: ProblemParams
    rows: list[SweepRow]
    extrapolated: float | None
    fitted_order: float | None
    order_used: float | None
    reference: Fraction | float | None = None
    notes: list[str] = field(default_factory=list)

    def running_extrapolation(self) -> list[float | None]:
        out: list[float | None] = []
        for i in range(len(self.rows)):
            if i < 2:
                out.append(None)
                continue
            sub = self.rows[i - 2: i + 1]
            if any(r.mass_divergent for r in sub):
                out.append(None)
                continue
            try:
                out.append(extrapolate([r.epsilon for r in sub], [r.quotient for r in sub])[0])
            except ArithmeticError:
                out.append(None)
        return out

    def relative_gap(self) -> float | None:
        if self.extrapolated is None or not self.reference:
            return None
        return abs(self.extrapolated / float(self.reference) - 1.0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon", "quotient", "quad_error", "extrapolated"])
        for row, ex in zip(self.rows, self.running_extrapolation()):
            w.writerow([str(row.epsilon), repr(row.quotient), repr(row.quad_error), "" if ex is None else repr(ex)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        p = self.params
        return {
            "family": self.family,
            "params": {"N": p.N, "k": p.k, "p": str(p.p), "gamma": str(p.gamma), "R": str(p.R), "a": str(p.a)},
            "rows": [
                {"epsilon": str(r.epsilon), "quotient": r.quotient, "quad_error": r.quad_error,
                 "converged": r.converged, "mass_divergent": r.mass_divergent}
                for r in self.rows
            ],
            "extrapolated": self.extrapolated,
            "fitted_order": self.fitted_order,
            "order_used": self.order_used,
            "reference": None if self.reference is None else float(self.reference),
            "relative_gap": self.relative_gap(),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def default_eps_list(params: ProblemParams) -> list[Fraction]:
    # higher orders carry a much larger cutoff energy, so go further down
    if params.k <= 2:
        return [Fraction(1, 5), Fraction(1, 10), Fraction(1, 20), Fraction(1, 40)]
    return [Fraction(1, 125), Fraction(1, 250), Fraction(1, 500), Fraction(1, 1000)]


def _reference(params: ProblemParams):
    g = params.gamma
    if g == params.p or g == params.N or g < params.p or g > params.N:
        c = critical_constant(params)
        return c.exact_value() if c.exact_value() is not None else float(c)
    return None


def epsilon_sweep(family_name: str, params: ProblemParams, eps_list: Sequence | None = None,
                  tol: float = 1e-10, adapted: bool = False) -> SweepResult:
    """Quotients of the phi or psi family along decreasing eps, extrapolated to eps = 0.

    The families keep their exponents (p-1)/p - eps and (N-1)/p + eps for
    every gamma. For gamma outside [p, N] the weighted mass then diverges
    once eps is small and the row records a zero quotient. With
    ``adapted=True`` the exponent is (gamma-1)/p -+ eps instead, which keeps
    the mass finite and lets the quotients decay like O(eps).
    """
    build = family(family_name)
    eps = [as_fraction(e) for e in (eps_list if eps_list is not None else default_eps_list(params))]
    if not eps or any(e <= 0 for e in eps):
        raise ParameterRangeError("eps values must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ParameterRangeError("eps values must be strictly decreasing")
    rows = []
    for e in eps:
        u = build(params, e, gamma=params.gamma if adapted else None)
        num = derivative_energy(u, params, tol)
        try:
            den = weighted_mass(u, params, tol)
        except DivergentIntegralError:
            rows.append(SweepRow(e, 0.0, 0.0, num.converged, mass_divergent=True))
            continue
        parts = QuotientParts(num, den)
        rows.append(SweepRow(e, parts.value, parts.rel_error * parts.value, parts.converged))
    ref = _reference(params)
    notes = []
    limit = a_fit = a_used = None
    if any(r.mass_divergent for r in rows):
        notes.append("weighted mass diverges on some rows; their quotient is 0")
        if rows[-1].mass_divergent:
            limit = 0.0
    elif len(rows) >= 3:
        try:
            limit, a_fit, a_used = extrapolate([r.epsilon for r in rows], [r.quotient for r in rows])
        except ArithmeticError as exc:
            notes.append(f"no extrapolation: {exc}")
    return SweepResult(family_name, params, rows, limit, a_fit, a_used, ref, notes)


class EpsilonSweep(BaseEstimator):
    """Estimator wrapper: fit runs the sweep, predict evaluates quotients at new eps."""

    def __init__(self, family="phi", N=4, k=2, gamma=None, R=1, a=1, eps_list=None, tol=1e-10, adapted=False):
        self.family = family
        self.N = N
        self.k = k
        self.gamma = gamma
        self.R = R
        self.a = a
        self.eps_list = eps_list
        self.tol = tol
        self.adapted = adapted

    def _params(self) -> ProblemParams:
        return ProblemParams(self.N, self.k, self.gamma, self.R, self.a)

    def fit(self, X=None, y=None):
        self.result_ = epsilon_sweep(self.family, self._params(), self.eps_list, self.tol, self.adapted)
        self.rows_ = self.result_.rows
        self.limit_ = self.result_.extrapolated
        self.order_ = self.result_.fitted_order
        return self

    def predict(self, eps) -> np.ndarray:
        params = self._params()
        build = family(self.family)
        g = params.gamma if self.adapted else None
        return np.array([rayleigh_quotient(build(params, as_fraction(e), gamma=g), params, self.tol)
                         for e in np.atleast_1d(eps)])
