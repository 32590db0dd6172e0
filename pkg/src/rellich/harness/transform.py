"""Change of variables between radial functions on R^N and on the ball B_R.

With r^-alpha - R^-alpha = t^-alpha, a radial w on R^N becomes u(r) = w(t(r))
on B_R. The Laplacian of w turns into a first-order-perturbed operator L on u,
and the power-weighted integrals of w turn into integrals of u with weights in
rho = 1 - (r/R)^alpha. Both sides are integrated independently here with
scipy's QUADPACK wrapper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import quad

from ..exact import ParameterRangeError
from .checks import Margin

_T_CUT = 40.0  # exp(-t^2) is below 1e-690 beyond this


@dataclass(frozen=True)
class GaussianProfile:
    """w(t) = q(t^2) exp(-t^2) with q given by its coefficients, lowest first."""

    poly: tuple = (1.0,)

    def _parts(self, s):
        q = np.asarray([float(c) for c in self.poly])
        dq = P.polyder(q) if len(q) > 1 else np.zeros(1)
        ddq = P.polyder(dq) if len(dq) > 1 else np.zeros(1)
        e = math.exp(-s)
        v, v1, v2 = P.polyval(s, q), P.polyval(s, dq), P.polyval(s, ddq)
        # g(s) = q e^-s and its first two s-derivatives
        return v * e, (v1 - v) * e, (v2 - 2 * v1 + v) * e

    def value(self, t: float) -> float:
        return self._parts(t * t)[0]

    def derivatives(self, t: float) -> tuple[float, float, float]:
        """(w, w', w'') at t."""
        s = t * t
        g, g1, g2 = self._parts(s)
        return g, 2 * t * g1, 2 * g1 + 4 * s * g2

    def laplacian(self, t: float, N: int) -> float:
        g, g1, g2 = self._parts(t * t)
        return 2 * N * g1 + 4 * t * t * g2


def transform_beta(N: int, p, alpha) -> float:
    return ((2 * p - 1) * (alpha + 1) + 1 - N) / alpha


def rellich_rn_constant(N: int, p) -> float:
    """Sharp constant of the subcritical Rellich inequality on R^N."""
    return (N * (p - 1) * (N - 2 * p) / p**2) ** p


class Transform:
    """The map r -> t(r) = r rho^(-1/alpha) and its inverse."""

    def __init__(self, alpha: float, R: float = 1.0):
        if alpha <= 0:
            raise ParameterRangeError("alpha must be positive")
        self.alpha, self.R = float(alpha), float(R)

    def rho(self, r: float) -> float:
        return -math.expm1(self.alpha * math.log(r / self.R))

    def t_of_r(self, r: float) -> float:
        return r * self.rho(r) ** (-1.0 / self.alpha)

    def r_of_t(self, t: float) -> float:
        a = self.alpha
        return t * (1.0 + (t / self.R) ** a) ** (-1.0 / a)

    def dt_dr(self, r: float) -> tuple[float, float]:
        """(t', t'') as functions of r."""
        a, R = self.alpha, self.R
        rho = self.rho(r)
        d1 = rho ** (-(a + 1) / a)
        d2 = (a + 1) * r ** (a - 1) * R ** (-a) * rho ** (-(2 * a + 1) / a)
        return d1, d2


def transformed_operator(w: GaussianProfile, tr: Transform, N: int, r: float) -> tuple[float, float]:
    """(u(r), L u(r)) for u = w o t, with L u = Lap u + (u'/r)(N - alpha - 2)/((R/r)^alpha - 1)."""
    t = tr.t_of_r(r)
    if t > _T_CUT:
        return 0.0, 0.0
    w0, w1, w2 = w.derivatives(t)
    d1, d2 = tr.dt_dr(r)
    u1 = w1 * d1
    u2 = w2 * d1 * d1 + w1 * d2
    extra = (N - tr.alpha - 2) / math.expm1(-tr.alpha * math.log(r / tr.R))
    return w0, u2 + (N - 1) * u1 / r + u1 / r * extra


@dataclass
class IdentityCheck:
    name: str
    whole_space: float
    ball: float
    quad_error: float

    @property
    def rel_diff(self) -> float:
        return abs(self.whole_space - self.ball) / abs(self.whole_space)

    def holds(self, rel: float = 1e-8) -> bool:
        return self.rel_diff <= rel

    def to_dict(self) -> dict:
        return {"name": self.name, "whole_space": self.whole_space, "ball": self.ball,
                "rel_diff": self.rel_diff, "quad_error": self.quad_error}


@dataclass
class TransformReport:
    N: int
    p: float
    alpha: float
    beta: float
    w: GaussianProfile
    identities: list[IdentityCheck]
    margins: list[Margin]
    notes: list[str] = field(default_factory=list)

    @property
    def quotients(self) -> tuple[float, float]:
        """Energy over weighted mass, on R^N and on the ball."""
        lap, pot = self.identities
        return lap.whole_space / pot.whole_space, lap.ball / pot.ball

    def passed(self, rel: float = 1e-8) -> bool:
        q1, q2 = self.quotients
        return (all(c.holds(rel) for c in self.identities) and abs(q1 / q2 - 1) <= 2 * rel
                and all(m.passed() for m in self.margins))

    def to_dict(self) -> dict:
        q1, q2 = self.quotients
        return {
            "N": self.N, "p": self.p, "alpha": self.alpha, "beta": self.beta,
            "w_poly": [float(c) for c in self.w.poly],
            "identities": [c.to_dict() for c in self.identities],
            "quotient_whole_space": q1, "quotient_ball": q2,
            "margins": [m.to_dict() for m in self.margins],
            "passed": self.passed(),
            "notes": list(self.notes),
        }


def _quad_sum(f, edges: Sequence[float], rtol: float) -> tuple[float, float]:
    total = err = 0.0
    for a, b in zip(edges, edges[1:]):
        v, e = quad(f, a, b, epsabs=0.0, epsrel=rtol, limit=400)
        total += v
        err += e
    return total, err


_T_EDGES = (0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 9.0, 12.0)


def transform_equivalence(w_spec: GaussianProfile | Sequence | None, p, alpha, N: int, R=1.0,
                          rtol: float = 1e-13) -> TransformReport:
    """Both change-of-variable identities plus the pair of equivalent Rellich margins."""
    p, alpha, R = float(p), float(alpha), float(R)
    if not 1 < p < N / 2:
        raise ParameterRangeError("need 1 < p < N/2")
    w = w_spec if isinstance(w_spec, GaussianProfile) else GaussianProfile(tuple(w_spec or (1.0,)))
    tr = Transform(alpha, R)
    beta = transform_beta(N, p, alpha)
    rho_pow = -(N - 2 * p + alpha) / alpha
    r_edges = [0.0] + [tr.r_of_t(t) for t in _T_EDGES[1:]]

    lap_w, e1 = _quad_sum(lambda t: abs(w.laplacian(t, N)) ** p * t ** (N - 1), _T_EDGES, rtol)
    pot_w, e2 = _quad_sum(lambda t: abs(w.value(t)) ** p * t ** (N - 1 - 2 * p), _T_EDGES, rtol)

    def lap_ball(r):
        if r == 0.0:
            return 0.0
        _, lu = transformed_operator(w, tr, N, r)
        return abs(lu) ** p * tr.rho(r) ** beta * r ** (N - 1) if lu else 0.0

    def pot_ball(r):
        if r == 0.0:
            return 0.0
        u, _ = transformed_operator(w, tr, N, r)
        return abs(u) ** p * r ** (N - 1 - 2 * p) * tr.rho(r) ** rho_pow if u else 0.0

    lap_u, e3 = _quad_sum(lap_ball, r_edges, rtol)
    pot_u, e4 = _quad_sum(pot_ball, r_edges, rtol)
    ident = [IdentityCheck("laplacian_energy", lap_w, lap_u, e1 + e3),
             IdentityCheck("potential", pot_w, pot_u, e2 + e4)]
    c = rellich_rn_constant(N, p)
    params = {"N": N, "p": p, "alpha": alpha, "beta": beta}
    margins = [Margin("rellich_whole_space", c * pot_w, lap_w, c * e2 + e1, params),
               Margin("rellich_ball_transformed", c * pot_u, lap_u, c * e4 + e3, params)]
    notes = ["sphere surface factor omitted on both sides"]
    if abs(beta) < 1e-14:
        notes.append("beta = 0: the ball-side energy carries no weight")
    return TransformReport(N, p, alpha, beta, w, ident, margins, notes)


def special_alphas(N: int, p) -> tuple[Fraction, Fraction]:
    """alpha making the potential exponent equal to p, and alpha giving beta = 0."""
    p = Fraction(p)
    return (N - 2 * p) / (p - 1), (N - 2 * p) / (2 * p - 1)


def sample_transform_cases(seed: int = 42, n: int = 10) -> list[tuple[int, Fraction, Fraction, GaussianProfile]]:
    """Seeded (N, p, alpha, w) draws; the first two use the special alphas."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        N = int(rng.integers(5, 11))
        p_max = Fraction(N, 2) - Fraction(1, 4)
        choices = [Fraction(j, 4) for j in range(5, int(p_max * 4) + 1)]
        p = choices[int(rng.integers(len(choices)))]
        if i < 2:
            alpha = special_alphas(N, p)[i]
        else:
            alpha = Fraction(int(rng.integers(1, 17)), 4)
        poly = tuple(float(Fraction(int(v), 4)) for v in rng.integers(-6, 7, size=int(rng.integers(1, 4))))
        if not any(poly):
            poly = (1.0,)
        out.append((N, p, alpha, GaussianProfile(poly)))
    return out
