"""Piecewise closed-form radial profiles and the optimality test families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .exact import ParameterRangeError, ProblemParams, as_fraction
from .logterm import TermSum, kth_radial_derivative


class SmoothnessError(ValueError):
    """A profile is differentiated beyond the order its pieces join smoothly."""


@dataclass(frozen=True)
class CutoffSpec:
    inner_radius: Fraction
    outer_radius: Fraction
    smoothness_order: int

    def __post_init__(self):
        object.__setattr__(self, "inner_radius", as_fraction(self.inner_radius))
        object.__setattr__(self, "outer_radius", as_fraction(self.outer_radius))
        if not (0 < self.inner_radius < self.outer_radius):
            raise ValueError("need 0 < inner_radius < outer_radius")
        if self.smoothness_order < 0:
            raise ValueError("smoothness_order must be >= 0")

    @classmethod
    def default(cls, params: ProblemParams) -> "CutoffSpec":
        return cls(params.R / 2, 3 * params.R / 4, params.k + 1)

    def check(self, R, k: int):
        if not self.outer_radius < R:
            raise ValueError("cutoff must end inside the ball")
        if self.smoothness_order < k + 1:
            raise SmoothnessError(f"cutoff of class C^{self.smoothness_order} is too rough for order {k}")


def smoothstep_coeffs(q: int) -> list[Fraction]:
    """Monomial coefficients of the degree 2q+1 polynomial S with S(0)=0, S(1)=1 and
    derivatives 1..q vanishing at both ends."""
    # S(x) = x^{q+1} sum_{n=0}^{q} C(q+n, n) (1-x)^n
    out = [Fraction(0)] * (2 * q + 2)
    for n in range(q + 1):
        c = comb(q + n, n)
        for i in range(n + 1):
            out[q + 1 + i] += c * comb(n, i) * (-1) ** i
    return out


def _compose_affine(coeffs: Sequence[Fraction], a: Fraction, b: Fraction) -> list[Fraction]:
    """Coefficients in r of P((r - a)/(b - a))."""
    h = b - a
    out = [Fraction(0)] * len(coeffs)
    # (r - a)^n / h^n expanded
    for n, c in enumerate(coeffs):
        if c == 0:
            continue
        for i in range(n + 1):
            out[i] += c * comb(n, i) * (-a) ** (n - i) / h**n
    return out


def cutoff_polynomial(spec: CutoffSpec, N: int, R, rising: bool = False) -> TermSum:
    """The transition piece: 1 - S(x) (falling, used by phi) or S(x) (rising)."""
    s = smoothstep_coeffs(spec.smoothness_order)
    if not rising:
        s = [-c for c in s]
        s[0] += 1
    return TermSum.polynomial(_compose_affine(s, spec.inner_radius, spec.outer_radius), N, R)


class RadialProfile:
    """A radial function given piecewise on (0, R) by concrete TermSums."""

    def __init__(self, pieces, N: int, R, smoothness: int):
        self.N = N
        self.R = as_fraction(R)
        self.smoothness = smoothness
        pieces = sorted(pieces, key=lambda p: float(p[0]))
        if float(pieces[0][0]) != 0.0 or float(pieces[-1][1]) != float(self.R):
            raise ValueError("pieces must cover (0, R)")
        for (_, hi, _), (lo, _, _) in zip(pieces[:-1], pieces[1:]):
            if float(hi) != float(lo):
                raise ValueError("pieces must be contiguous")
        self.pieces = [(lo, hi, ts) for lo, hi, ts in pieces]

    def breakpoints(self) -> list:
        return [p[1] for p in self.pieces[:-1]]

    def piece_at(self, r: float) -> TermSum:
        for lo, hi, ts in self.pieces:
            if float(lo) <= r <= float(hi):
                return ts
        raise ValueError(f"r={r} outside (0, {self.R})")

    def map(self, fn: Callable[[TermSum], TermSum], smoothness: int | None = None) -> "RadialProfile":
        return RadialProfile([(lo, hi, fn(ts)) for lo, hi, ts in self.pieces], self.N, self.R,
                             self.smoothness if smoothness is None else smoothness)

    def scale(self, c) -> "RadialProfile":
        return self.map(lambda ts: ts.scale(c))

    def __call__(self, r: float) -> float:
        r = float(r)
        R = float(self.R)
        if not 0 < r < R:
            raise ValueError(f"r={r} outside (0, {R})")
        # t from r without cancellation near r = R
        t = -math.log1p((r - R) / R) if 2 * r > R else math.log(R / r)
        return self.value_at_t(t)

    def value_at_t(self, t: float) -> float:
        """u at r = R exp(-t); works where that r underflows."""
        t = float(t)
        if not t > 0:
            raise ValueError(f"t={t} must be positive")
        if not hasattr(self, "_compiled"):
            self._compiled = {}
        R = float(self.R)
        for i, (lo, hi, ts) in enumerate(self.pieces):
            t_hi = math.inf if float(lo) == 0 else math.log(R / float(lo))
            t_lo = 0.0 if float(hi) == R else math.log(R / float(hi))
            if t_lo <= t <= t_hi:
                break
        if ts.is_zero():
            return 0.0
        comp = self._compiled.get(i)
        if comp is None:
            from .quadrature import CompiledSum

            comp = self._compiled[i] = CompiledSum(ts, center=(lo + hi) / 2 if lo > 0 else None)
        return float(comp(t))

    def derivative(self, order: int = 1) -> "RadialProfile":
        if order > self.smoothness:
            raise SmoothnessError(f"profile is only C^{self.smoothness}")
        from .logterm import radial_diff

        out = self
        for _ in range(order):
            out = out.map(radial_diff, smoothness=out.smoothness - 1)
        return out


def kth_derivative_profile(u: RadialProfile, k: int) -> RadialProfile:
    """Piecewise nabla^k u: Delta^m u for k = 2m, (Delta^m u)' for k = 2m + 1."""
    if u.smoothness < k:
        raise SmoothnessError(f"profile is C^{u.smoothness}, cannot take {k} derivatives")
    return u.map(lambda ts: kth_radial_derivative(ts, k), smoothness=u.smoothness - k)


def _zero(N, R) -> TermSum:
    return TermSum({}, N, R)


def make_phi_eps(params: ProblemParams, eps, cutoff: CutoffSpec | None = None, gamma=None) -> RadialProfile:
    """(log R/r)^((p-1)/p - eps) cut off to vanish outside the outer radius.

    With ``gamma`` given the exponent is (gamma-1)/p - eps instead, which puts
    the weighted mass exactly on the edge of divergence for that weight.
    """
    eps = as_fraction(eps)
    p, N, R = params.p, params.N, params.R
    g = p if gamma is None else as_fraction(gamma)
    if not (0 < eps < (g - 1) / p):
        raise ParameterRangeError(f"need 0 < eps < (gamma-1)/p = {(g - 1) / p}")
    cutoff = cutoff or CutoffSpec.default(params)
    cutoff.check(R, params.k)
    e = (g - 1) / p - eps
    core = TermSum.monomial(N, R, log_power=e)
    return RadialProfile(
        [
            (Fraction(0), cutoff.inner_radius, core),
            (cutoff.inner_radius, cutoff.outer_radius, core * cutoff_polynomial(cutoff, N, R)),
            (cutoff.outer_radius, R, _zero(N, R)),
        ],
        N, R, smoothness=cutoff.smoothness_order,
    )


def make_psi_eps(params: ProblemParams, eps, cutoff: CutoffSpec | None = None, gamma=None) -> RadialProfile:
    """(log R/r)^((N-1)/p + eps) (1 - cutoff): lives next to the boundary.

    ``gamma`` replaces N in the exponent, as for make_phi_eps.
    """
    eps = as_fraction(eps)
    p, N, R = params.p, params.N, params.R
    g = Fraction(N) if gamma is None else as_fraction(gamma)
    if eps <= 0:
        raise ParameterRangeError("need eps > 0")
    cutoff = cutoff or CutoffSpec.default(params)
    cutoff.check(R, params.k)
    core = TermSum.monomial(N, R, log_power=(g - 1) / p + eps)
    return RadialProfile(
        [
            (Fraction(0), cutoff.inner_radius, _zero(N, R)),
            (cutoff.inner_radius, cutoff.outer_radius, core * cutoff_polynomial(cutoff, N, R, rising=True)),
            (cutoff.outer_radius, R, core),
        ],
        N, R, smoothness=cutoff.smoothness_order,
    )


def make_psi_gamma_hardy(params: ProblemParams, gamma_exp) -> RadialProfile:
    """1 on (0, R/e], (log R/r)^gamma_exp on (R/e, R): the first-order Hardy family."""
    g = as_fraction(gamma_exp)
    p, N, R = params.p, params.N, params.R
    if g <= (p - 1) / p:
        raise ParameterRangeError(f"need gamma_exp > (p-1)/p = {(p - 1) / p}")
    br = float(R) / math.e
    return RadialProfile(
        [(Fraction(0), br, TermSum.monomial(N, R)), (br, R, TermSum.monomial(N, R, log_power=g))],
        N, R, smoothness=1,
    )


def family(name: str) -> Callable:
    try:
        return {"phi": make_phi_eps, "psi": make_psi_eps}[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected 'phi' or 'psi'") from None
