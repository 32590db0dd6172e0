"""Exact rational constants of the critical and subcritical Rellich inequalities.

Every constant is kept as a rational base raised to a rational exponent, so
identities between constant families are checked without rounding.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Union

Rational = Union[int, Fraction]


class ParameterRangeError(ValueError):
    """Raised when a constant is requested outside its window of validity."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


@dataclass(frozen=True)
class ProblemParams:
    """The tuple (N, k, gamma, R, a) indexing every quotient; m and p are derived."""

    N: int
    k: int
    gamma: Fraction = None
    R: Fraction = Fraction(1)
    a: Fraction = Fraction(1)

    def __post_init__(self):
        if self.N < 2:
            raise ParameterRangeError(f"N must be >= 2, got {self.N}")
        if self.k < 1:
            raise ParameterRangeError(f"k must be >= 1, got {self.k}")
        if self.N <= self.k:
            raise ParameterRangeError(f"need N > k so that p = N/k > 1, got N={self.N}, k={self.k}")
        object.__setattr__(self, "R", as_fraction(self.R))
        object.__setattr__(self, "a", as_fraction(self.a))
        gamma = self.p if self.gamma is None else as_fraction(self.gamma)
        object.__setattr__(self, "gamma", gamma)
        if self.R <= 0:
            raise ParameterRangeError("R must be positive")
        if self.a < 1:
            raise ParameterRangeError("a must be >= 1")

    @property
    def m(self) -> int:
        return self.k // 2

    @property
    def odd(self) -> bool:
        return self.k % 2 == 1

    @property
    def p(self) -> Fraction:
        return Fraction(self.N, self.k)


@dataclass(frozen=True, order=False)
class ExactConstant:
    """A positive constant ``base ** exponent`` with rational base and exponent."""

    base: Fraction
    exponent: Fraction = field(default=Fraction(1))

    def __post_init__(self):
        object.__setattr__(self, "base", as_fraction(self.base))
        object.__setattr__(self, "exponent", as_fraction(self.exponent))
        if self.base < 0:
            raise ParameterRangeError(f"negative base {self.base}")

    def exact_value(self) -> Fraction | None:
        """The value as a Fraction when it is rational (integer exponent), else None."""
        e = self.exponent
        if e.denominator == 1:
            return self.base ** int(e)
        # base may still be a perfect power
        root = _exact_root(self.base, e.denominator)
        if root is None:
            return None
        return root ** e.numerator

    def to_decimal(self, digits: int = 30) -> decimal.Decimal:
        ctx = decimal.Context(prec=digits + 10)
        exact = self.exact_value()
        if exact is not None:
            val = ctx.divide(decimal.Decimal(exact.numerator), decimal.Decimal(exact.denominator))
        elif self.base == 0:
            val = decimal.Decimal(0)
        else:
            b = ctx.divide(decimal.Decimal(self.base.numerator), decimal.Decimal(self.base.denominator))
            e = ctx.divide(decimal.Decimal(self.exponent.numerator), decimal.Decimal(self.exponent.denominator))
            val = ctx.exp(ctx.multiply(e, ctx.ln(b)))
        return decimal.Context(prec=digits).plus(val)

    def __float__(self) -> float:
        return float(self.to_decimal(20))

    def same_family(self, other: "ExactConstant") -> bool:
        return self.exponent == other.exponent

    def _check_family(self, other):
        if not isinstance(other, ExactConstant) or not self.same_family(other):
            raise TypeError("exact ordering needs two constants with a common exponent")

    def __lt__(self, other):
        self._check_family(other)
        return self.base < other.base if self.exponent > 0 else self.base > other.base

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        self._check_family(other)
        return other < self

    def __ge__(self, other):
        return self == other or self > other

    def pow(self, e: Rational) -> "ExactConstant":
        return ExactConstant(self.base, self.exponent * as_fraction(e))

    def render(self) -> str:
        e = self.exponent
        return f"{self.base.numerator}/{self.base.denominator}^({e.numerator}/{e.denominator})"

    def to_dict(self, digits: int = 30) -> dict:
        exact = self.exact_value()
        return {
            "base": str(self.base),
            "exponent": str(self.exponent),
            "exact": None if exact is None else str(exact),
            "decimal": str(self.to_decimal(digits)),
        }


def _exact_root(x: Fraction, n: int) -> Fraction | None:
    def iroot(v: int) -> int | None:
        if v < 0:
            return None
        r = round(v ** (1.0 / n)) if v < 2**1000 else int(v ** (1.0 / n))
        for c in (r - 1, r, r + 1):
            if c >= 0 and c**n == v:
                return c
        # large values: integer Newton
        lo, hi = 0, 1 << (v.bit_length() // n + 1)
        while lo < hi:
            mid = (lo + hi) // 2
            if mid**n < v:
                lo = mid + 1
            else:
                hi = mid
        return lo if lo**n == v else None

    num, den = iroot(x.numerator), iroot(x.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def subcritical_rellich_constant(N: int, k: int, p: Rational) -> ExactConstant:
    """A_{k,p}^p of the subcritical Rellich inequality, valid for 1 < p < N/k."""
    p = as_fraction(p)
    if not (1 < p < Fraction(N, k)):
        raise ParameterRangeError(f"need 1 < p < N/k = {Fraction(N, k)}, got p={p}")
    m = k // 2
    if k % 2 == 0:
        base = prod(((N - 2 * l * p) * (N * (p - 1) + 2 * (l - 1) * p) / p**2 for l in range(1, m + 1)), start=Fraction(1))
    else:
        base = (N - p) / p * prod(
            ((N - (2 * l + 1) * p) * (N * (p - 1) + (2 * l - 1) * p) / p**2 for l in range(1, m + 1)),
            start=Fraction(1),
        )
    return ExactConstant(base, p)


def _even_product(N: int, m: int) -> Fraction:
    return Fraction(prod(2 * j * (N - 2 * j) for j in range(1, m + 1)))


def critical_origin_constant(params: ProblemParams) -> ExactConstant:
    """R^rad_{k,p}: optimal constant for the weight singular at the origin (gamma = p)."""
    N, k, m = params.N, params.k, params.m
    if k < 2:
        raise ParameterRangeError("critical constants need k >= 2")
    if k % 2 == 0:
        base = Fraction(N - k, k * N) * _even_product(N, m)
    else:
        base = Fraction(N - k, N) * _even_product(N, m)
    return ExactConstant(base, params.p)


def critical_boundary_constant(params: ProblemParams) -> ExactConstant:
    """R^rad_{k,N}: optimal constant for the weight singular at the boundary (gamma = N)."""
    N, k = params.N, params.k
    if k < 2:
        raise ParameterRangeError("critical constants need k >= 2")
    base = prod((Fraction(j * N - k, N) for j in range(1, k + 1)), start=Fraction(1))
    return ExactConstant(base, params.p)


def critical_constant(params: ProblemParams) -> ExactConstant:
    """R^rad_{k,gamma} where it is known in closed form; zero outside [p, N]."""
    g = params.gamma
    if g == params.p:
        return critical_origin_constant(params)
    if g == params.N:
        return critical_boundary_constant(params)
    if g < params.p or g > params.N:
        return ExactConstant(0, params.p)
    raise ParameterRangeError(f"no closed form for interior gamma={g} in ({params.p}, {params.N})")


def davies_hinz_constant(N: int, m: int, p: Rational, beta: Rational) -> ExactConstant:
    """C(N, m, p, beta) itself (exponent 1); callers raise it to the p-th power."""
    p, beta = as_fraction(p), as_fraction(beta)
    if m == 0:
        return ExactConstant(1, 1)
    if not (2 * (1 + (m - 1) * p) < beta < N):
        raise ParameterRangeError(f"need 2(1+(m-1)p) < beta < N, got beta={beta} (m={m}, p={p}, N={N})")
    base = Fraction(1)
    for j in range(m):
        base *= p**2 / ((N - beta + 2 * j * p) * ((p - 1) * (N - 2) + beta - 2 * (1 + j * p)))
    return ExactConstant(base, 1)


def chain_constant_D(N: int, m: int, p: Rational, alpha: Rational) -> ExactConstant:
    """D(N, m, p, alpha) for 2(1-p) < alpha <= N - 2mp."""
    p, alpha = as_fraction(p), as_fraction(alpha)
    if not (2 * (1 - p) < alpha <= N - 2 * m * p):
        raise ParameterRangeError(f"need 2(1-p) < alpha <= N-2mp, got alpha={alpha}")
    base = Fraction(1)
    for j in range(1, m):
        base *= (2 * p * j + N - 2 * m * p - alpha) * (p * (N - 2 - 2 * j) - N + 2 * m * p + alpha) / p**2
    base *= (p - 1) * ((N - 2) * p - N + 2 * m * p + alpha) / p**2
    return ExactConstant(base, 1)


def chain_constant_E(N: int, m: int, p: Rational, alpha: Rational) -> ExactConstant:
    """E(N, m, p, alpha) = D(N, m, p, alpha + p) (N - alpha - p)/p for 2-3p < alpha <= N-(2m+1)p."""
    p, alpha = as_fraction(p), as_fraction(alpha)
    if not (2 - 3 * p < alpha <= N - (2 * m + 1) * p):
        raise ParameterRangeError(f"need 2-3p < alpha <= N-(2m+1)p, got alpha={alpha}")
    d = chain_constant_D(N, m, p, alpha + p).base
    return ExactConstant(d * (N - alpha - p) / p, 1)


def adimurthi_santra_constant(N: int, m: int) -> ExactConstant:
    """The constant A(N, m) claimed optimal in the earlier N = 4m literature."""
    if m < 2 or N != 4 * m:
        raise ParameterRangeError(f"A(N, m) is defined for N = 4m, m >= 2; got N={N}, m={m}")
    base = Fraction(N, 4) / 2 ** (2 * m - 2) * prod(((4 * i + 2) * (8 * m - 4 * i - 6) for i in range(m - 1)), start=1)
    return ExactConstant(base, 1)


def hardy_weight_constant(p: Rational, beta: Rational) -> ExactConstant:
    """((beta + p - 1)/p)^p of the log-weighted Hardy inequality."""
    p, beta = as_fraction(p), as_fraction(beta)
    if p <= 1:
        raise ParameterRangeError("need p > 1")
    if beta < 1 - p:
        raise ParameterRangeError(f"need beta >= 1-p, got beta={beta}")
    return ExactConstant((beta + p - 1) / p, p)


@dataclass(frozen=True)
class GapReport:
    m: int
    N: int
    A: Fraction
    A_squared: Fraction
    R_rad: Fraction
    ratio: Fraction
    our_chain: tuple
    as_chain: tuple | None

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "N": self.N,
            "A": str(self.A),
            "A_squared": str(self.A_squared),
            "R_rad": str(self.R_rad),
            "ratio": str(self.ratio),
            "chains": {
                "ours": [str(c) for c in self.our_chain],
                "ours_product": str(prod(self.our_chain, start=Fraction(1))),
                "adimurthi_santra": None if self.as_chain is None else [str(c) for c in self.as_chain],
                "adimurthi_santra_product": None
                if self.as_chain is None
                else str(prod(self.as_chain, start=Fraction(1))),
            },
        }


def gap_analysis(m: int) -> GapReport:
    """Compare A(4m, m)^2 with R^rad_{2m,2} and expose the factors of both derivation chains.

    Our chain (p = 2, alpha = 0): Davies-Hinz with m-1, then the Musina step,
    then the log Hardy step with constant 1/4. The competing chain is only
    written out for m = 2 (N = 8), where its three steps are explicit.
    """
    N = 4 * m
    A = adimurthi_santra_constant(N, m).base
    params = ProblemParams(N, 2 * m)
    r_rad = critical_origin_constant(params).exact_value()
    p = Fraction(2)
    dh = davies_hinz_constant(N, m - 1, p, 2 * (m - 1) * p).base
    musina = (N - (N - 2 * (m - 1) * p) / p) ** 2
    ours = (1 / dh**2, musina, Fraction(1, 4))
    as_chain = None
    if m == 2:
        as_chain = (Fraction(N * N, 4), Fraction((N - 6) * (N + 2), 4) ** 2, Fraction(1, 4))
    return GapReport(m, N, A, A * A, r_rad, A * A / r_rad, ours, as_chain)
