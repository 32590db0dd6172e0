"""Closed-form algebra of radial functions built from log-power terms.

A term is ``c(alpha) * r**s * (R**2 - r**2)**j * log(R/r)**(alpha + t)`` where
``c`` is a polynomial in a symbolic exponent ``alpha``. Sums of such terms are
closed under d/dr and the radial Laplacian, which is all the
computations of Delta^m (log R/|x|)^alpha need. The ``(R**2 - r**2)**j``
factor lets polynomial test functions vanishing at r = R be differentiated
without expanding the boundary factor.

Concrete (non-symbolic) sums have log exponent ``t`` alone; they are what the
profile and quadrature code manipulates after substituting a value for alpha.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .exact import as_fraction


class Poly:
    """Polynomial in alpha with Fraction coefficients, lowest degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [as_fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, x) -> "Poly":
        return cls((x,))

    @classmethod
    def falling(cls, n: int, shift=0) -> "Poly":
        """prod_{i=0}^{n-1} (alpha + shift - i)."""
        out = cls.const(1)
        for i in range(n):
            out = out * cls((as_fraction(shift) - i, 1))
        return out

    def is_zero(self) -> bool:
        return not self.c

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_const(self) -> bool:
        return len(self.c) <= 1

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.c), len(other.c))
        return Poly(
            (self.c[i] if i < len(self.c) else 0) + (other.c[i] if i < len(other.c) else 0) for i in range(n)
        )

    def __neg__(self) -> "Poly":
        return Poly(-x for x in self.c)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if not self.c or not other.c:
            return Poly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __call__(self, x):
        x = as_fraction(x) if not isinstance(x, float) else x
        acc = 0
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for i, a in enumerate(self.c):
            if a:
                parts.append(f"{a}" if i == 0 else f"{a}*alpha" + (f"^{i}" if i > 1 else ""))
        return " + ".join(parts)


Key = tuple  # (r_power, bdry_power, log_offset)


@dataclass(frozen=True)
class LogTerm:
    coeff: Poly
    r_power: Fraction
    log_offset: Fraction
    bdry_power: int = 0


def _key(s, j, t) -> Key:
    return (as_fraction(s), int(j), as_fraction(t))


class TermSum:
    """Merged sum of log-power terms on the ball of radius R in dimension N.

    ``symbolic`` sums carry log exponents ``alpha + t``; concrete ones ``t``.
    """

    __slots__ = ("terms", "N", "R", "symbolic")

    def __init__(self, terms: Mapping[Key, Poly] | Iterable = (), N: int = 2, R=1, symbolic: bool = False):
        self.N = N
        self.R = as_fraction(R)
        self.symbolic = symbolic
        merged: dict[Key, Poly] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, c in items:
            key = _key(*key)
            if not isinstance(c, Poly):
                c = Poly.const(c)
            if not symbolic and not c.is_const():
                raise ValueError("concrete TermSum needs constant coefficients")
            merged[key] = merged.get(key, Poly()) + c
        self.terms = {k: v for k, v in merged.items() if not v.is_zero()}

    # constructors -------------------------------------------------------
    @classmethod
    def log_power(cls, N: int, R=1, offset=0, coeff=1) -> "TermSum":
        """(log R/r)^(alpha + offset) with symbolic alpha."""
        return cls({(0, 0, offset): Poly.const(coeff)}, N, R, symbolic=True)

    @classmethod
    def monomial(cls, N: int, R=1, r_power=0, log_power=0, coeff=1, bdry_power=0) -> "TermSum":
        return cls({(r_power, bdry_power, log_power): coeff}, N, R)

    @classmethod
    def polynomial(cls, coeffs, N: int, R=1, bdry_power=0) -> "TermSum":
        """sum_n coeffs[n] r^n, optionally times (R^2 - r^2)^bdry_power."""
        return cls({(n, bdry_power, 0): c for n, c in enumerate(coeffs)}, N, R)

    def _new(self, terms, symbolic=None) -> "TermSum":
        return TermSum(terms, self.N, self.R, self.symbolic if symbolic is None else symbolic)

    # algebra ----------------------------------------------------------------
    def log_terms(self) -> list[LogTerm]:
        return [LogTerm(c, s, t, j) for (s, j, t), c in sorted(self.terms.items())]

    def is_zero(self) -> bool:
        return not self.terms

    def _compatible(self, other: "TermSum"):
        if self.N != other.N or self.R != other.R:
            raise ValueError("TermSums live on different (N, R)")

    def __add__(self, other: "TermSum") -> "TermSum":
        self._compatible(other)
        if self.symbolic != other.symbolic:
            raise ValueError("cannot add symbolic and concrete sums")
        return self._new(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self) -> "TermSum":
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "TermSum") -> "TermSum":
        return self + (-other)

    def scale(self, c) -> "TermSum":
        return self._new({k: v * as_fraction(c) for k, v in self.terms.items()})

    def __mul__(self, other) -> "TermSum":
        if not isinstance(other, TermSum):
            return self.scale(other)
        self._compatible(other)
        if self.symbolic and other.symbolic:
            raise ValueError("product of two symbolic sums leaves the alpha + t ring")
        out = []
        for (s1, j1, t1), c1 in self.terms.items():
            for (s2, j2, t2), c2 in other.terms.items():
                out.append(((s1 + s2, j1 + j2, t1 + t2), c1 * c2))
        return self._new(out, symbolic=self.symbolic or other.symbolic)

    __rmul__ = __mul__

    def shift_r(self, ds) -> "TermSum":
        """Multiply by r**ds."""
        ds = as_fraction(ds)
        return self._new({(s + ds, j, t): c for (s, j, t), c in self.terms.items()})

    def substitute(self, alpha) -> "TermSum":
        """Fix alpha to a rational value; the result is concrete."""
        if not self.symbolic:
            return self
        a = as_fraction(alpha)
        return TermSum({(s, j, t + a): Poly.const(c(a)) for (s, j, t), c in self.terms.items()}, self.N, self.R)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TermSum)
            and (self.N, self.R, self.symbolic) == (other.N, other.R, other.symbolic)
            and self.terms == other.terms
        )

    def __repr__(self):
        body = " + ".join(
            f"({c})*r^{s}" + (f"*(R^2-r^2)^{j}" if j else "") + f"*L^({'alpha+' if self.symbolic else ''}{t})"
            for (s, j, t), c in sorted(self.terms.items())
        )
        return f"TermSum[N={self.N}, R={self.R}]({body or '0'})"

    # evaluation -------------------------------------------------------------
    def min_r_power(self) -> Fraction:
        return min((s for s, _, _ in self.terms), default=Fraction(0))

    def evaluate(self, alpha, r) -> float:
        """Value at radius r (0 < r < R), with the log taken accurately near both ends."""
        r = float(r)
        R = float(self.R)
        if not (0 < r < R):
            raise ValueError(f"r={r} outside (0, {R})")
        # log(R/r) and R^2 - r^2 without cancellation near r = R
        L = -math.log1p((r - R) / R) if 2 * r > R else math.log(R / r)
        B = (R - r) * (R + r)
        f = self.substitute(alpha) if self.symbolic else self
        total = 0.0
        for (s, j, t), c in f.terms.items():
            total += float(c(0)) * r ** float(s) * B**j * L ** float(t)
        return total


# radial operators -------------------------------------------------------------


def radial_diff(f: TermSum) -> TermSum:
    """d/dr, term by term; each term splits into at most three."""
    out = []
    for (s, j, t), c in f.terms.items():
        if s != 0:
            out.append(((s - 1, j, t), c * s))
        if j != 0:
            out.append(((s + 1, j - 1, t), c * (-2 * j)))
        e = Poly((t, 1)) if f.symbolic else Poly.const(t)
        if not e.is_zero():
            out.append(((s - 1, j, t - 1), -(c * e)))
    return f._new(out)


def radial_laplacian(f: TermSum) -> TermSum:
    """f'' + (N-1)/r f'."""
    d1 = radial_diff(f)
    return radial_diff(d1) + d1.shift_r(-1).scale(f.N - 1)


def polyharmonic(f: TermSum, m: int, odd: bool = False) -> TermSum:
    """Delta^m f, followed by one more d/dr when ``odd`` (signed radial component of grad Delta^m)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    for _ in range(m):
        f = radial_laplacian(f)
    return radial_diff(f) if odd else f


def kth_radial_derivative(f: TermSum, k: int) -> TermSum:
    """The radial profile of nabla^k f: Delta^{k/2} f or (Delta^{(k-1)/2} f)'."""
    return polyharmonic(f, k // 2, odd=bool(k % 2))


# coefficient tables -----------------------------------------------------------


@dataclass
class CoeffTable:
    """C[m, j] (0 <= j <= 2m-1) and D[m, j] (0 <= j <= 2m) for all orders up to m."""

    m: int
    N: int
    C: dict = field(default_factory=dict)
    D: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "m": self.m,
            "N": self.N,
            "C": {f"C[{mm}][{j}]": str(v) for (mm, j), v in sorted(self.C.items())},
            "D": {f"D[{mm}][{j}]": str(v) for (mm, j), v in sorted(self.D.items())},
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CoeffTable":
        data = json.loads(text)

        def parse(block):
            out = {}
            for key, v in block.items():
                mm, j = key[2:-1].split("][")
                out[(int(mm), int(j))] = Fraction(v)
            return out

        return cls(data["m"], data["N"], parse(data["C"]), parse(data["D"]))


def closed_form_top_coefficient(N: int, m: int) -> Fraction:
    """C[m, 2m-1] = (-1)^(m-1)/(2m) prod_{j=1}^m 2j(N-2j)."""
    p = Fraction(1)
    for j in range(1, m + 1):
        p *= 2 * j * (N - 2 * j)
    return Fraction((-1) ** (m - 1), 2 * m) * p


def coeff_table(N: int, m: int) -> CoeffTable:
    """Fill C and D by the recursion in m; the top entry C[m, 2m-1] uses its closed form."""
    if m < 1 or N < 2:
        raise ValueError("need m >= 1 and N >= 2")
    C: dict = {}
    for mm in range(1, m + 1):
        C[(mm, 0)] = Fraction(1)
        if mm >= 2:
            a = N + 2 - 4 * mm
            b = -2 * (mm - 1) * (N - 2 * mm)
            prev = lambda j: C.get((mm - 1, j), Fraction(0)) if 0 <= j <= 2 * mm - 3 else Fraction(0)
            for j in range(1, 2 * mm - 1):
                C[(mm, j)] = prev(j) + a * prev(j - 1) + (b * prev(j - 2) if j >= 2 else 0)
        C[(mm, 2 * mm - 1)] = closed_form_top_coefficient(N, mm)
    D: dict = {}
    for mm in range(1, m + 1):
        D[(mm, 0)] = Fraction(1)
        for j in range(1, 2 * mm):
            D[(mm, j)] = C[(mm, j)] - 2 * mm * C[(mm, j - 1)]
        D[(mm, 2 * mm)] = -2 * mm * C[(mm, 2 * mm - 1)]
    return CoeffTable(m, N, C, D)


def recursion_top_coefficient(N: int, m: int) -> Fraction:
    """C[m, 2m-1] obtained by continuing the recursion one step past j = 2m-2."""
    c = Fraction(N - 2)
    for mm in range(1, m):
        c = -2 * mm * (N - 2 - 2 * mm) * c
    return c


@dataclass
class TableCheck:
    passed: bool
    N: int
    m: int
    mismatch: tuple | None = None  # (kind, m, j, N, expected, got)


def table_display(N: int, m: int, table: CoeffTable, odd: bool = False) -> TermSum:
    """The sum displayed for Delta^m (or grad Delta^m) of (log R/r)^alpha, built from the table.

    The table follows the tabulated sign convention, in which each derivative
    landing on the log factor contributes +1/r; the true derivative of
    log(R/r) is -1/r, so every such hit flips the sign. The returned sum is
    in true-derivative form.
    """
    terms = []
    if not odd:
        for j in range(2 * m):
            sign = (-1) ** j
            terms.append(((-2 * m, 0, -2 * m + j), Poly.falling(2 * m - j) * (sign * table.C[(m, j)])))
    else:
        for j in range(2 * m + 1):
            sign = (-1) ** (j + 1)
            terms.append(((-2 * m - 1, 0, -2 * m + j - 1), Poly.falling(2 * m - j + 1) * (sign * table.D[(m, j)])))
    return TermSum(terms, N, 1, symbolic=True)


def verify_table(N: int, m: int, table: CoeffTable | None = None) -> TableCheck:
    """Compare the coefficient table with generic term algebra as polynomial identities in alpha."""
    table = table or coeff_table(N, m)
    base = TermSum.log_power(N)
    f = base
    for mm in range(1, m + 1):
        f = radial_laplacian(f)
        for kind, generic in (("even", f), ("odd", radial_diff(f))):
            expected = table_display(N, mm, table, odd=(kind == "odd"))
            if generic != expected:
                keys = sorted(set(generic.terms) | set(expected.terms))
                for key in keys:
                    g = generic.terms.get(key, Poly())
                    e = expected.terms.get(key, Poly())
                    if g != e:
                        j = int(key[2]) + 2 * mm + (1 if kind == "odd" else 0)
                        return TableCheck(False, N, m, (kind, mm, j, N, e, g))
    return TableCheck(True, N, m)
