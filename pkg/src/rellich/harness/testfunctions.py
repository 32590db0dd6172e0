"""Seeded polynomial test functions q(r^2) (R^2 - r^2)^b, optionally cut off near 0."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..exact import as_fraction
from ..logterm import TermSum
from ..profiles import CutoffSpec, RadialProfile, cutoff_polynomial

_SMOOTH = 64  # polynomial pieces: any order we will ever ask for


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # keep pytest from collecting this class

    poly: tuple[Fraction, ...]  # coefficients of q in s = r^2, lowest first
    boundary_order: int
    origin_cutoff: CutoffSpec | None = None

    def __post_init__(self):
        if self.boundary_order < 1:
            raise ValueError("boundary_order must be >= 1")
        if not any(self.poly):
            raise ValueError("zero polynomial")

    def core(self, N: int, R=1) -> TermSum:
        coeffs = [Fraction(0)] * (2 * len(self.poly) - 1)
        for i, c in enumerate(self.poly):
            coeffs[2 * i] = as_fraction(c)
        return TermSum.polynomial(coeffs, N, R, bdry_power=self.boundary_order)

    def profile(self, N: int, R=1) -> RadialProfile:
        R = as_fraction(R)
        core = self.core(N, R)
        if self.origin_cutoff is None:
            return RadialProfile([(Fraction(0), R, core)], N, R, smoothness=_SMOOTH)
        cut = self.origin_cutoff
        return RadialProfile(
            [
                (Fraction(0), cut.inner_radius, TermSum({}, N, R)),
                (cut.inner_radius, cut.outer_radius, core * cutoff_polynomial(cut, N, R, rising=True)),
                (cut.outer_radius, R, core),
            ],
            N, R, smoothness=cut.smoothness_order,
        )

    def scaled(self, c) -> "TestFunction":
        c = as_fraction(c)
        return TestFunction(tuple(c * x for x in self.poly), self.boundary_order, self.origin_cutoff)


def origin_cutoff_spec(R=1, smoothness_order: int = 6) -> CutoffSpec:
    """Vanishes on (0, R/8], equals one from R/4 on."""
    R = as_fraction(R)
    return CutoffSpec(R / 8, R / 4, smoothness_order)


def random_test_function(seed, degree: int = 2, boundary_order: int = 2, origin_vanishing: bool = False,
                         R=1, smoothness_order: int = 6) -> TestFunction:
    """Deterministic draw with coefficients on the lattice {-6, ..., 6}/4 (leading one nonzero)."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    coeffs = [Fraction(int(v), 4) for v in rng.integers(-6, 7, size=degree + 1)]
    if coeffs[-1] == 0:
        coeffs[-1] = Fraction(int(rng.choice([-1, 1])) * int(rng.integers(1, 7)), 4)
    cut = origin_cutoff_spec(R, smoothness_order) if origin_vanishing else None
    return TestFunction(tuple(coeffs), boundary_order, cut)
