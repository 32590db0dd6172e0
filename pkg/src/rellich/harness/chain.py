"""The two derivations of the fourth-order critical inequality on the unit ball of R^8.

Both chains bound int |Delta^2 u|^2 from below by a multiple of
int u^2 |x|^-8 log(1/|x|)^-2. The first goes through the vector Rellich
inequality for v = grad u and ends with A(8,2)^2 = 100; the second goes
through the weighted Laplacian and ends with the sharp constant 576. For a
radial u the vector step can be sharpened to 144 (or 77 for all curl-free
fields), which closes the gap. Every step is checked as a Margin on u.
"""

from __future__ import annotations

from fractions import Fraction
from math import prod

from ..exact import gap_analysis
from .checks import DEFAULT_TOL, Margin, _derivative, _integral, _laplacian, _margin, _Side
from .testfunctions import TestFunction

F = Fraction


def chain_factors(N: int = 8) -> dict[str, tuple[Fraction, ...]]:
    """Constants of each step, for general N (the displayed chains fix N = 8)."""
    return {
        "via_vector_rellich": (F(N * N, 4), F((N - 6) * (N + 2), 4) ** 2, F(1, 4)),
        "via_weighted_laplacian": (F(N * (N - 4), 4) ** 2, (N - F(N - 4, 2)) ** 2, F(1, 4)),
        "radial_vector_step": (F(N - 4, 2) ** 2, F(N + 4, 2) ** 2),
    }


def gap_chain_check(u: TestFunction, N: int = 8, tol: float = DEFAULT_TOL) -> list[Margin]:
    """Margins of every step of both chains plus the two end-to-end inequalities.

    Quantities on u (radial, vanishing to order >= 3 at |x| = 1), sphere factor dropped:
      E4 = int |Delta^2 u|^2,  G = int |(Delta u)'|^2 r^-2,  W = int |Delta u|^2 r^-4,
      H = int |u'|^2 r^-6,     M = int u^2 r^-8 log(1/r)^-2.
    """
    if u.boundary_order < 3:
        raise ValueError("the chain needs u to vanish to order >= 3 at the boundary")
    prof = u.profile(N, 1)
    lap = _laplacian(prof)
    E4 = _integral(_laplacian(lap), 2, tol=tol)
    G = _integral(_derivative(lap), 2, -2, tol=tol)
    W = _integral(lap, 2, -4, tol=tol)
    H = _integral(_derivative(prof), 2, -6, tol=tol)
    M = _integral(prof, 2, -8, -2, tol=tol)

    def m(ident, c, small, big) -> Margin:
        return _margin(ident, _Side().add(float(c), small), _Side().add(1.0, big), N=N, constant=F(c))

    vec, lapw, rad = chain_factors(N).values()
    out = [
        m("two_to_one", vec[0], G, E4),
        m("vector_rellich", vec[1], H, G),
        m("log_hardy", vec[2], M, H),
        m("weighted_rellich", lapw[0], W, E4),
        m("musina_step", lapw[1], H, W),
        m("h1to0_step", rad[0], W, G),
        m("curl_free_vector_rellich", 77, H, G),
        m("radial_vector_rellich", prod(rad), H, G),
        m("chain_via_vector_rellich", prod(vec), M, E4),
        m("chain_via_weighted_laplacian", prod(lapw), M, E4),
    ]
    return out


def chain_products_match_gap(N: int = 8) -> bool:
    """Both chain products equal the gap report's entries (100 and 576 at N = 8)."""
    if N % 4:
        return False
    rep = gap_analysis(N // 4)
    vec, lapw, _ = chain_factors(N).values()
    return (rep.as_chain is not None and prod(vec) == rep.A_squared == prod(rep.as_chain)
            and prod(lapw) == rep.R_rad == prod(rep.our_chain))
