"""Adaptive Gauss-Kronrod quadrature of singular radial integrals.

Radial integrals over the ball are computed in the log coordinate
t = log(R/r), where r -> R becomes t -> 0 and r -> 0 becomes t -> inf. The
two end pieces are mapped once more by t = T exp(-+u) so that algebraic
endpoint behaviour (t^(-1+delta), t^(-1-delta)) turns into exponential decay
in u, handled by geometrically growing blocks.

The surface measure of the unit sphere is left out of every integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .logterm import TermSum

# Kronrod 15-point rule with embedded 7-point Gauss rule (abscissae on [-1, 1]).
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WK_FULL = np.concatenate([_WK[:-1], _WK[::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


class DivergentIntegralError(ArithmeticError):
    """The integrand does not decay at an infinite end of the domain."""


@dataclass
class QuadratureResult:
    value: float
    abs_error_estimate: float
    subdivisions: int
    converged: bool = True

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            self.value + other.value,
            self.abs_error_estimate + other.abs_error_estimate,
            self.subdivisions + other.subdivisions,
            self.converged and other.converged,
        )

    def scaled(self, c: float) -> "QuadratureResult":
        return QuadratureResult(self.value * c, self.abs_error_estimate * abs(c), self.subdivisions, self.converged)


ZERO = QuadratureResult(0.0, 0.0, 0, True)


def _gk15(f, a: np.ndarray, b: np.ndarray):
    with np.errstate(invalid="ignore", over="ignore"):
        return _gk15_raw(f, a, b)


def _gk15_raw(f, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    out = f(x.ravel())
    # an integrand may return (values, rounding noise of each value)
    noise = None
    if isinstance(out, tuple):
        out, noise = out
        noise = np.asarray(noise, dtype=float).reshape(x.shape)
        noise = np.where(np.isfinite(noise), noise, 0.0)
    y = np.asarray(out, dtype=float).reshape(x.shape)
    # nan comes from 0 * inf at an excluded endpoint; inf is real growth and is kept
    y = np.where(np.isnan(y), 0.0, y)
    k = (y @ _WK_FULL) * half
    g = (y @ _WG_FULL) * half
    mean = k / np.where(half != 0, half, 1.0) * 0.5
    resasc = np.abs(half) * (np.abs(y - mean[:, None]) @ _WK_FULL)
    diff = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * diff / np.where(resasc > 0, resasc, 1)) ** 1.5), diff)
    resabs = np.abs(half) * (np.abs(y) @ _WK_FULL)
    err = np.maximum(err, 50 * _EPS * resabs)
    floor = np.zeros_like(err)
    if noise is not None:
        floor = 50 * np.abs(half) * (noise @ _WK_FULL)
        err = np.maximum(err, floor)
    return k, err, floor


def gauss_kronrod(f: Callable, a: float, b: float, tol: float = 1e-10, abs_tol: float = 0.0,
                  limit: int = 2000) -> QuadratureResult:
    """Globally adaptive G7-K15 on [a, b]; f must accept numpy arrays."""
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    vals, errs, floors = _gk15(f, lo, hi)
    while True:
        total = vals.sum()
        err = errs.sum()
        # an error at the integrand's own rounding level cannot be reduced
        target = max(tol * abs(total), abs_tol, 2.0 * floors.sum())
        if err <= target:
            return QuadratureResult(float(total), float(err), len(lo), True)
        if len(lo) >= limit:
            return QuadratureResult(float(total), float(err), len(lo), False)
        # bisect every interval whose error exceeds its share of the target
        share = target / len(lo)
        bad = errs > share
        if not np.any(bad):
            bad = errs == errs.max()
        # keep the worst ones if the limit would be exceeded
        nbad = int(bad.sum())
        if len(lo) + nbad > limit:
            order = np.argsort(errs)[::-1][: max(1, limit - len(lo))]
            bad = np.zeros_like(bad)
            bad[order] = True
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate([lo[bad], mid])
        new_hi = np.concatenate([mid, hi[bad]])
        nv, ne, nf = _gk15(f, new_lo, new_hi)
        if np.all(new_hi - new_lo <= 4 * _EPS * np.maximum(np.abs(new_lo), 1e-300)):
            return QuadratureResult(float(total), float(err), len(lo), False)
        keep = ~bad
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        floors = np.concatenate([floors[keep], nf])


_U_MAX_DIRECT = 640.0
_U_MAX_LOG = 2.0e5


def _tail(g: Callable, tol: float, scale_hint: float, u_max: float) -> QuadratureResult:
    """Integral of g(u) over u in (0, inf) in geometrically growing blocks."""
    total = ZERO
    block_vals: list[float] = []
    lo, width = 0.0, 1.0
    quiet = 0
    while lo < u_max:
        hi = min(lo + width, u_max)
        ref = max(abs(total.value), scale_hint)
        res = gauss_kronrod(g, lo, hi, tol=tol, abs_tol=0.05 * tol * ref)
        if not math.isfinite(res.value):
            raise DivergentIntegralError("integrand overflows at a singular end")
        total = total + res
        block_vals.append(abs(res.value))
        ref = max(abs(total.value), scale_hint)
        if abs(res.value) + res.abs_error_estimate <= 0.01 * tol * ref and len(block_vals) >= 3:
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
        lo, width = hi, width * 2.0
    last, prev = block_vals[-1], block_vals[-2]
    if last == 0.0:
        return total
    if last >= 0.5 * prev:
        raise DivergentIntegralError(f"integrand does not decay at a singular end (block sizes {prev:.3e} -> {last:.3e})")
    return QuadratureResult(total.value, total.abs_error_estimate + last, total.subdivisions, False)


def _split(out):
    return out if isinstance(out, tuple) else (out, None)


def _end_piece(f, log_f, T: float, toward_zero: bool, tol: float, scale: float) -> QuadratureResult:
    sgn = -1.0 if toward_zero else 1.0
    if log_f is not None:
        lT = math.log(T)

        def g(u):
            lt = lT + sgn * u
            lv, lrel = _split(log_f(lt))
            with np.errstate(over="ignore"):
                v = np.exp(lv + lt)
            if lrel is None:
                return v
            with np.errstate(invalid="ignore", over="ignore"):
                return v, np.nan_to_num(v * np.exp(lrel), nan=0.0)

        return _tail(g, tol, scale, _U_MAX_LOG)

    def g(u):
        t = T * np.exp(sgn * u)
        return f(t) * t

    return _tail(g, tol, scale, _U_MAX_DIRECT)


def integrate_t(f: Callable | None = None, breakpoints: Sequence[float] = (), tol: float = 1e-10,
                support: tuple[float, float] = (0.0, math.inf), log_f: Callable | None = None) -> QuadratureResult:
    """Integral over the support within (0, inf) of f(t), split at breakpoints.

    Pass either ``f`` (any sign) or ``log_f``, the log of a nonnegative
    integrand as a function of log t; the latter reaches much further into
    slowly decaying tails. An infinite upper end or a zero lower end is
    handled by a second log map; finite ends are integrated directly.
    """
    if f is None:
        if log_f is None:
            raise ValueError("need f or log_f")

        def f(t):
            with np.errstate(divide="ignore", over="ignore"):
                lv, lrel = _split(log_f(np.log(t)))
                v = np.exp(lv)
            if lrel is None:
                return v
            with np.errstate(invalid="ignore", over="ignore"):
                return v, np.nan_to_num(v * np.exp(lrel), nan=0.0)

    t0, t1 = support
    pts = sorted({float(b) for b in breakpoints if t0 < b < t1})
    if not pts:
        if t0 == 0.0 and t1 == math.inf:
            pts = [1.0]
        elif t0 == 0.0:
            pts = [0.5 * t1]
        elif t1 == math.inf:
            pts = [2.0 * t0]
    edges = [t0] + pts + [t1]
    # middle pieces first: they set the scale used to stop the tails
    total = ZERO
    for a, b in zip(edges[1:-2], edges[2:-1]):
        total = total + gauss_kronrod(f, a, b, tol=tol)
    scale = abs(total.value)
    pieces = [(edges[0], edges[1])]
    if len(edges) > 2:
        pieces.append((edges[-2], edges[-1]))
    for a, b in pieces:
        if a == 0.0:
            res = _end_piece(f, log_f, b, True, tol, scale)
        elif b == math.inf:
            res = _end_piece(f, log_f, a, False, tol, scale)
        else:
            res = gauss_kronrod(f, a, b, tol=tol, abs_tol=0.1 * tol * scale)
        total = total + res
        scale = max(scale, abs(res.value))
    return total


# log-space evaluation of term sums ----------------------------------------------


def _recentre(coeffs: dict[int, Fraction], c: Fraction) -> list[Fraction]:
    """Coefficients of sum_n coeffs[n] x^n re-expanded in powers of (x - c), exactly."""
    deg = max(coeffs)
    out = [Fraction(0)] * (deg + 1)
    # Horner on the polynomial x -> c + h, carried out in the h basis
    for n in range(deg, -1, -1):
        nxt = [Fraction(0)] * (deg + 1)
        for i, d in enumerate(out):
            if d:
                nxt[i] += c * d
                if i + 1 <= deg:
                    nxt[i + 1] += d
        nxt[0] += coeffs.get(n, Fraction(0))
        out = nxt
    return out


class CompiledSum:
    """Vectorised evaluator for a concrete TermSum in the t = log(R/r) coordinate.

    The value is ``exp(-s_min * t) * R**s_min * S(t)``; ``log_abs`` returns
    log|S(t)| with its sign, leaving the exponential factor to the caller so
    that r-powers of several factors can be combined exactly.

    With ``center`` set, terms sharing a boundary power and log power are
    merged into one polynomial in r, re-expanded exactly about the centre and
    evaluated by Horner in r - center. Piecewise polynomials (cutoffs) have
    huge alternating monomial coefficients; this removes that cancellation.
    Only use it on pieces bounded away from r = 0.
    """

    def __init__(self, ts: TermSum, center=None):
        if ts.symbolic:
            raise ValueError("substitute alpha before evaluating")
        self.R = float(ts.R)
        self.logR = math.log(self.R)
        items = sorted(ts.terms.items())
        self.empty = not items
        self.s_min = ts.min_r_power()
        groups: dict[tuple, dict[int, Fraction]] = {}
        singles = []
        for (s, j, t), c in items:
            if center is not None and s.denominator == 1:
                groups.setdefault((j, t), {})[int(s)] = c(0)
            else:
                singles.append(((s, j, t), c(0)))
        # a group is (s0, j, t, recentred coefficients); a single term is a group of degree 0
        self.center = float(center) if center is not None else 0.0
        self.groups = []
        for (j, t), cs in groups.items():
            s0 = min(cs)
            shifted = {n - s0: v for n, v in cs.items()}
            d = _recentre(shifted, as_fraction_exact(center))
            self.groups.append((Fraction(s0), j, t, np.array([float(x) for x in d])))
        for (s, j, t), c in singles:
            self.groups.append((s, j, t, np.array([float(c)])))
        self.ds = np.array([float(g[0] - self.s_min) for g in self.groups])
        self.j = np.array([g[1] for g in self.groups], dtype=float)
        self.e = np.array([float(g[2]) for g in self.groups])
        self.any_j = bool(np.any(self.j))
        self.poly_groups = [i for i, g in enumerate(self.groups) if len(g[3]) > 1]
        coeff0 = np.array([g[3][0] if len(g[3]) == 1 else 1.0 for g in self.groups])
        self.sign0 = np.sign(coeff0)
        with np.errstate(divide="ignore"):
            self.logc0 = np.log(np.abs(coeff0))

    def log_abs(self, lt: np.ndarray):
        """Sign and log|S| as functions of lt = log t (t may overflow to inf)."""
        lt = np.asarray(lt, dtype=float)
        if self.empty:
            return np.zeros_like(lt), np.full_like(lt, -np.inf)
        with np.errstate(over="ignore"):
            t = np.exp(lt)
        with np.errstate(invalid="ignore"):
            elt = np.where(self.e[:, None] != 0, self.e[:, None] * lt[None, :], 0.0)
        lg = self.logc0[:, None] + elt
        sign = np.broadcast_to(self.sign0[:, None], lg.shape).copy()
        lg_abs = lg.copy()
        if self.poly_groups:
            h = self.R * np.exp(-t) - self.center
            for i in self.poly_groups:
                d = self.groups[i][3]
                val = np.zeros_like(h)
                mag = np.zeros_like(h)
                ah = np.abs(h)
                for coef in d[::-1]:
                    val = val * h + coef
                    mag = mag * ah + abs(coef)
                with np.errstate(divide="ignore"):
                    lg[i] += np.log(np.abs(val))
                    lg_abs[i] += np.log(mag)
                sign[i] = np.sign(val)
        if np.any(self.ds):
            nz = self.ds != 0
            shift = self.ds[nz, None] * (self.logR - t[None, :])
            lg[nz] += shift
            lg_abs[nz] += shift
        if self.any_j:
            logB = 2 * self.logR + np.log(-np.expm1(-2 * t))
            lg = lg + self.j[:, None] * logB[None, :]
            lg_abs = lg_abs + self.j[:, None] * logB[None, :]
        mx = np.max(lg_abs, axis=0)
        finite = np.isfinite(mx)
        safe = np.where(finite, mx, 0.0)
        terms = np.exp(lg - safe[None, :])
        acc = np.sum(sign * terms, axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = safe + np.log(np.abs(acc))
            # log of sum|terms| / |sum terms|, the cancellation factor
            self.last_log_cond = np.where(finite, np.log(np.sum(np.exp(lg_abs - safe[None, :]), axis=0))
                                          - np.log(np.abs(acc)), 0.0)
        out = np.where(finite, out, -np.inf)
        return np.sign(acc), out

    def __call__(self, t):
        shape = np.shape(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore"):
            sgn, lg = self.log_abs(np.log(t))
        return (sgn * np.exp(lg + float(self.s_min) * (self.logR - t))).reshape(shape)


def as_fraction_exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def integrate_radial(factors, r_power=0, log_weight=None, tol: float = 1e-10, measure_power=None,
                     extra_breaks: Sequence[float] = ()) -> QuadratureResult:
    """Integral over 0 < r < R of prod |F_i(r)|^{p_i} * r^r_power * log(aR/r)^w * r^(N-1) dr.

    ``factors`` is a list of (profile, power); profiles expose ``pieces`` of
    (r_lo, r_hi, TermSum), ``N`` and ``R``. ``log_weight`` is (a, w) or None.
    ``measure_power`` overrides the N-1 in r^(N-1) (use 0 for a line integral).
    """
    prof0 = factors[0][0]
    N, R = prof0.N, Fraction(prof0.R)
    mpow = Fraction(N - 1) if measure_power is None else Fraction(measure_power)
    # common refinement of breakpoints in r
    rb = sorted({float(x) for prof, _ in factors for x in prof.breakpoints()} | {0.0, float(R)})
    Rf = float(R)
    total = ZERO
    if log_weight is not None:
        a, w = float(log_weight[0]), float(log_weight[1])
        la = math.log(a)
    else:
        w, la = 0.0, 0.0
    for r_lo, r_hi in zip(rb[:-1], rb[1:]):
        mid = 0.5 * (r_lo + r_hi)
        comp = []
        zero = False
        for prof, pw in factors:
            ts = prof.piece_at(mid)
            if ts.is_zero() and pw > 0:
                zero = True
                break
            comp.append((CompiledSum(ts, center=Fraction(r_lo + r_hi) / 2 if r_lo > 0 else None), float(pw), Fraction(pw) if not isinstance(pw, float) else None))
        if zero:
            continue
        # exact t-coefficient of the exponential factor: r^S with S = sum p s_min + r_power + mpow + 1
        S = Fraction(r_power) + mpow + 1
        S_float = float(S)
        exact = True
        for c, pw, pwf in comp:
            if pwf is None:
                exact = False
                S_float += pw * float(c.s_min)
            else:
                S += pwf * c.s_min
        if exact:
            S_float = float(S)
        logR = math.log(Rf)

        def log_f(lt, comp=comp, S_float=S_float):
            acc = np.zeros_like(lt)
            cond = np.zeros_like(lt)
            if S_float:
                with np.errstate(over="ignore"):
                    t = np.exp(lt)
                acc = acc + S_float * (logR - t)
            for c, pw, _ in comp:
                _, lg = c.log_abs(lt)
                acc = acc + pw * lg
                cond = np.maximum(cond, np.log(pw) + c.last_log_cond) if pw > 0 else cond
            if w:
                if la:
                    acc = acc + w * (lt + np.log1p(la * np.exp(-lt)))
                else:
                    acc = acc + w * lt
            # relative rounding noise of the product, as a log
            return acc, cond + math.log(_EPS)

        t_lo = math.log(Rf / r_hi) if r_hi < Rf else 0.0
        t_hi = math.log(Rf / r_lo) if r_lo > 0 else math.inf
        breaks = [x for x in extra_breaks if t_lo < x < t_hi]
        total = total + integrate_t(None, breaks, tol=tol, support=(t_lo, t_hi), log_f=log_f)
    return total
