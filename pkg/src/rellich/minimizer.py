"""Discrete minimization of the critical quotient over radial profiles.

In t = log(R/r) the quotient no longer depends on R. Write A for the
operator taking u to r^k |nabla^k u| (up to sign):

    A = T_{m-1} ... T_0            (k = 2m)
    A = (d/dt + 2m) T_{m-1} ... T_0   (k = 2m + 1)
    T_j = d2/dt2 + (4j - N + 2) d/dt + 4j^2 - 2j(N - 2)

so the quotient is int |A u|^p dt / int |u|^p (t + log a)^-gamma dt.

For p = 2 the profile is sampled on a grid uniform in x = log t and the
problem becomes a banded generalized eigenproblem. Every factor of A is
evaluated at cell midpoints from a compact stencil. A plain central
difference would give the odd-even mode zero energy wherever the first-order
term dominates, and the smallest eigenvalue would collapse. For other p a
B-spline profile is optimized by L-BFGS, which only gives upper bounds.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.interpolate import BSpline
from scipy.optimize import minimize
from sklearn.base import BaseEstimator

from .exact import ParameterRangeError, ProblemParams, critical_constant

CORE = (1e-2, 10.0)  # fixed compact window for the concentration indicator


@dataclass(frozen=True)
class DiscreteGrid:
    """Nodes t_i = exp(i dx) for i0 <= i <= i1, so grids with one dx nest exactly."""

    i0: int
    i1: int
    dx: float

    def __post_init__(self):
        if self.dx <= 0:
            raise ParameterRangeError("dx must be positive")
        if self.n < 16:
            raise ParameterRangeError(f"need at least 16 nodes, got {self.n}")

    @classmethod
    def log_uniform(cls, t_min: float = 1e-3, t_max: float = 30.0, dx: float = 0.02) -> "DiscreteGrid":
        if not 0 < t_min < t_max:
            raise ParameterRangeError("need 0 < t_min < t_max")
        return cls(math.floor(math.log(t_min) / dx + 1e-9), math.ceil(math.log(t_max) / dx - 1e-9), dx)

    @property
    def n(self) -> int:
        return self.i1 - self.i0 + 1

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.i0, self.i1 + 1) * self.dx

    @property
    def t(self) -> np.ndarray:
        return np.exp(self.x)

    @property
    def t_min(self) -> float:
        return math.exp(self.i0 * self.dx)

    @property
    def t_max(self) -> float:
        return math.exp(self.i1 * self.dx)


def _midpoint_factor(n_in: int, x0: float, dx: float, c1: float, c0: float):
    """T = d2/dt2 + c1 d/dt + c0 from nodes x0 + i dx to the midpoints between them.

    Uses the 2-point first difference, the average of the two neighbouring
    second differences and the average value; rows need nodes i-1..i+2.
    """
    i = np.arange(1, n_in - 2)
    xm = x0 + (i + 0.5) * dx
    e1, e2 = np.exp(-xm), np.exp(-2 * xm)
    h2 = 0.5 / dx**2
    d1 = (c1 * e1 - e2) / dx  # coefficient of (u_{i+1} - u_i)
    cols = [i - 1, i, i + 1, i + 2]
    vals = [e2 * h2, -e2 * h2 - d1 + c0 / 2, -e2 * h2 + d1 + c0 / 2, e2 * h2]
    rows = np.tile(np.arange(len(i)), 4)
    op = sp.csr_matrix((np.concatenate(vals), (rows, np.concatenate(cols))), shape=(len(i), n_in))
    return op, x0 + 1.5 * dx


def _midpoint_first(n_in: int, x0: float, dx: float, c0: float):
    """d/dt + c0 to midpoints."""
    i = np.arange(n_in - 1)
    e1 = np.exp(-(x0 + (i + 0.5) * dx)) / dx
    rows = np.tile(np.arange(len(i)), 2)
    op = sp.csr_matrix((np.concatenate([-e1 + c0 / 2, e1 + c0 / 2]), (rows, np.concatenate([i, i + 1]))),
                       shape=(len(i), n_in))
    return op, x0 + 0.5 * dx


def operator_factors(N: int, k: int) -> list[tuple[float, float] | tuple[float]]:
    """(c1, c0) of each T_j, then (2m,) for the extra first-order factor when k is odd."""
    m = k // 2
    out: list = [(4 * j - N + 2, 4 * j * j - 2 * j * (N - 2)) for j in range(m)]
    if k % 2:
        out.append((2 * m,))
    return out


@dataclass
class DiscreteProblem:
    params: ProblemParams
    grid: DiscreteGrid
    stiffness: sp.csr_matrix  # K on the free nodes
    mass: np.ndarray  # diagonal of M on the free nodes
    pinned: int  # nodes held at zero at each end
    bandwidth: int

    @property
    def t(self) -> np.ndarray:
        return self.grid.t[self.pinned: self.grid.n - self.pinned]

    def banded_scaled(self) -> np.ndarray:
        """Upper band of M^-1/2 K M^-1/2 in LAPACK storage."""
        s = 1.0 / np.sqrt(self.mass)
        C = sp.diags(s) @ self.stiffness @ sp.diags(s)
        n, b = C.shape[0], self.bandwidth
        ab = np.zeros((b + 1, n))
        for d in range(b + 1):
            ab[b - d, d:] = C.diagonal(d)
        return ab

    def quotient(self, v: np.ndarray) -> float:
        return float(v @ (self.stiffness @ v) / (v @ (self.mass * v)))


def assemble(params: ProblemParams, grid: DiscreteGrid) -> DiscreteProblem:
    """Stiffness and mass of the p = 2 quotient on the grid.

    Both ends keep enough zero nodes that every energy row touching a free
    node has its whole stencil inside the window. Zero-padding a vector from a
    smaller window with the same dx then gives the same quotient, so minima
    never increase when the window grows.
    """
    if params.p != 2:
        raise ParameterRangeError(f"the eigenvalue path needs p = N/k = 2, got p = {params.p}")
    n, dx = grid.n, grid.dx
    A = sp.identity(n, format="csr")
    x0, n_cur = grid.i0 * dx, n
    for f in operator_factors(params.N, params.k):
        op, x0 = _midpoint_factor(n_cur, x0, dx, *f) if len(f) == 2 else _midpoint_first(n_cur, x0, dx, f[0])
        A, n_cur = (op @ A).tocsr(), op.shape[0]
    spans = [row.indices.max() - row.indices.min() for row in A if row.nnz]
    pinned = max(spans)
    if n - 2 * pinned < 2:
        raise ParameterRangeError("window too small for the stencil")
    free = slice(pinned, n - pinned)
    A = A[:, free]
    xr = x0 + np.arange(n_cur) * dx
    K = (A.T @ sp.diags(np.exp(xr) * dx) @ A).tocsr()
    t = grid.t[free]
    shift = math.log(float(params.a))
    mass = (t + shift) ** (-float(params.gamma)) * t * dx
    return DiscreteProblem(params, grid, K, mass, pinned, pinned)


@dataclass
class MinimizationResult:
    value: float
    t: np.ndarray
    profile: np.ndarray
    weights: np.ndarray  # mass quadrature weight per node
    iterations: int
    residual: float
    concentration_indicator: float
    inner_fraction: float  # weighted mass at t > CORE[1] (origin side)
    outer_fraction: float  # weighted mass at t < CORE[0] (boundary side)
    method: str = "eigen"
    second_value: float | None = None
    converged: bool = True
    notes: list[str] = field(default_factory=list)
    residual_norm: float | None = None  # ||K v - lam M v|| / ||K v||

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"minimum must be positive, got {self.value}")

    def cosine_similarity(self, exponent: float, central: float = 0.5) -> float:
        """Mass-weighted cosine between the profile and t^exponent.

        Only the central ``central`` fraction of the window (in log t) is
        used. The pinned ends force any truncated minimizer to bend to zero
        there, so over the full window the cosine tends to 2 sqrt(2)/pi.
        """
        x = np.log(self.t)
        lo, hi = x[0], x[-1]
        pad = (1 - central) / 2 * (hi - lo)
        sel = (x >= lo + pad) & (x <= hi - pad)
        u, v, w = self.profile[sel], self.t[sel] ** exponent, self.weights[sel]
        return abs(float(np.sum(u * v * w))) / math.sqrt(float(np.sum(u * u * w) * np.sum(v * v * w)))

    def profile_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(self.t, self.profile):
            w.writerow([repr(float(t)), repr(float(v))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "second_value": self.second_value,
            "method": self.method,
            "n": int(len(self.t)),
            "t_min": float(self.t[0]),
            "t_max": float(self.t[-1]),
            "iterations": self.iterations,
            "residual": self.residual,
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "concentration_indicator": self.concentration_indicator,
            "inner_fraction": self.inner_fraction,
            "outer_fraction": self.outer_fraction,
            "notes": list(self.notes),
        }


def _indicator(t, u, w):
    mass = u * u * w
    total = float(np.sum(mass))
    inner = float(np.sum(mass[t > CORE[1]])) / total
    outer = float(np.sum(mass[t < CORE[0]])) / total
    return inner + outer, inner, outer


class EigenSolveError(ArithmeticError):
    pass


def _band_to_general(ab: np.ndarray, shift: float) -> np.ndarray:
    """Symmetric upper band to the (l, u) = (b, b) layout of solve_banded, minus shift I."""
    b, n = ab.shape[0] - 1, ab.shape[1]
    g = np.zeros((2 * b + 1, n))
    g[: b + 1] = ab
    g[b] -= shift
    for d in range(1, b + 1):
        g[b + d, : n - d] = ab[b - d, d:]
    return g


def _backward_errors(K, mass, v, lam):
    """(componentwise, normwise) relative residuals of K v = lam M v."""
    Kv = K @ v
    r = Kv - lam * mass * v
    scale = abs(K) @ np.abs(v) + lam * mass * np.abs(v)
    comp = float(np.max(np.abs(r) / np.where(scale > 0, scale, 1.0)))
    return comp, float(np.linalg.norm(r) / np.linalg.norm(Kv))


def min_eigen(problem: DiscreteProblem, tol: float = 1e-10, max_iter: int = 50,
              degenerate_rel: float = 1e-6) -> MinimizationResult:
    """Smallest eigenpair of (K, M) by shifted inverse iteration on banded LU solves.

    The shift comes from LAPACK's banded selective eigenvalue solver (values
    only). Iteration stops once the componentwise backward error
    max_i |K v - lam M v|_i / (|K| |v| + lam M |v|)_i is at most ``tol``.
    The plain normwise residual is reported too; cancellation inside K v
    keeps it far above rounding level on wide windows.
    """
    ab = problem.banded_scaled()
    n, b = ab.shape[1], problem.bandwidth
    s = 1.0 / np.sqrt(problem.mass)
    K = problem.stiffness
    lam0 = sla.eig_banded(ab, select="i", select_range=(0, min(1, n - 1)), eigvals_only=True)
    second = float(lam0[1]) if len(lam0) > 1 else None
    degenerate = second is not None and second - lam0[0] <= degenerate_rel * abs(lam0[0])

    def iterate(shift, deflate=None):
        lu = _band_to_general(ab, shift)
        y = np.linspace(1.0, 2.0, n)  # deterministic start with no sign change
        it, res = 0, (math.inf, math.inf)
        lam, v = shift, s * y
        while it < max_iter:
            y = sla.solve_banded((b, b), lu, y)
            if deflate is not None:
                y -= (deflate @ y) * deflate
            y /= np.linalg.norm(y)
            it += 1
            v = s * y
            lam = float(v @ (K @ v)) / float(v @ (problem.mass * v))
            res = _backward_errors(K, problem.mass, v, lam)
            if res[0] <= tol:
                break
        return lam, y, v, it, res

    lam, y, v, it, res = iterate(lam0[0] * (1 - 1e-9))
    notes = []
    if degenerate:
        notes.append("lowest pair nearly degenerate; second value found by deflation")
        second = iterate(second * (1 - 1e-9), deflate=y)[0]
    converged = res[0] <= tol
    if not converged:
        notes.append(f"backward error {res[0]:.3g} above {tol:g} after {it} iterations")
    if lam <= 0:
        raise EigenSolveError(f"non-positive eigenvalue {lam}: discretization too ill-conditioned")
    v = v / v[np.argmax(np.abs(v))]
    t = problem.t
    ind, inner, outer = _indicator(t, v, problem.mass)
    return MinimizationResult(lam, t, v, problem.mass, it, res[0], ind, inner, outer, "eigen",
                              second, converged, notes, res[1])


# general p: spline profiles

def _operator_in_x(N: int, k: int) -> dict[tuple[int, int], float]:
    """A as sum of coef * exp(-n x) d^q/dx^q, keyed by (n, q)."""
    op = {(0, 0): 1.0}

    def dt(op):
        # d/dt (e^{-nx} D^q) = e^{-(n+1)x} (D^{q+1} - n D^q)
        out: dict = {}
        for (nn, q), c in op.items():
            out[(nn + 1, q + 1)] = out.get((nn + 1, q + 1), 0.0) + c
            if nn:
                out[(nn + 1, q)] = out.get((nn + 1, q), 0.0) - nn * c
        return out

    def add(*terms):
        out: dict = {}
        for scale, o in terms:
            for key, c in o.items():
                out[key] = out.get(key, 0.0) + scale * c
        return out

    for f in operator_factors(N, k):
        if len(f) == 2:
            d1 = dt(op)
            op = add((1.0, dt(d1)), (f[0], d1), (f[1], op))
        else:
            op = add((1.0, dt(op)), (f[0], op))
    return {key: c for key, c in op.items() if c}


@dataclass
class _SplineQuotient:
    energy_rows: np.ndarray  # A applied to each basis function at quadrature nodes
    value_rows: np.ndarray
    w_energy: np.ndarray
    w_mass: np.ndarray
    p: float

    def __call__(self, c):
        y = self.energy_rows @ c
        z = self.value_rows @ c
        ay, az = np.abs(y), np.abs(z)
        E = float(np.sum(self.w_energy * ay**self.p))
        Mm = float(np.sum(self.w_mass * az**self.p))
        gE = self.p * (self.w_energy * ay ** (self.p - 1) * np.sign(y)) @ self.energy_rows
        gM = self.p * (self.w_mass * az ** (self.p - 1) * np.sign(z)) @ self.value_rows
        Q = E / Mm
        return Q, (gE - Q * gM) / Mm


def spline_basis(params: ProblemParams, basis_size: int, t_min: float, t_max: float, gauss: int = 8):
    """Clamped B-splines uniform in log t with k zero coefficients at each end.

    Returns (knots, degree, quadrature x nodes, _SplineQuotient).
    """
    k, N = params.k, params.N
    deg = k + 1
    if basis_size < 2 * k + 2:
        raise ParameterRangeError(f"basis_size must be at least {2 * k + 2}")
    x0, x1 = math.log(t_min), math.log(t_max)
    n_int = basis_size - deg
    inner = np.linspace(x0, x1, n_int + 1)
    knots = np.concatenate([[x0] * deg, inner, [x1] * deg])
    spl = BSpline(knots, np.eye(basis_size), deg)
    g, gw = np.polynomial.legendre.leggauss(gauss)
    a, b = inner[:-1], inner[1:]
    xq = (0.5 * (b - a)[:, None] * g + 0.5 * (a + b)[:, None]).ravel()
    wq = (0.5 * (b - a)[:, None] * gw).ravel()
    free = slice(k, basis_size - k)
    ders = {q: spl.derivative(q)(xq)[:, free] if q else spl(xq)[:, free] for q in range(k + 1)}
    rows = np.zeros((len(xq), basis_size - 2 * k))
    for (n, q), c in _operator_in_x(N, k).items():
        rows += (c * np.exp(-n * xq))[:, None] * ders[q]
    t = np.exp(xq)
    shift = math.log(float(params.a))
    quot = _SplineQuotient(rows, ders[0], wq * t, wq * t * (t + shift) ** (-float(params.gamma)), float(params.p))
    return knots, deg, xq, quot


def _project(values: np.ndarray, quot: _SplineQuotient) -> np.ndarray:
    w = np.sqrt(quot.w_mass)
    coef, *_ = np.linalg.lstsq(quot.value_rows * w[:, None], values * w, rcond=None)
    return coef


def _quadratic_forms(quot: _SplineQuotient) -> tuple[np.ndarray, np.ndarray]:
    """Gram matrices of the p = 2 energy and mass in the spline basis."""
    E = quot.energy_rows.T @ (quot.w_energy[:, None] * quot.energy_rows)
    M = quot.value_rows.T @ (quot.w_mass[:, None] * quot.value_rows)
    return 0.5 * (E + E.T), 0.5 * (M + M.T)


def _initial_profile(init, quot: _SplineQuotient, t: np.ndarray, nfree: int) -> np.ndarray:
    if isinstance(init, np.ndarray) and init.shape == (nfree,):
        return init.astype(float)
    if hasattr(init, "value_at_t"):
        vals = np.array([init.value_at_t(ti) for ti in t])
    else:
        vals = np.asarray([init(ti) for ti in t], dtype=float)
    return _project(vals, quot)


def minimize_quotient_general_p(params: ProblemParams, basis_size: int = 32, init=None,
                                t_min: float = 1e-3, t_max: float = 30.0, max_iter: int = 5000,
                                gtol: float = 1e-10) -> MinimizationResult:
    """Best quotient over the spline space; an upper bound on the infimum.

    The start is the p = 2 minimizer in the same basis (a small dense
    generalized eigenproblem), or ``init``: a callable of t, a RadialProfile
    or a coefficient vector. L-BFGS runs in coordinates whitened by the
    Cholesky factor of the p = 2 energy, and the returned value is never above
    the starting one. At p = 2 the start is already optimal.
    """
    if params.p <= 1:
        raise ParameterRangeError("need p > 1")
    knots, deg, xq, quot = spline_basis(params, basis_size, t_min, t_max)
    t = np.exp(xq)
    nfree = quot.value_rows.shape[1]
    E2, M2 = _quadratic_forms(quot)
    d = 1.0 / np.sqrt(np.diag(E2))
    L = np.linalg.cholesky(d[:, None] * E2 * d[None, :])
    if init is None:
        ev, vec = sla.eigh(d[:, None] * E2 * d[None, :], d[:, None] * M2 * d[None, :],
                           subset_by_index=[0, 0])
        c0 = d * vec[:, 0]
    else:
        c0 = _initial_profile(init, quot, t, nfree)

    # c = d * L^-T z
    def to_c(z):
        return d * sla.solve_triangular(L, z, lower=True, trans="T")

    def fun(z):
        Q, g = quot(to_c(z))
        return Q, sla.solve_triangular(L, d * g, lower=True)

    z0 = L.T @ (c0 / d)
    z0 /= np.linalg.norm(z0)
    q0 = fun(z0)[0]
    notes = ["upper bound only (best effort)"]
    if params.p == 2 and init is None:
        z, value, nit, success, gnorm = z0, q0, 0, True, float(np.linalg.norm(fun(z0)[1]))
    else:
        res = minimize(fun, z0, jac=True, method="L-BFGS-B",
                       options={"maxiter": max_iter, "gtol": gtol, "ftol": 1e-15, "maxcor": 30})
        z, value, nit, success = res.x, float(res.fun), int(res.nit), bool(res.success)
        gnorm = float(np.linalg.norm(res.jac))
        if value > q0:
            z, value = z0, q0
        if not success:
            notes.append(f"descent stopped: {res.message}")
    c = to_c(z)
    prof = quot.value_rows @ c
    prof = prof / prof[np.argmax(np.abs(prof))]
    ind, inner, outer = _indicator(t, prof, quot.w_mass)
    out = MinimizationResult(value, t, prof, quot.w_mass, nit, gnorm, ind, inner, outer, "spline-lbfgs",
                             None, success, notes)
    out.coefficients = c / np.max(np.abs(c))
    return out


def refine_coefficients(params: ProblemParams, coef: np.ndarray, basis_size: int, t_min: float,
                        t_max: float, new_size: int) -> np.ndarray:
    """Coefficients on a finer nested basis representing the same spline (least squares on the new nodes)."""
    knots, deg, _, _ = spline_basis(params, basis_size, t_min, t_max)
    full = np.zeros(basis_size)
    full[params.k: basis_size - params.k] = coef
    old = BSpline(knots, full, deg)
    _, _, xq, quot = spline_basis(params, new_size, t_min, t_max)
    return _project(old(xq), quot)


# refinement studies

def default_windows(params: ProblemParams, levels: int, t_min: float = 1e-3, t_max: float = 30.0,
                    factor: float = 100.0) -> list[tuple[float, float]]:
    """Nested windows grown toward the endpoint where mass escapes.

    gamma = p widens t_max (origin), gamma = N widens t_min (boundary), and
    interior gamma widens both sides by sqrt(factor).
    """
    g = params.gamma
    out = []
    for lev in range(levels):
        if g == params.p:
            out.append((t_min, t_max * factor**lev))
        elif g == params.N:
            out.append((t_min / factor**lev, t_max))
        else:
            f = math.sqrt(factor) ** lev
            out.append((t_min / f, t_max * f))
    return out


@dataclass
class RefinementRow:
    level: int
    n: int
    t_min: float
    t_max: float
    value: float
    indicator: float
    richardson: float | None = None


@dataclass
class RefinementStudy:
    params: ProblemParams
    dx: float
    rows: list[RefinementRow]
    results: list[MinimizationResult]
    reference: float | None
    notes: list[str] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        return [r.value for r in self.rows]

    @property
    def indicators(self) -> list[float]:
        return [r.indicator for r in self.rows]

    def relative_gap(self) -> float | None:
        if not self.reference:
            return None
        return self.rows[-1].value / self.reference - 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        rich = any(r.richardson is not None for r in self.rows)
        w.writerow(["level", "n", "t_min", "t_max", "value", "indicator"] + (["richardson"] if rich else []))
        for r in self.rows:
            row = [r.level, r.n, repr(r.t_min), repr(r.t_max), repr(r.value), repr(r.indicator)]
            if rich:
                row.append("" if r.richardson is None else repr(r.richardson))
            w.writerow(row)
        return buf.getvalue()

    def to_dict(self) -> dict:
        p = self.params
        return {
            "params": {"N": p.N, "k": p.k, "p": str(p.p), "gamma": str(p.gamma), "R": str(p.R), "a": str(p.a)},
            "dx": self.dx,
            "reference": self.reference,
            "relative_gap": self.relative_gap(),
            "rows": [dict(vars(r)) for r in self.rows],
            "residuals": [res.residual for res in self.results],
            "converged": all(res.converged for res in self.results),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def _reference(params: ProblemParams) -> float | None:
    g = params.gamma
    if params.k == 1 and g == params.N:
        # first-order critical Hardy constant ((p - 1)/p)^p
        return float((params.p - 1) / params.p) ** float(params.p)
    if g in (params.p, params.N):
        return float(critical_constant(params))
    if g < params.p or g > params.N:
        return 0.0
    return None


def refinement_study(params: ProblemParams, windows=None, levels: int = 4, dx: float = 0.02,
                     richardson: bool = False, tol: float = 1e-10) -> RefinementStudy:
    """Discrete minima on nested windows with a common dx (p = 2 only).

    With ``richardson`` each level is also solved at dx/2 and the
    second-order extrapolation (4 v(dx/2) - v(dx))/3 is reported.
    """
    windows = list(windows) if windows is not None else default_windows(params, levels)
    if len(windows) < 3:
        raise ParameterRangeError("a refinement study needs at least 3 levels")
    rows, results = [], []
    for lev, (lo, hi) in enumerate(windows):
        grid = DiscreteGrid.log_uniform(lo, hi, dx)
        res = min_eigen(assemble(params, grid), tol=tol)
        rich = None
        if richardson:
            fine = min_eigen(assemble(params, DiscreteGrid.log_uniform(lo, hi, dx / 2)), tol=tol)
            rich = (4 * fine.value - res.value) / 3
        results.append(res)
        rows.append(RefinementRow(lev, grid.n, grid.t_min, grid.t_max, res.value,
                                  res.concentration_indicator, rich))
    notes = [f"concentration indicator: weighted mass outside t in [{CORE[0]:g}, {CORE[1]:g}]",
             "zero boundary values are imposed at both ends of each window"]
    return RefinementStudy(params, dx, rows, results, _reference(params), notes)


class CriticalRellichMinimizer(BaseEstimator):
    """Estimator wrapper around refinement_study (p = 2) or the spline path (other p)."""

    def __init__(self, N=4, k=2, gamma=None, a=1, levels=4, dx=0.02, t_min=1e-3, t_max=30.0,
                 factor=100.0, basis_size=32, richardson=False, tol=1e-10):
        self.N = N
        self.k = k
        self.gamma = gamma
        self.a = a
        self.levels = levels
        self.dx = dx
        self.t_min = t_min
        self.t_max = t_max
        self.factor = factor
        self.basis_size = basis_size
        self.richardson = richardson
        self.tol = tol

    def _params(self) -> ProblemParams:
        g = None if self.gamma is None else Fraction(self.gamma).limit_denominator(10**6)
        return ProblemParams(self.N, self.k, g, a=self.a)

    def fit(self, X=None, y=None):
        params = self._params()
        if params.p == 2:
            wins = default_windows(params, self.levels, self.t_min, self.t_max, self.factor)
            self.study_ = refinement_study(params, wins, dx=self.dx, richardson=self.richardson, tol=self.tol)
            self.result_ = self.study_.results[-1]
        else:
            self.study_ = None
            self.result_ = minimize_quotient_general_p(params, self.basis_size, t_min=self.t_min, t_max=self.t_max)
        self.value_ = self.result_.value
        self.profile_ = self.result_.profile
        self.t_ = self.result_.t
        return self
