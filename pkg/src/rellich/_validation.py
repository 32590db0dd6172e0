"""Run configuration and the per-subcommand parameter windows."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import ParameterRangeError, ProblemParams

SUBCOMMANDS = ("constants", "coeffs", "sweep", "harness", "minimize", "transform-check", "gap")


def parse_fraction(text: str) -> Fraction:
    """'3/2', '1.5' or '2' as an exact Fraction (decimals are read exactly)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterRangeError(f"not a rational number: {text!r}") from exc


def parse_fraction_list(text: str) -> list[Fraction]:
    return [parse_fraction(x) for x in text.split(",") if x.strip()]


@dataclass
class RunConfig:
    subcommand: str
    N: int | None = None
    k: int | None = None
    m: int | None = None
    p: Fraction | None = None
    gamma: Fraction | None = None
    R: Fraction = Fraction(1)
    a: Fraction = Fraction(1)
    eps: list[Fraction] | None = None
    tol: float = 1e-10
    seed: int = 42
    cases: int | None = None
    output_format: str = "json"
    output_path: str | None = None
    extra: dict = field(default_factory=dict)

    def params(self) -> ProblemParams:
        return ProblemParams(self.N, self.k, self.gamma, self.R, self.a)


def _need(cfg: RunConfig, *names: str):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise ParameterRangeError(f"{cfg.subcommand} needs --{', --'.join(missing)}")


def validate(cfg: RunConfig) -> RunConfig:
    """Raise ParameterRangeError naming the violated window; return cfg otherwise."""
    if cfg.subcommand not in SUBCOMMANDS:
        raise ParameterRangeError(f"unknown subcommand {cfg.subcommand!r}")
    if cfg.output_format not in ("csv", "json"):
        raise ParameterRangeError("--format must be csv or json")
    if not cfg.tol > 0:
        raise ParameterRangeError("--tol must be positive")
    if cfg.cases is not None and cfg.cases < 1:
        raise ParameterRangeError("--cases must be at least 1")
    sc = cfg.subcommand
    if sc in ("constants", "sweep", "minimize"):
        _need(cfg, "N", "k")
        params = cfg.params()  # checks N >= 2, k >= 1, N > k, R > 0, a >= 1
        if sc == "constants":
            if cfg.k < 2:
                raise ParameterRangeError("critical constants need k >= 2")
            if cfg.p is not None and not 1 < cfg.p < params.p:
                raise ParameterRangeError(f"subcritical p must satisfy 1 < p < N/k = {params.p}")
        if sc == "sweep":
            if cfg.k < 2:
                raise ParameterRangeError("sweeps need k >= 2")
            if cfg.eps is not None and (not cfg.eps or any(e <= 0 for e in cfg.eps)):
                raise ParameterRangeError("--eps values must be positive")
            if cfg.extra.get("family") not in ("phi", "psi"):
                raise ParameterRangeError("--family must be phi or psi")
        if sc == "minimize":
            if cfg.extra.get("levels", 3) < 3 and params.p == 2:
                raise ParameterRangeError("a refinement study needs --levels >= 3")
            if not cfg.extra.get("dx", 0.02) > 0:
                raise ParameterRangeError("--dx must be positive")
    if sc == "coeffs":
        _need(cfg, "N", "m")
        if cfg.m < 1 or cfg.N < 2:
            raise ParameterRangeError("coeffs needs m >= 1 and N >= 2")
    if sc == "gap":
        _need(cfg, "m")
        if cfg.m < 2:
            raise ParameterRangeError("gap needs m >= 2 (N = 4m)")
    return cfg
