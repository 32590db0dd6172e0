"""Command-line front end: every report as CSV or JSON, nonzero exit on any failed check."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from ._validation import RunConfig, parse_fraction, parse_fraction_list, validate
from .exact import (
    ExactConstant,
    ParameterRangeError,
    critical_boundary_constant,
    critical_constant,
    critical_origin_constant,
    gap_analysis,
    subcritical_rellich_constant,
)

OUTSIDE = "0 (γ outside [p,N])"


class Report:
    """A JSON-ready payload, its CSV rendering and whether every check passed."""

    def __init__(self, payload: dict, rows: list[list], header: list[str], passed: bool = True):
        self.payload, self.rows, self.header, self.passed = payload, rows, header, passed

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return dump_json(self.payload)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()


def dump_json(obj) -> str:
    """Deterministic UTF-8 JSON; parsing and re-dumping the text reproduces it byte for byte."""
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def _const_entry(c: ExactConstant) -> dict:
    d = {"render": c.render()}
    d.update(c.to_dict())
    return d


def cmd_constants(cfg: RunConfig) -> Report:
    params = cfg.params()
    out: dict = {"N": params.N, "k": params.k, "p": str(params.p)}
    entries = []
    if cfg.p is not None:
        entries.append((f"A_{params.k},{cfg.p}", subcritical_rellich_constant(params.N, params.k, cfg.p)))
    entries.append(("R_rad_origin", critical_origin_constant(params)))
    entries.append(("R_rad_boundary", critical_boundary_constant(params)))
    consts = {name: _const_entry(c) for name, c in entries}
    rows = [[name, d["render"], d["exact"] or "", d["decimal"]] for name, d in consts.items()]
    if cfg.gamma is not None:
        g = params.gamma
        if g < params.p or g > params.N:
            consts["R_rad_gamma"] = {"gamma": str(g), "value": OUTSIDE}
            rows.append(["R_rad_gamma", OUTSIDE, "0", "0"])
        elif g in (params.p, params.N):
            d = _const_entry(critical_constant(params))
            consts["R_rad_gamma"] = dict({"gamma": str(g)}, **d)
            rows.append(["R_rad_gamma", d["render"], d["exact"] or "", d["decimal"]])
        else:
            msg = "no closed form (γ interior to (p,N)); see the minimize subcommand"
            consts["R_rad_gamma"] = {"gamma": str(g), "value": msg}
            rows.append(["R_rad_gamma", msg, "", ""])
    out["constants"] = consts
    return Report(out, rows, ["name", "render", "exact", "decimal"])


def cmd_coeffs(cfg: RunConfig) -> Report:
    from .logterm import closed_form_top_coefficient, coeff_table, verify_table

    table = coeff_table(cfg.N, cfg.m)
    checks = [verify_table(cfg.N, mm, table) for mm in range(1, cfg.m + 1)]
    top_ok = all(table.C[(mm, 2 * mm - 1)] == closed_form_top_coefficient(cfg.N, mm) for mm in range(1, cfg.m + 1))
    ok = all(c.passed for c in checks) and top_ok
    mismatch = next((c.mismatch for c in checks if not c.passed), None)
    payload = {
        "N": cfg.N,
        "m": cfg.m,
        "C": {f"C[{mm}][{j}]": str(v) for (mm, j), v in sorted(table.C.items())},
        "D": {f"D[{mm}][{j}]": str(v) for (mm, j), v in sorted(table.D.items())},
        "verified": ok,
        "mismatch": None if mismatch is None else [str(x) for x in mismatch],
    }
    rows = [["C", mm, j, str(v)] for (mm, j), v in sorted(table.C.items())]
    rows += [["D", mm, j, str(v)] for (mm, j), v in sorted(table.D.items())]
    return Report(payload, rows, ["kind", "m", "j", "value"], ok)


def cmd_sweep(cfg: RunConfig) -> Report:
    from .rayleigh import epsilon_sweep

    res = epsilon_sweep(cfg.extra["family"], cfg.params(), cfg.eps, cfg.tol, cfg.extra.get("adapted", False))
    ok = all(r.converged for r in res.rows)
    text = res.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    return Report(res.to_dict(), rows[1:], rows[0], ok)


def cmd_harness(cfg: RunConfig) -> Report:
    from .harness import run_harness

    names = cfg.extra.get("names")
    rep = run_harness(seed=cfg.seed, cases=cfg.cases or 100, names=names)
    rows = [[n, s.cases, s.passed, repr(s.to_dict()["worst_slack"]), repr(s.to_dict()["worst_relative_slack"])]
            for n, s in rep.summaries.items()]
    return Report(rep.to_dict(), rows, ["inequality", "cases", "passed", "worst_slack", "worst_relative_slack"],
                  rep.all_passed)


def cmd_minimize(cfg: RunConfig) -> Report:
    from .minimizer import default_windows, minimize_quotient_general_p, refinement_study

    params = cfg.params()
    levels, dx = cfg.extra.get("levels", 4), cfg.extra.get("dx", 0.02)
    t_min, t_max = cfg.extra.get("t_min", 1e-3), cfg.extra.get("t_max", 30.0)
    profile_out = cfg.extra.get("profile_out")
    if params.p == 2:
        wins = default_windows(params, levels, t_min, t_max, cfg.extra.get("factor", 100.0))
        study = refinement_study(params, wins, dx=dx, richardson=cfg.extra.get("richardson", False), tol=cfg.tol)
        ok = all(r.converged for r in study.results)
        ref = study.reference
        if ref:
            ok = ok and all(v >= ref * (1 - 5 * cfg.tol) for v in study.values)
        text = study.to_csv()
        rows = list(csv.reader(io.StringIO(text)))
        payload = study.to_dict()
        final = study.results[-1]
        report = Report(payload, rows[1:], rows[0], ok)
    else:
        final = minimize_quotient_general_p(params, cfg.extra.get("basis", 32), t_min=t_min, t_max=t_max)
        payload = {"params": {"N": params.N, "k": params.k, "p": str(params.p), "gamma": str(params.gamma),
                              "R": str(params.R), "a": str(params.a)},
                   "result": final.to_dict()}
        # an upper bound can only fail by undercutting a known constant
        ok = True
        try:
            ref = float(critical_constant(params))
            payload["reference"] = ref
            ok = final.value >= ref * (1 - 5 * cfg.tol) - 1e-8
        except ParameterRangeError:
            payload["reference"] = None
        row = [0, len(final.t), repr(float(final.t[0])), repr(float(final.t[-1])), repr(final.value),
               repr(final.concentration_indicator)]
        report = Report(payload, [row], ["level", "n", "t_min", "t_max", "value", "indicator"], ok)
    if profile_out:
        with open(profile_out, "w", encoding="utf-8", newline="") as fh:
            fh.write(final.profile_csv())
    return report


def cmd_transform_check(cfg: RunConfig) -> Report:
    from .harness import sample_transform_cases, transform_equivalence

    reps = [transform_equivalence(w, p, alpha, N) for N, p, alpha, w in sample_transform_cases(cfg.seed, cfg.cases or 10)]
    rel = cfg.extra.get("rel", 1e-8)
    ok = all(r.passed(rel) for r in reps)
    rows = []
    for r in reps:
        q1, q2 = r.quotients
        rows.append([r.N, repr(r.p), repr(r.alpha), repr(r.beta),
                     repr(r.identities[0].rel_diff), repr(r.identities[1].rel_diff), repr(q1), repr(q2), r.passed(rel)])
    payload = {"seed": cfg.seed, "cases": [r.to_dict() for r in reps], "all_passed": ok}
    return Report(payload, rows, ["N", "p", "alpha", "beta", "laplacian_rel_diff", "potential_rel_diff",
                                  "quotient_whole_space", "quotient_ball", "passed"], ok)


def cmd_gap(cfg: RunConfig) -> Report:
    from .harness import chain_products_match_gap

    rep = gap_analysis(cfg.m)
    payload = rep.to_dict()
    ok = True
    if cfg.m == 2:
        ok = chain_products_match_gap(4 * cfg.m)
        payload["chains_match"] = ok
    rows = [[k, v] for k, v in payload.items() if not isinstance(v, dict)]
    for k, v in payload["chains"].items():
        rows.append([f"chains.{k}", v if isinstance(v, str) or v is None else " * ".join(v)])
    return Report(payload, rows, ["field", "value"], ok)


COMMANDS = {
    "constants": cmd_constants,
    "coeffs": cmd_coeffs,
    "sweep": cmd_sweep,
    "harness": cmd_harness,
    "minimize": cmd_minimize,
    "transform-check": cmd_transform_check,
    "gap": cmd_gap,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    g = common.add_argument_group("parameters")
    g.add_argument("--N", type=int, help="space dimension")
    g.add_argument("--k", type=int, help="derivative order")
    g.add_argument("--m", type=int, help="order m (coeffs: Laplacian power; gap: N = 4m)")
    g.add_argument("--p", type=parse_fraction, help="subcritical exponent for A_{k,p} (constants)")
    g.add_argument("--gamma", type=parse_fraction, help="log-weight exponent; default p = N/k")
    g.add_argument("--R", type=parse_fraction, default=Fraction(1), help="ball radius")
    g.add_argument("--a", type=parse_fraction, default=Fraction(1), help="log weight log(aR/|x|), a >= 1")
    g.add_argument("--eps", type=parse_fraction_list, help="comma-separated decreasing eps list (sweep)")
    g.add_argument("--tol", type=float, default=1e-10, help="relative tolerance")
    g.add_argument("--seed", type=int, default=42, help="random seed")
    g.add_argument("--cases", type=int, help="cases per inequality (harness, default 100) or sampled cases "
                                             "(transform-check, default 10)")
    g.add_argument("--format", dest="output_format", choices=("csv", "json"), default="json")
    g.add_argument("--out", dest="output_path", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="rellich",
        description="Exact constants and numerical checks of critical Rellich inequalities. "
                    "Defaults: R=1, a=1, tol=1e-10, seed=42. Exit status is 1 if any check fails, "
                    "2 on invalid parameters.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    kw = dict(parents=[common], formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub.add_parser("constants", help="exact critical constants", **kw)
    sub.add_parser("coeffs", help="coefficient tables of iterated Laplacians of log powers", **kw)
    sp = sub.add_parser("sweep", help="Rayleigh quotients of a test family along eps", **kw)
    sp.add_argument("--family", choices=("phi", "psi"), default="phi")
    sp.add_argument("--adapted", action="store_true", help="use the gamma-adapted exponent")
    hp = sub.add_parser("harness", help="seeded inequality checks", **kw)
    hp.add_argument("--names", type=lambda s: [x for x in s.split(",") if x], help="subset of inequalities")
    mp = sub.add_parser("minimize", help="discrete minimization with a refinement study", **kw)
    mp.add_argument("--levels", type=int, default=4, help="refinement levels (p = 2)")
    mp.add_argument("--dx", type=float, default=0.02, help="grid spacing in log t")
    mp.add_argument("--t-min", dest="t_min", type=float, default=1e-3)
    mp.add_argument("--t-max", dest="t_max", type=float, default=30.0)
    mp.add_argument("--factor", type=float, default=100.0, help="window growth per level")
    mp.add_argument("--richardson", action="store_true", help="add a dx/2 extrapolation column")
    mp.add_argument("--basis", type=int, default=32, help="spline basis size (p != 2)")
    mp.add_argument("--profile-out", dest="profile_out", help="write the final (t, value) profile as CSV")
    tp = sub.add_parser("transform-check", help="change of variables between R^N and the ball", **kw)
    tp.add_argument("--rel", type=float, default=1e-8, help="relative tolerance of the identities")
    sub.add_parser("gap", help="compare A(4m, m)^2 with the sharp constant", **kw)
    return parser


_CONFIG_FIELDS = ("N", "k", "m", "p", "gamma", "R", "a", "eps", "tol", "seed", "cases", "output_format", "output_path")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns).copy()
    sc = d.pop("subcommand")
    base = {f: d.pop(f) for f in _CONFIG_FIELDS}
    return RunConfig(sc, extra=d, **base)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = config_from_args(ns)
    try:
        validate(cfg)
        report = COMMANDS[cfg.subcommand](cfg)
    except ParameterRangeError as exc:
        parser.error(f"{cfg.subcommand}: {exc}")
    text = report.render(cfg.output_format)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
