"""Command-line front end.

Exit codes: 0 success / verification passed, 1 verification failed,
2 usage or domain error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys

import numpy as np

from .analysis import (
    DEFAULT_LADDER,
    PreconditionError,
    SearchFailure,
    boundary_probe,
    classify_regime,
    classify_smoothness,
    find_nonmonotone_witness,
    glue,
)
from .core import (
    S_MAX,
    S_MIN,
    Branch,
    BranchSolution,
    DomainError,
    EquationParams,
    PeriodicMap,
    WindowError,
    derivative,
    evaluate,
    residual_pulled_back,
    s_to_x,
)
from .sweeps import SUITES, run_suite

RESIDUAL_TOL = 1e-10
CSV_COLUMNS = ("x", "s", "f", "f_prime", "residual")

DEFAULT_TOLS = {
    "residual": 1e-10,
    "roundtrip": 1e-9,
    "derivative": 1e-5,
    "linearity": 1e-12,
    "witness": 0.0,
    "ode": 1e-8,
}


class UsageError(Exception):
    pass


def fmt(v: float) -> str:
    """17 significant digits: enough for any binary64 to round-trip."""
    return format(v, ".17g")


# ---------------------------------------------------------------------------
# PSpec: const:<v>  |  fourier:<a0>[;<a_j>,<b_j>]...
# ---------------------------------------------------------------------------


def _number(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ValueError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ValueError(f"not a finite number: {text!r}")
    return v


def parse_pspec(text: str) -> PeriodicMap:
    kind, sep, body = text.strip().partition(":")
    if not sep:
        raise ValueError(f"p-spec needs a 'const:' or 'fourier:' prefix: {text!r}")
    if kind == "const":
        return PeriodicMap(_number(body.strip()))
    if kind != "fourier":
        raise ValueError(f"unknown p-spec kind {kind!r}")
    head, *pairs = body.split(";")
    harmonics = []
    for j, pair in enumerate(pairs, start=1):
        parts = [t.strip() for t in pair.split(",")]
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"harmonic {j} must be '<a>,<b>', got {pair!r}")
        harmonics.append((_number(parts[0]), _number(parts[1])))
    return PeriodicMap(_number(head.strip()), tuple(harmonics))


def render_pspec(p: PeriodicMap) -> str:
    if not p.harmonics:
        return f"const:{fmt(p.a0)}"
    return "fourier:" + ";".join([fmt(p.a0)] + [f"{fmt(a)},{fmt(b)}" for a, b in p.harmonics])


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _pspec_arg(text):
    try:
        return parse_pspec(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ladder_arg(text):
    try:
        vals = [_number(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not vals:
        raise argparse.ArgumentTypeError("empty ladder")
    return vals


def _eq_args(p, k_default=None):
    p.add_argument("--R", dest="R", type=float, help="scale constant R > 0")
    p.add_argument("--k", dest="k", type=float, default=k_default, help="multiplier constant k > 0")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funceq",
        description="Solutions of f(x^2 R) = k/(2xR) f(x): sampling, classification, verification.",
    )
    parser.add_argument("--config", help="INI-style file of 'key = value' lines mirroring the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="regime and regularity rules for (R, k)")
    _eq_args(p)

    p = sub.add_parser("sample", help="sample a branch solution uniformly in s")
    _eq_args(p)
    p.add_argument("--p", dest="p", type=_pspec_arg, help="periodic map, e.g. const:1 or 'fourier:1;0.5,0'")
    p.add_argument("--branch", choices=("right", "left"), default="right")
    p.add_argument("--smin", type=float, default=-5.0, help="first s = log2|ln(xR)|")
    p.add_argument("--smax", type=float, default=3.0, help="last s, at most 8.2")
    p.add_argument("--n", type=int, default=100, help="number of rows, uniform in s")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("verify", help="run a seeded randomized verification suite")
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, help="tolerance (default depends on the suite)")

    p = sub.add_parser("witness", help="non-monotonicity witness for k = 2")
    _eq_args(p, k_default=2.0)
    p.add_argument("--p", dest="p", type=_pspec_arg)

    p = sub.add_parser("report-c1", help="C1 classification at 1/R with boundary probes")
    _eq_args(p)
    p.add_argument("--p-right", dest="p_right", type=_pspec_arg)
    p.add_argument("--p-left", dest="p_left", type=_pspec_arg)
    p.add_argument("--ladder", type=_ladder_arg, help="comma-separated decreasing deltas")
    return parser


def read_config(path: str) -> dict:
    with open(path) as fh:
        text = fh.read()
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not text.lstrip().startswith("["):
        text = "[funceq]\n" + text
    cp.read_string(text)
    out = {}
    for section in cp.sections():
        for key, value in cp.items(section):
            out[key.replace("-", "_")] = value
    return out


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        values = read_config(known.config)
    except (OSError, configparser.Error) as exc:
        parser.error(f"cannot read config {known.config!r}: {exc}")
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sp in action.choices.values():
                dests = {a.dest for a in sp._actions}
                sp.set_defaults(**{k: v for k, v in values.items() if k in dests})


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _params(args) -> EquationParams:
    _require(args, "R", "k")
    return EquationParams(args.R, args.k)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


_CONTINUITY_RULES = {
    "Subcritical": "not_extensible_unless_zero",
    "Critical": "constant_p_only",
    "SupercriticalRigid": "extensible_with_zero",
    "SupercriticalFlexible": "extensible_with_zero",
}

_C1_RULES = {
    "Subcritical": "not_applicable",
    "Critical": "not_applicable",
    "SupercriticalFlexible": "any_smooth_p",
}


def classify_payload(params: EquationParams) -> dict:
    regime = classify_regime(params.k).value
    if regime == "SupercriticalRigid":
        c1 = "constant_p_antisymmetric" if params.c == 1.0 else "zero_solution_only"
    else:
        c1 = _C1_RULES[regime]
    return {
        "R": params.R,
        "k": params.k,
        "c": params.c,
        "regime": regime,
        "monotone_phi": params.c <= 0,
        "continuity_rule": _CONTINUITY_RULES[regime],
        "c1_rule": c1,
    }


def cmd_classify(args, out) -> int:
    print(json.dumps(classify_payload(_params(args)), indent=2), file=out)
    return 0


def sample_rows(sol: BranchSolution, smin: float, smax: float, n: int):
    s = np.linspace(smin, smax, n)
    x = s_to_x(sol.params, sol.branch, s)
    f = evaluate(sol, x)
    fp = derivative(sol, x)
    res = residual_pulled_back(sol, x)
    return [dict(zip(CSV_COLUMNS, row)) for row in zip(x.tolist(), s.tolist(), f.tolist(), fp.tolist(), res.tolist())]


def cmd_sample(args, out) -> int:
    params = _params(args)
    _require(args, "p")
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if not args.smin < args.smax:
        raise UsageError("--smin must be below --smax")
    # the residual needs the image point at s + 1 inside the window as well
    if args.smin < S_MIN or args.smax > S_MAX - 1.0:
        raise UsageError(f"s-range must lie in [{S_MIN}, {S_MAX - 1.0}]")
    sol = BranchSolution(params, args.p, Branch(args.branch))
    rows = sample_rows(sol, args.smin, args.smax, args.n)

    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([fmt(row[c]) for c in CSV_COLUMNS])
        text = buf.getvalue()
    else:
        text = json.dumps(
            {"R": params.R, "k": params.k, "p": render_pspec(args.p), "branch": args.branch, "rows": rows},
            indent=2,
        ) + "\n"
    if args.out == "-":
        out.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)

    bad = [r for r in rows if not abs(r["residual"]) <= RESIDUAL_TOL * (1.0 + abs(r["f"]))]
    if bad:
        print(f"{len(bad)} row(s) exceed the residual tolerance", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args, out) -> int:
    _require(args, "suite")
    if args.trials <= 0:
        raise UsageError("--trials must be positive")
    tol = DEFAULT_TOLS[args.suite] if args.tol is None else args.tol
    report = run_suite(args.suite, args.trials, args.seed, tol)
    print(report.to_json(), file=out)
    return 0 if report.passed else 1


def cmd_witness(args, out) -> int:
    params = _params(args)
    _require(args, "p")
    try:
        w = find_nonmonotone_witness(params, args.p)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None
    sol = BranchSolution(params, args.p, Branch.RIGHT)
    payload = {"R": params.R, "k": params.k, "p": render_pspec(args.p), **w.to_dict()}
    payload["f_low_check"] = evaluate(sol, w.x_low)
    payload["f_high_check"] = evaluate(sol, w.x_high)
    payload["verified"] = w.verify(sol)
    print(json.dumps(payload, indent=2), file=out)
    return 0 if payload["verified"] else 1


def cmd_report_c1(args, out) -> int:
    params = _params(args)
    _require(args, "p_right", "p_left")
    if not params.k > 2.0:
        raise UsageError("report-c1 needs k > 2")
    ladder = DEFAULT_LADDER if args.ladder is None else args.ladder
    verdict = classify_smoothness(params, args.p_right, args.p_left)
    g = glue(params, args.p_left, args.p_right)
    try:
        probes = {side: [vars(r) for r in boundary_probe(g, side, ladder)] for side in ("right", "left")}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {
        "R": params.R,
        "k": params.k,
        "c": params.c,
        "p_right": render_pspec(args.p_right),
        "p_left": render_pspec(args.p_left),
        **verdict.to_dict(),
        "probe": probes,
    }
    print(json.dumps(payload, indent=2), file=out)
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "sample": cmd_sample,
    "verify": cmd_verify,
    "witness": cmd_witness,
    "report-c1": cmd_report_c1,
}


def main(argv=None, out=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out = sys.stdout if out is None else out
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, DomainError, PreconditionError, WindowError) as exc:
        print(f"funceq {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except SearchFailure as exc:
        print(f"funceq {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
