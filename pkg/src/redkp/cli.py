"""Command-line front end: evolve, charpoly, yform, verify, degenerate.

State files are JSON with every rational as a "p/q" string; diagnostic
outputs may contain floats.  Exit codes: 0 success / all checks passed,
1 failed checks, 2 input validation error, 3 evolution error.  Errors are
reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .degeneration import DegenerationPlan, limit_compare
from .errors import (
    DegenerateEvolution,
    InsufficientHistory,
    RedkpError,
    SingularStep,
)
from .lattice import LatticeState
from .lax import default_time, special_points, spectral_curve
from .polymatrix import PolyMatrix
from .rational import format_rational
from .verify import run_verification
from .yform import band_coefficients, build_companions, shift_stars

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_VALIDATION = 2
EXIT_EVOLUTION = 3

_EVOLUTION_ERRORS = (DegenerateEvolution, SingularStep, InsufficientHistory)


def _fail(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)
    return code


def _load_state(path: str) -> LatticeState:
    with open(path, "r", encoding="utf-8") as fh:
        return LatticeState.from_json_dict(json.load(fh))


def _write(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _matrix_records(m: PolyMatrix) -> list:
    return [[entry.to_records() for entry in row] for row in m.rows]


def _point(p) -> list:
    return [format_rational(p[0]), format_rational(p[1])]


def cmd_evolve(args) -> int:
    state = _load_state(args.input)
    if args.to < state.frontier:
        raise ValueError(f"target {args.to} is before the frontier {state.frontier}")
    state.evolve_to(args.to)
    _write(json.dumps(state.to_json_dict(), indent=2), args.output)
    return EXIT_OK


def cmd_charpoly(args) -> int:
    state = _load_state(args.input)
    t = args.time if args.time is not None else default_time(state)
    curve = spectral_curve(state, t)
    sp = special_points(state, t)
    doc = {
        "time": t,
        "poly": curve.poly.to_records(),
        "deg_x": curve.deg_x,
        "deg_y": curve.deg_y,
        "special_points": {
            "A": [_point(p) for p in sp.a_points],
            "B": [_point(p) for p in sp.b_points],
            "Q": [_point(p) for p in sp.q_points],
            "P": (
                {"present": True, "x_pole_order": sp.p_branch[0], "y_pole_order": sp.p_branch[1]}
                if sp.p_branch
                else {"present": False}
            ),
        },
    }
    _write(json.dumps(doc, indent=2), args.output)
    return EXIT_OK


def cmd_yform(args) -> int:
    state = _load_state(args.input)
    M, K = state.params.M, state.params.K
    t = args.time if args.time is not None else default_time(state) + M * K
    bc = band_coefficients(state, t)
    s_star, r_star, l_star = shift_stars(state, t)
    _, y_matrix = build_companions(bc)
    doc = {
        "time": t,
        "bands": [
            {"i": i + 1, "k": k, "a": format_rational(bc.rows[i][k])}
            for i in range(bc.n_sites)
            for k in range(bc.width + 1)
        ],
        "S_star": _matrix_records(s_star),
        "R_star": _matrix_records(r_star),
        "L_star": _matrix_records(l_star),
        "Y": _matrix_records(y_matrix),
    }
    _write(json.dumps(doc, indent=2), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    state = _load_state(args.input)
    report = run_verification(state, seed=args.seed)
    _write(json.dumps(report, indent=2, sort_keys=True), args.output)
    return EXIT_OK if report["passed"] else EXIT_CHECKS_FAILED


def cmd_degenerate(args) -> int:
    base = _load_state(args.base)
    sweep = [float(z) for z in args.zeta_sweep.split(",") if z.strip()]
    if not sweep:
        raise ValueError("empty zeta sweep")
    plan = DegenerationPlan(
        direction=args.direction, zeta=sweep[0], base=base, horizon=args.horizon
    )
    table = limit_compare(plan, sweep)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["zeta", "max_err", "fitted_slope"])
    for row in table.csv_rows():
        writer.writerow(row)
    _write(buf.getvalue(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="redkp",
        description="Exact evolution and spectral analysis of the reduced discrete periodic KP lattice",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="advance a state file to a target time")
    p.add_argument("input")
    p.add_argument("--to", type=int, required=True, help="target frontier time")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("charpoly", help="spectral curve and special points")
    p.add_argument("input")
    p.add_argument("--time", type=int, default=None)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(fn=cmd_charpoly)

    p = sub.add_parser("yform", help="band table and companion-form matrices")
    p.add_argument("input")
    p.add_argument("--time", type=int, default=None)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(fn=cmd_yform)

    p = sub.add_parser("verify", help="run every applicable exact and numeric suite")
    p.add_argument("input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("degenerate", help="large-parameter convergence sweep")
    p.add_argument("--base", required=True, help="reduced-system state file")
    p.add_argument("--direction", choices=["reduce_M", "reduce_K"], required=True)
    p.add_argument("--zeta-sweep", default="1e2,1e3,1e4")
    p.add_argument("--horizon", type=int, default=20)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(fn=cmd_degenerate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _EVOLUTION_ERRORS as exc:
        return _fail(exc, EXIT_EVOLUTION)
    except RedkpError as exc:
        return _fail(exc, EXIT_VALIDATION)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        return _fail(exc, EXIT_VALIDATION)


if __name__ == "__main__":
    sys.exit(main())
