"""Command line: guderley {lambda,solve,phase,fields,certify}.

Exit codes: 0 success, 2 domain error, 3 convergence or bracket error,
4 theory-violation assertion, 1 anything else from the package.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .collapse import Z_TOL, find_lambda_std
from .errors import DomainError, GuderleyError
from .fields import CSV_COLUMNS, GlobalSolution, sample, solve_global
from .jump_map import entropy_check
from .phase_plane import (
    VF_plus_domain,
    branch_VF_plus,
    branch_VG,
    branch_VG_minus,
    branch_VG_plus,
    critical_points,
    make_params,
    make_params_z,
)
from .polycert import run_bundled_suite
from .reflected import SolutionCurve, jump_locus

SCHEMA = "guderley.solution/1"
ENV_TOL = "GUDERLEY_TOL"


class SolutionFileError(DomainError):
    """Malformed solution file; the message names the offending location."""


def default_tol() -> float:
    raw = os.environ.get(ENV_TOL)
    if raw is None:
        return Z_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise DomainError(f"{ENV_TOL}={raw!r} is not a number", field=ENV_TOL) from None
    if not tol > 0.0:
        raise DomainError(f"{ENV_TOL} must be positive", field=ENV_TOL)
    return tol


def _tol(args) -> float:
    tol = args.tol if args.tol is not None else default_tol()
    if not tol > 0.0:
        raise DomainError("--tol must be positive", field="tol")
    return tol


def _check_gm(args) -> None:
    if not (1.0 < args.gamma <= 3.0):
        raise DomainError(f"--gamma must lie in (1, 3], got {args.gamma!r}", field="gamma")
    if args.m not in (1, 2):
        raise DomainError(f"--m must be 1 or 2, got {args.m!r}", field="m")


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# lambda

def cmd_lambda(args) -> int:
    _check_gm(args)
    r = find_lambda_std(args.gamma, args.m, tol=_tol(args))
    out = {
        "gamma": r.gamma,
        "m": r.m,
        "lambda": r.lam,
        "z": r.z,
        "triple_point": r.triple,
        "miss_residual": r.miss_residual,
    }
    _emit(_json(out), args.out)
    return 0


# ---------------------------------------------------------------------------
# solve

def solution_summary(sol: GlobalSolution) -> Dict:
    mr, ext, T = sol.match, sol.extension, sol.terminal
    incoming_ok = entropy_check(sol.params, (0.0, 0.0))
    return {
        "schema": SCHEMA,
        "version": __version__,
        "gamma": sol.gamma,
        "m": sol.m,
        "lambda": sol.lam,
        "z": sol.params.z,
        "triple_point": sol.triple,
        "miss_residual": sol.lam_result.miss_residual,
        "x_H": mr.x_H,
        "V_H": mr.P_H.V,
        "C_H": mr.C_H,
        "V_pre": mr.pre_state.V,
        "C_pre": mr.pre_state.C,
        "V_s": ext.Vs,
        "C_s": ext.Cs,
        "x_s": ext.xs,
        "terminal": {"R0": T.R0, "v1": T.v1, "c1": T.c1},
        "intersection_count": mr.intersection_count,
        "entropy_ok": bool(incoming_ok and entropy_check(sol.params, mr.pre_state)),
        "jump_residual": mr.residual,
        "v1_series": sol.passage.v1,
        "handoff_radius": sol.passage.delta,
        "tail": {
            "sigma": sol.tail.sigma,
            "C_exponent": sol.tail.C_exponent,
            "R_exponent": sol.tail.R_exponent,
        },
    }


def branch_rows(sol: GlobalSolution, n_origin: int = 41) -> List[Tuple]:
    """(branch_id, x, V, C, R) along every branch, x increasing."""
    rows = []
    inb = sol.passage.inbound
    for x, V, C, R in zip(inb.x, inb.V, inb.C, inb.R):
        rows.append((1, float(x), float(V), float(C), float(R)))
    ps = sol.passage
    h = 0.5 * ps.delta
    for C in np.linspace(h, -h, n_origin):
        C = float(C)
        V, lnx, lnR = ps.state(C) if C != 0.0 else (0.0, -math.inf, ps.Q0)
        x = 0.0 if C == 0.0 else math.copysign(math.exp(lnx), -C)
        rows.append((2, x, V, C, math.exp(lnR)))
    ext = sol.extension.trajectory
    keep = ext.lnx < math.log(sol.x_H)
    for x, V, C, R in zip(ext.x[keep], ext.V[keep], ext.C[keep], ext.R[keep]):
        rows.append((3, float(x), float(V), float(C), float(R)))
    d = sol.downstream
    for x, V, C, R in zip(d.x, d.V, d.C, d.R):
        rows.append((4, float(x), float(V), float(C), float(R)))
    return rows


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def cmd_solve(args) -> int:
    _check_gm(args)
    sol = solve_global(args.gamma, args.m, lam=args.lam, tol=_tol(args))
    _emit(_json(solution_summary(sol)), args.out)
    if args.csv:
        _emit(_csv(("branch_id", "x", "V", "C", "R"), branch_rows(sol)), args.csv)
    return 0


# ---------------------------------------------------------------------------
# phase

def phase_rows(gamma: float, m: int, lam: Optional[float], tol: float, n: int = 201) -> Tuple[List[Tuple], List[str]]:
    warnings = []
    if lam is None:
        r = find_lambda_std(gamma, m, tol=tol)
        p = make_params_z(gamma, m, r.z)
    else:
        p = make_params(gamma, m, lam)
    cp = critical_points(p)
    rows: List[Tuple] = []
    for name in ("P0", "P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9"):
        P = getattr(cp, name)
        if math.isfinite(P.V) and math.isfinite(P.C):
            rows.append((name, P.V, P.C))
    Vs = np.linspace(-1.5, 1.0, n)
    for V in Vs:
        rows.append(("sonic_upper", float(V), float(1.0 + V)))
    for V in Vs:
        rows.append(("sonic_lower", float(V), float(-(1.0 + V))))
    lo, hi = VF_plus_domain(p)
    for C in np.linspace(lo, hi, n, endpoint=False):
        V = branch_VF_plus(p, float(C))
        rows.append(("F_zero_VF_plus", V, float(C)))
        rows.append(("F_zero_VF_plus_mirror", V, -float(C)))
    for C in -np.geomspace(1e-3, 3.0, n)[::-1]:
        C = float(C)
        for tag, fn in (("G_zero_VG", branch_VG), ("G_zero_VG_plus", branch_VG_plus), ("G_zero_VG_minus", branch_VG_minus)):
            V = fn(p, C)
            rows.append((tag, V, C))
            rows.append((tag + "_mirror", V, -C))
    try:
        sol = solve_global(gamma, m, lam=p.lam, tol=tol)
    except GuderleyError as exc:
        warnings.append(f"trajectory curves omitted: {exc}")
        return rows, warnings
    for tag, tr in (("collapse", sol.passage.inbound), ("extension", sol.extension.trajectory),
                    ("V_inf", sol.downstream)):
        rows.extend((tag, float(V), float(C)) for V, C in zip(tr.V, tr.C))
    loc = jump_locus(sol.params, SolutionCurve(sol.passage, sol.extension))
    rows.extend(("jump_locus", float(V), float(C)) for V, C in zip(loc.V_post, loc.C_post))
    return rows, warnings


def cmd_phase(args) -> int:
    _check_gm(args)
    rows, warnings = phase_rows(args.gamma, args.m, args.lam, _tol(args))
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(_csv(("curve_id", "V", "C"), rows), args.out or args.csv)
    return 0


# ---------------------------------------------------------------------------
# fields

def load_solution(path: str) -> GlobalSolution:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SolutionFileError(f"{path}: {exc.strerror}", field=path) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SolutionFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}", field=path) from None
    if not isinstance(data, dict):
        raise SolutionFileError(f"{path}: top level must be an object", field=path)
    if data.get("schema") != SCHEMA:
        raise SolutionFileError(f"{path}: key 'schema' must be {SCHEMA!r}", field="schema")
    for key, kind in (("gamma", (int, float)), ("m", int), ("lambda", (int, float))):
        if key not in data:
            raise SolutionFileError(f"{path}: missing key {key!r}", field=key)
        if not isinstance(data[key], kind) or isinstance(data[key], bool):
            raise SolutionFileError(f"{path}: key {key!r} has the wrong type", field=key)
    sol = solve_global(float(data["gamma"]), int(data["m"]), lam=float(data["lambda"]))
    if "x_H" in data and isinstance(data["x_H"], (int, float)):
        if abs(sol.x_H - data["x_H"]) > 1e-8 * abs(data["x_H"]):
            raise SolutionFileError(f"{path}: key 'x_H' disagrees with the rebuilt solution", field="x_H")
    return sol


def parse_list(text: str, name: str) -> List[float]:
    """'a,b,c' or 'start:stop:n' (n points inclusive)."""
    try:
        if ":" in text:
            a, b, n = text.split(":")
            return [float(v) for v in np.linspace(float(a), float(b), int(n))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"cannot parse {name} {text!r}", field=name) from None


def cmd_fields(args) -> int:
    sol = load_solution(args.solution_file)
    ts = parse_list(args.t_list, "t_list")
    rs = parse_list(args.r_grid, "r_grid")
    if any(not r > 0.0 for r in rs):
        raise DomainError("r_grid must be positive", field="r_grid")
    rows = [row[:7] + (int(row[7]),) for row in sample(sol, ts, rs)]
    _emit(_csv(CSV_COLUMNS, rows), args.out or args.csv)
    return 0


# ---------------------------------------------------------------------------
# certify

def cmd_certify(args) -> int:
    reports = run_bundled_suite()
    items = [r.as_dict() for r in reports]
    ok = all(r.status == "pass" for r in reports)
    _emit(_json({"all_pass": ok, "count": len(items), "items": items}), args.out)
    return 0 if ok else 4


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="guderley", description="Converging and reflected shock similarity solutions.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, need_gm=True):
        if need_gm:
            sp.add_argument("--gamma", type=float, required=True)
            sp.add_argument("--m", type=int, required=True)
            sp.add_argument("--lambda", dest="lam", type=float, default=None)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--csv", default=None)

    sp = sub.add_parser("lambda", help="similarity exponent by shooting")
    common(sp)
    sp.set_defaults(func=cmd_lambda)
    sp = sub.add_parser("solve", help="full pipeline; JSON summary and optional branch CSV")
    common(sp)
    sp.set_defaults(func=cmd_solve)
    sp = sub.add_parser("phase", help="phase-plane curves as tagged CSV")
    common(sp)
    sp.set_defaults(func=cmd_phase)
    sp = sub.add_parser("fields", help="physical fields from a solution file")
    sp.add_argument("solution_file")
    sp.add_argument("t_list", help="comma list or start:stop:n")
    sp.add_argument("r_grid", help="comma list or start:stop:n")
    common(sp, need_gm=False)
    sp.set_defaults(func=cmd_fields)
    sp = sub.add_parser("certify", help="exact certification suite")
    common(sp, need_gm=False)
    sp.set_defaults(func=cmd_certify)
    return ap


_NEG_LIST = re.compile(r"^-[0-9.][0-9.eE+\-]*([,:][0-9.eE+\-]*)+$")


def _protect_negative_lists(argv: Sequence[str]) -> List[str]:
    # argparse reads "-1,0,1" as an option; a leading space keeps it positional
    return [" " + a if _NEG_LIST.match(a) else a for a in argv]


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_protect_negative_lists(argv))
    try:
        return args.func(args)
    except GuderleyError as exc:
        print(f"guderley {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
