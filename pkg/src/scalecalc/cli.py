"""Command-line front end.

Every subcommand writes a JSON report (``--out``, default stdout) and
optionally a CSV dump (``--csv``).  Exit status: 0 when the identity or
extremality check passes (or when there is nothing to check), 2 when it
fails, 1 for usage and validation errors.  Options may also come from a
``key = value`` file given with ``--config``; command-line flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import reporting
from .box import box_derivative_n
from .exceptions import ConfigInvalid, FitDegenerate, ScaleCalcError
from .expressions import function_1d, function_2d, lagrangian_from_text
from .grid import Grid1D, Grid2D, GridFunction1D
from .holder import estimate_holder_exponent
from .identities import (barrow_defect, byparts2d_defect, econdition_estimate, green_defect,
                         leibniz_defect, loglog_slope)
from .scale_limit import BoxDerivativeConfig, scale_derivative
from .solver import solve_membrane
from .variational import (Trajectory, el_residual_1d, el_residual_2d, el_residual_higher,
                          el_residual_parameter, iso_solve, natural_bc_1d, natural_bc_2d)

__all__ = ["main", "build_parser", "read_config"]

COMMANDS = ("deriv", "scale", "holder", "leibniz", "barrow", "green", "byparts", "el", "nbc",
            "iso", "param", "higher", "el2d", "nbc2d", "membrane", "study")
STUDY_METERS = ("leibniz", "barrow", "econdition", "green", "byparts", "el", "higher", "el2d")


class UsageError(Exception):
    """Raised instead of argparse's own exit so every usage error maps to status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- parsing

def _common(p: argparse.ArgumentParser, dims: int = 1):
    p.add_argument("--config", help="key = value file supplying any option below")
    p.add_argument("--grid", nargs="+", type=float, metavar="NUM",
                   help="a b n (1-D); a b n, a b c d n or a b c d n1 n2 (2-D)")
    p.add_argument("--h", nargs="+", type=float, help="step(s), grid multiples; default delta")
    p.add_argument("--levels", type=int, help="geometric h-sequence length")
    p.add_argument("--ratio", type=float, help="h-sequence ratio (default 0.5)")
    p.add_argument("--tau", type=float, help="non-convergence threshold (default 0.1)")
    p.add_argument("--tol", type=float, help="tolerance override")
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--csv", help="CSV output path")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scalecalc", description="Box-derivative calculus toolkit.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_, dims=1):
        p = sub.add_parser(name, help=help_)
        _common(p, dims)
        return p

    p = add("deriv", "n-fold box derivative at fixed h")
    p.add_argument("--f")
    p.add_argument("--order", type=int)
    p = add("scale", "scale derivative via the h -> 0 fit")
    p.add_argument("--f")
    p = add("holder", "Hoelder-exponent estimate")
    p.add_argument("--f")
    p = add("leibniz", "product-rule defect")
    p.add_argument("--f")
    p.add_argument("--g")
    p = add("barrow", "fundamental-theorem defect")
    p.add_argument("--f")
    p = add("green", "Green's theorem defect on a rectangle", 2)
    p.add_argument("--f")
    p.add_argument("--g")
    p = add("byparts", "2-D integration-by-parts defect", 2)
    p.add_argument("--F")
    p.add_argument("--G")
    p.add_argument("--w")
    p.add_argument("--zero-boundary", dest="zero_boundary", action="store_const", const=True)
    for name, help_ in (("el", "first-order Euler-Lagrange residual"),
                        ("nbc", "residual plus natural boundary conditions")):
        p = add(name, help_)
        p.add_argument("--L")
        p.add_argument("--y")
    p = add("iso", "isoperimetric multiplier and combined residual")
    p.add_argument("--L")
    p.add_argument("--theta")
    p.add_argument("--y")
    p.add_argument("--C", type=complex)
    p = add("param", "residual with a free parameter xi")
    p.add_argument("--L")
    p.add_argument("--y")
    p.add_argument("--xi", type=complex)
    p.add_argument("--solve-xi", dest="solve_xi", action="store_const", const=True)
    p = add("higher", "higher-order Euler-Lagrange residual")
    p.add_argument("--L")
    p.add_argument("--y")
    p.add_argument("--order", type=int)
    for name, help_ in (("el2d", "double-integral Euler-Lagrange residual"),
                        ("nbc2d", "double-integral residual plus edge conditions")):
        p = add(name, help_, 2)
        p.add_argument("--L")
        p.add_argument("--y")
    p = add("membrane", "Dirichlet solve of the box-Laplace equation", 2)
    p.add_argument("--boundary", help="closed form u(x1, x2) read on the rim")
    p.add_argument("--boundary-csv", dest="boundary_csv",
                   help="CSV with columns edge,Re,Im; edges a, b (over x2), c, d (over x1)")
    p = add("study", "convergence table for a meter over an h-sequence")
    p.add_argument("meter", nargs="?", choices=STUDY_METERS)
    for opt in ("f", "g", "F", "G", "w", "L", "y"):
        p.add_argument(f"--{opt}")
    p.add_argument("--order", type=int)
    p.add_argument("--zero-boundary", dest="zero_boundary", action="store_const", const=True)
    p.add_argument("--data", help="two-column (h, defect) output path")
    p = sub.add_parser("run", help="run the command named in a config file")
    p.add_argument("--config", required=True)
    return parser


def read_config(path) -> list[tuple[int, str, str]]:
    """``(line, key, value)`` triples from a ``key = value`` file (``#`` comments)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigInvalid(f"{path}: cannot read config ({exc.strerror})") from None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigInvalid(f"{path}:{lineno}: empty key or value")
        entries.append((lineno, key.replace("-", "_"), value))
    if not entries:
        raise ConfigInvalid(f"{path}: config is empty")
    return entries


def _apply_config(args, parser: argparse.ArgumentParser, path):
    actions = {a.dest: a for a in parser._actions if a.dest not in ("help", "config")}
    for lineno, key, value in read_config(path):
        if key == "command":
            continue
        if key not in actions:
            raise ConfigInvalid(f"{path}:{lineno}: unknown key {key!r} for "
                                f"'{parser.prog.split()[-1]}'")
        if getattr(args, key, None) is not None:
            continue
        action = actions[key]
        try:
            if action.const is not None and action.nargs == 0:
                setattr(args, key, value.lower() in ("1", "true", "yes", "on"))
            elif action.nargs in ("+", "*"):
                setattr(args, key, [(action.type or str)(v) for v in value.split()])
            else:
                conv = action.type or str
                parsed = conv(value)
                if action.choices and parsed not in action.choices:
                    raise ValueError(f"must be one of {list(action.choices)}")
                setattr(args, key, parsed)
        except ValueError as exc:
            raise ConfigInvalid(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


# ---------------------------------------------------------------- helpers

def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        raise ConfigInvalid(f"missing required option(s): {', '.join('--' + m for m in missing)}")


def _grid_numbers(args):
    _need(args, "grid")
    return list(args.grid)


def _count(v, what="n") -> int:
    if v != int(v):
        raise ConfigInvalid(f"grid {what} must be an integer, got {v}")
    return int(v)


def _grid1d(args, ghost_stages: int = 1) -> Grid1D:
    g = _grid_numbers(args)
    if len(g) != 3:
        raise ConfigInvalid("1-D grid takes three numbers: a b n")
    base = Grid1D(g[0], g[1], _count(g[2]))
    m = max(base.steps(h) for h in _steps(args, base.delta))
    return base.with_ghost(ghost_stages * m)


def _grid2d(args, ghost_stages: int = 1) -> Grid2D:
    g = _grid_numbers(args)
    if len(g) == 3:
        a, b, c, d, n1, n2 = g[0], g[1], g[0], g[1], g[2], g[2]
    elif len(g) == 5:
        a, b, c, d, n1, n2 = *g[:4], g[4], g[4]
    elif len(g) == 6:
        a, b, c, d, n1, n2 = g
    else:
        raise ConfigInvalid("2-D grid takes 'a b n', 'a b c d n' or 'a b c d n1 n2'")
    base = Grid2D.rectangle(a, b, c, d, _count(n1, "n1"), _count(n2, "n2"))
    hs = _steps(args, base.axis1.delta)
    m = max(max(base.axis1.steps(h), base.axis2.steps(h)) for h in hs)
    return Grid2D(base.axis1.with_ghost(ghost_stages * m), base.axis2.with_ghost(ghost_stages * m))


def _config(args, h: float) -> BoxDerivativeConfig:
    return BoxDerivativeConfig(h, levels=args.levels or 6, ratio=args.ratio or 0.5,
                               econv_threshold=args.tau or 0.1)


def _steps(args, delta: float) -> list[float]:
    """Explicit steps, or the geometric sequence when ``--levels`` is given."""
    hs = list(args.h) if args.h else [delta]
    if args.levels is not None:
        if len(hs) != 1:
            raise ConfigInvalid("give a single --h together with --levels")
        hs = list(_config(args, hs[0]).h_sequence())
        hs = [delta * max(1, round(h / delta)) for h in hs]
    return hs


def _single_h(args, grid) -> float:
    delta = grid.delta if isinstance(grid, Grid1D) else grid.axis1.delta
    hs = _steps(args, delta) if args.levels is None else [args.h[0] if args.h else delta]
    if len(hs) != 1:
        raise ConfigInvalid("this command takes a single --h")
    return hs[0]


def _h_arg(args, grid):
    """Steps for a meter: one value, a decreasing list, or a snapped config sequence."""
    delta = grid.delta if isinstance(grid, Grid1D) else grid.axis1.delta
    if args.levels is not None:
        h0 = args.h[0] if args.h else delta
        g1 = grid if isinstance(grid, Grid1D) else grid.axis1
        return _config(args, h0).h_sequence(g1)
    return np.array(_steps(args, delta))


def _sup(u) -> float:
    u = np.abs(np.asarray(u))
    u = u[np.isfinite(u)]
    return float(u.max()) if u.size else 0.0


def _el_report(report, args):
    if args.tol is not None:
        ok = report.residual_norm <= args.tol and all(abs(v) <= args.tol
                                                      for _, v in report.boundary_defects)
        out = reporting.el_dict(report)
        out["tol"], out["pass"] = args.tol, bool(ok)
        return out
    return reporting.el_dict(report)


# ---------------------------------------------------------------- commands

def cmd_deriv(args):
    _need(args, "f")
    n = 1 if args.order is None else args.order
    grid = _grid1d(args, max(n, 1))
    h = _single_h(args, grid)
    f = function_1d(args.f, grid)
    d = box_derivative_n(f, h, n)
    inner = d.values[grid.interior]
    out = {"kind": "derivative", "command": "deriv", "pass": True, "function": args.f,
           "order": n, "h": h, "nodes": grid.n,
           "sup_re": _sup(inner.real), "sup_im": _sup(inner.imag)}
    return out, reporting.field_csv(d)


def cmd_scale(args):
    _need(args, "f")
    probe = _grid1d(args, 1)
    h = _single_h(args, probe)
    f = function_1d(args.f, probe)
    limit, res = scale_derivative(f, _config(args, h))
    out = {"kind": "scale_limit", "command": "scale", "pass": True, "function": args.f,
           "h_sequence": list(_config(args, h).h_sequence(probe)),
           "convergent_fraction": float(np.mean(res.convergent)),
           "median_fit_residual": float(np.median(res.fit_residual)),
           "max_epart_magnitude": float(np.max(res.epart_magnitude))}
    rows = zip(probe.interior_nodes, res.limit.real, res.limit.imag, res.fit_residual,
               res.convergent)
    return out, reporting.table_csv(["x", "Re", "Im", "fit_residual", "convergent"], rows)


def cmd_holder(args):
    _need(args, "f")
    f = function_1d(args.f, _grid1d(args, 0))
    alpha, flat = estimate_holder_exponent(f, full_output=True)
    out = {"kind": "holder", "command": "holder", "pass": True, "function": args.f,
           "estimate": alpha, "flat": flat, "declared": f.holder_alpha}
    return out, None


def cmd_leibniz(args):
    _need(args, "f")
    grid = _grid1d(args)
    f = function_1d(args.f, grid)
    g = f if not args.g else function_1d(args.g, grid)
    r = leibniz_defect(f, g, _h_arg(args, grid))
    return reporting.defect_dict(r), reporting.defect_csv(r)


def cmd_barrow(args):
    _need(args, "f")
    grid = _grid1d(args)
    r = barrow_defect(function_1d(args.f, grid), _h_arg(args, grid))
    return reporting.defect_dict(r), reporting.defect_csv(r)


def cmd_econdition(args):
    _need(args, "f")
    grid = _grid1d(args)
    h = args.h[0] if args.h else grid.delta
    r = econdition_estimate(function_1d(args.f, grid), _config(args, h))
    return reporting.defect_dict(r), reporting.defect_csv(r)


def cmd_green(args):
    _need(args, "f", "g")
    grid = _grid2d(args)
    r = green_defect(function_2d(args.f, grid), function_2d(args.g, grid), _h_arg(args, grid))
    return reporting.defect_dict(r), reporting.defect_csv(r)


def cmd_byparts(args):
    _need(args, "F", "G", "w")
    grid = _grid2d(args)
    F, G, w = (function_2d(s, grid) for s in (args.F, args.G, args.w))
    r = byparts2d_defect(F, G, w, _h_arg(args, grid), zero_boundary=bool(args.zero_boundary))
    return reporting.defect_dict(r), reporting.defect_csv(r)


def _el_common(args, dims=1, order=None, stages=2, boundary="fixed", single=True):
    _need(args, "L", "y")
    L = lagrangian_from_text(args.L, dims=dims, order=order)
    if dims == 1:
        grid = _grid1d(args, stages * L.order)
        y = function_1d(args.y, grid)
    else:
        grid = _grid2d(args, stages)
        y = function_2d(args.y, grid)
    return L, Trajectory(y, boundary), (_single_h(args, grid) if single else None)


def cmd_el(args):
    L, y, h = _el_common(args)
    r = el_residual_1d(L, y, h, tol=args.tol)
    return _el_report(r, args), reporting.el_csv(r)


def cmd_nbc(args):
    L, y, h = _el_common(args, boundary="free")
    r = natural_bc_1d(L, y, h, tol=args.tol)
    return _el_report(r, args), reporting.el_csv(r)


def cmd_iso(args):
    _need(args, "theta", "C")
    L, y, h = _el_common(args)
    theta = lagrangian_from_text(args.theta)
    r = iso_solve(L, theta, y, args.C, h, tol=args.tol)
    return _el_report(r, args), reporting.el_csv(r)


def cmd_param(args):
    L, y, h = _el_common(args)
    if args.xi is None and not args.solve_xi:
        raise ConfigInvalid("give --xi or --solve-xi")
    r = el_residual_parameter(L, y, args.xi, h, solve_xi=bool(args.solve_xi), tol=args.tol)
    return _el_report(r, args), reporting.el_csv(r)


def cmd_higher(args):
    L, y, h = _el_common(args, order=args.order)
    r = el_residual_higher(L, y, h, tol=args.tol)
    return _el_report(r, args), reporting.el_csv(r)


def cmd_el2d(args):
    L, y, h = _el_common(args, dims=2)
    r = el_residual_2d(L, y, h, tol=args.tol)
    return _el_report(r, args), reporting.el_csv(r)


def cmd_nbc2d(args):
    L, y, h = _el_common(args, dims=2, boundary="free")
    r = natural_bc_2d(L, y, h, tol=args.tol)
    return _el_report(r, args), reporting.el_csv(r)


def _boundary_from_csv(path, grid: Grid2D) -> dict:
    edges = {k: [] for k in "abcd"}
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.DictReader(fh), 2):
                try:
                    edges[row["edge"].strip()].append(complex(float(row["Re"]),
                                                              float(row.get("Im") or 0)))
                except (KeyError, ValueError, TypeError, AttributeError):
                    raise ConfigInvalid(f"{path}:{lineno}: need columns edge (a|b|c|d), Re, Im")
    except OSError as exc:
        raise ConfigInvalid(f"{path}: cannot read boundary CSV ({exc.strerror})") from None
    return {k: np.array(v) for k, v in edges.items() if v}


def cmd_membrane(args):
    grid = _grid2d(args, 0)
    h = _single_h(args, grid)
    if args.boundary_csv:
        boundary = _boundary_from_csv(args.boundary_csv, grid)
    else:
        _need(args, "boundary")
        boundary = function_2d(args.boundary, grid).values
    tol = 1e-10 if args.tol is None else args.tol
    sol = solve_membrane(boundary, grid, h, tol=tol, full_output=True)
    L = lagrangian_from_text("(v1^2 + v2^2)/2", dims=2)
    r = el_residual_2d(L, Trajectory.fixed(sol.u), h)
    ok = r.residual_norm <= 10 * tol * max(1.0, r.scale)
    out = {"kind": "membrane", "command": "membrane", "pass": bool(ok), "h": h,
           "residual_norm": r.residual_norm, "residual_target": 10 * tol * max(1.0, r.scale),
           "solver": sol.stats}
    return out, reporting.field_csv(sol.u)


def _study_defect(args, meter: str):
    """``(h_sequence, defects, meter_pass)`` for ``meter`` over the study's steps."""
    if meter in ("el", "higher", "el2d"):
        L, traj, _ = _el_common(args, dims=2 if meter == "el2d" else 1,
                                order=args.order if meter == "higher" else None, single=False)
        grid = traj.grid
        hs = _h_arg(args, grid)
        fn = {"el": el_residual_1d, "higher": el_residual_higher, "el2d": el_residual_2d}[meter]
        reports = [fn(L, traj, h) for h in hs]
        return hs, [r.residual_norm for r in reports], all(r.is_extremal_limit for r in reports)
    handler = {"leibniz": cmd_leibniz, "barrow": cmd_barrow, "econdition": cmd_econdition,
               "green": cmd_green, "byparts": cmd_byparts}[meter]
    report, _ = handler(args)
    return report["h_sequence"], report["defect_norm"], report["pass"]


def cmd_study(args):
    _need(args, "meter")
    if args.levels is None and (not args.h or len(args.h) < 2):
        raise ConfigInvalid("a study needs an h-sequence: --levels K or several --h values")
    if args.levels is not None and args.levels < 2:
        raise FitDegenerate(f"a study needs at least 2 h levels, got {args.levels}")
    hs, defects, meter_pass = _study_defect(args, args.meter)
    hs, defects = [float(h) for h in hs], [float(d) for d in defects]
    slope = loglog_slope(hs, defects)
    scale_floor = 1e-12 * max(1.0, max(defects))
    monotone = all(b <= a + scale_floor for a, b in zip(defects, defects[1:]))
    at_rounding = max(defects) <= 1e-10
    converging = monotone and (at_rounding or (math.isfinite(slope) and slope > 0))
    out = {"kind": "study", "command": "study", "meter": args.meter, "pass": bool(converging),
           "monotone": monotone, "meter_pass": bool(meter_pass), "fitted_slope": slope,
           "h_sequence": hs, "defect": defects}
    if args.data:
        reporting.write_text(args.data, "".join(f"{reporting._float(h)} {reporting._float(d)}\n"
                                                for h, d in zip(hs, defects)))
    table = reporting.table_csv(["h", "defect", "slope"], [(h, d, slope) for h, d in zip(hs, defects)])
    return out, table


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# ---------------------------------------------------------------- entry point

def _emit(out: dict, csv_text, args) -> int:
    text = reporting.dumps(out)
    if args.out:
        reporting.write_json(args.out, out)
        check = reporting.read_json(args.out)
    else:
        sys.stdout.write(text)
        check = json.loads(text)
    if args.csv and csv_text is not None:
        reporting.write_text(args.csv, csv_text)
    if not out.get("pass", True):
        return 2
    # re-validate what was actually written
    if check.get("pass") is not True:
        print("scalecalc: written report does not confirm the pass flag", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args, extra = parser.parse_known_args(argv)
        if extra and args.command != "run":
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if args.command == "run":
            entries = read_config(args.config)
            command = next((v for _, k, v in entries if k == "command"), None)
            if command not in COMMANDS:
                raise ConfigInvalid(f"{args.config}: 'command' must name one of {', '.join(COMMANDS)}")
            args = _subparser(parser, command).parse_args(["--config", args.config] + extra)
            args.command = command
        if args.config:
            _apply_config(args, _subparser(parser, args.command), args.config)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out, csv_text = HANDLERS[args.command](args)
        return _emit(out, csv_text, args)
    except (UsageError, ConfigInvalid) as exc:
        print(f"scalecalc: {exc}", file=sys.stderr)
        return 1
    except (ScaleCalcError, ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"scalecalc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
