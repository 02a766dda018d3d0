"""Command-line front end.

Each subcommand parses its inputs, calls one library operation and prints a
report or writes a point cloud.  Exit status is 0 on success, 1 for bad
input and 2 when the root finder fails to converge.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Sequence

import numpy as np

from . import lines3d, phase_limit, plane, polytope
from .errors import ParseError, RootFindingError
from .laurent import LaurentPolynomial, initial_form, parse, to_string
from .torus import PointCloud, write_csv, write_ply

_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    rf"^(?P<re>[+-]?{_REAL})?(?:(?P<sign>[+-])?(?P<im>{_REAL})?(?P<unit>[ij]))?$"
)


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let values such as -1,-1 or -0.5+2i,0 through as arguments
        self._negative_number_matcher = re.compile(r"^-(?:\d|\.\d|[ij](?:$|,))")

    # argparse exits with status 2 on bad flags; we reserve 2 for numerics
    def error(self, message):
        raise InputError(message)


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` with either part optional; ``inf`` is the point at infinity.

    >>> parse_complex("1-2i"), parse_complex("-i"), parse_complex("0.5")
    ((1-2j), -1j, (0.5+0j))
    """
    s = text.strip().replace(" ", "")
    if s.lower() in ("inf", "+inf", "infinity", "∞"):
        return lines3d.INF
    m = _COMPLEX.match(s)
    if not s or not m or (m["unit"] is None and m["re"] is None):
        raise ParseError(f"malformed complex literal {text!r}")
    if m["unit"] is None:
        return complex(float(m["re"]), 0.0)
    # a lone "2i" lands in re with the unit attached; "1+2i" splits
    if m["sign"] is None and m["re"] is not None and m["im"] is None:
        return complex(0.0, float(m["re"]))
    if m["sign"] is None and m["re"] is not None:
        raise ParseError(f"malformed complex literal {text!r}")
    im = float(m["im"]) if m["im"] is not None else 1.0
    if m["sign"] == "-":
        im = -im
    return complex(float(m["re"]) if m["re"] is not None else 0.0, im)


def _split(text: str, sep: str = ",") -> list[str]:
    parts = [p.strip() for p in text.split(sep)]
    if not all(parts):
        raise ParseError(f"empty entry in {text!r}")
    return parts


def _complex_list(text: str) -> list[complex]:
    return [parse_complex(p) for p in _split(text)]


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in _split(text)]
    except ValueError:
        raise ParseError(f"expected comma-separated reals, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in _split(text)]
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def _angle(a: float, degrees: bool) -> float:
    return float(np.degrees(a)) if degrees else float(a)


def _fmt(a: float, degrees: bool) -> str:
    return f"{_angle(a, degrees):.12g}"


def _polynomial(args) -> tuple[LaurentPolynomial, list[str]]:
    names = _split(args.vars)
    return parse(args.poly, names), names


def _emit_cloud(cloud: PointCloud, args, extra: dict | None = None) -> None:
    out = args.output
    if args.format == "csv":
        write_csv(cloud, out, degrees=args.degrees)
    elif args.format == "ply":
        write_ply(cloud, out, degrees=args.degrees)
    else:
        pts = np.degrees(cloud.points) if args.degrees else cloud.points
        meta = {k: v for k, v in cloud.meta.items() if isinstance(v, (int, float, str)) and not isinstance(v, bool)}
        report = {"rank": cloud.rank, "provenance": cloud.provenance, "count": len(pts),
                  "units": "degrees" if args.degrees else "radians", "meta": meta,
                  **(extra or {}), "points": pts.tolist()}
        _write_text(json.dumps(report, indent=1) + "\n", out)


def _write_lines(lines: list[str], path) -> None:
    _write_text("".join(line + "\n" for line in lines), path)


def _write_text(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# subcommands

def cmd_sample_curve(args) -> int:
    f, names = _polynomial(args)
    if f.rank != 2:
        raise InputError("sample-curve needs exactly two variables")
    solve = names.index(args.solve_for) if args.solve_for else 1
    if args.solve_for and args.solve_for not in names:
        raise InputError(f"--solve-for must be one of {names}")
    grid = plane.PlaneGrid(r_min=args.r_min, r_max=args.r_max, shells=args.shells, angles=args.angles,
                           solve_for=solve, refine_shells=0 if args.no_refine else plane.PlaneGrid.refine_shells)
    cloud = plane.sample_plane_curve(f, grid, workers=args.workers)
    _emit_cloud(cloud, args)
    return 0


def cmd_membership(args) -> int:
    coeffs = _complex_list(args.line)
    if len(coeffs) != 3 or any(lines3d.is_infinite(c) for c in coeffs):
        raise InputError("--line needs three finite coefficients a,b,c")
    line = plane.LineT2(*coeffs)
    labels = []
    for text in args.point:
        p = _float_list(text)
        if len(p) != 2:
            raise InputError(f"--point needs two angles, got {text!r}")
        if args.degrees:
            p = np.radians(p)
        labels.append(str(plane.line2_membership(line, p, tol=args.tol)))
    _write_lines(labels, args.output)
    return 0


def cmd_initial(args) -> int:
    f, names = _polynomial(args)
    w = _int_list(args.weight)
    _write_lines([to_string(initial_form(f, w), names)], args.output)
    return 0


def cmd_fan(args) -> int:
    f, _ = _polynomial(args)
    fan = polytope.normal_fan(polytope.newton_polytope(f))
    if args.format == "json":
        if args.weight:
            raise InputError("--weight is only reported in text format")
        _write_text(fan.to_json() + "\n", args.output)
        return 0
    P = fan.polytope
    lines = [f"Newton polytope: dim {P.dim}, vertices {[list(v) for v in P.vertices]}"]
    lines += [_cone_line(cone) for cone in fan.cones]
    if args.weight:
        w = _int_list(args.weight)
        if len(w) != f.rank:
            raise InputError(f"--weight needs {f.rank} entries")
        lines.append(f"weight {w} lies in: {_cone_line(polytope.cone_of(fan, w))}")
    _write_lines(lines, args.output)
    return 0


def _cone_line(cone) -> str:
    rays = " ".join(str(list(r)) for r in cone.rays) or "-"
    lin = " ".join(str(list(v)) for v in cone.lineality) or "-"
    face = " ".join(str(list(v)) for v in cone.face)
    return f"cone dim {cone.dim}  rays {rays}  lineality {lin}  face {face}"


def cmd_limits(args) -> int:
    f, names = _polynomial(args)
    report = phase_limit.phase_limit_summary(f)
    if args.format == "json":
        _write_text(report.to_json() + "\n", args.output)
    else:
        _write_text(report.render(degrees=args.degrees) + "\n", args.output)
    return 0


def cmd_degenerate(args) -> int:
    f, names = _polynomial(args)
    w = _int_list(args.weight)
    ts = _float_list(args.t)
    lo, hi = _float_list(args.window) if args.window else (0.5, 2.0)
    clouds = phase_limit.degenerate(f, w, ts, window=(lo, hi), workers=args.workers)
    rows = []
    for cloud in clouds:
        m = cloud.meta
        rows.append({"t": m["t"], "points": len(cloud.points), "windowed": int(m["window"].sum()),
                     "distance": m["distance"]})
    if args.output_prefix:
        for k, cloud in enumerate(clouds):
            sub = argparse.Namespace(**vars(args))
            sub.output = f"{args.output_prefix}_{k}.{args.format}"
            _emit_cloud(cloud, sub)
    predicted = phase_limit.initial_coamoeba(f, w)
    if args.format == "json" and not args.output_prefix:
        report = {"polynomial": to_string(f, names), "weight": w,
                  "initial_form": to_string(initial_form(f, w), names),
                  "window": [lo, hi],
                  "predicted": None if predicted is None else [h.to_dict() for h in predicted],
                  "fibres": rows}
        _write_lines([json.dumps(report, indent=2)], args.output)
        return 0
    lines = [f"in_w f = {to_string(initial_form(f, w), names)}"]
    if predicted is None:
        lines.append("coamoeba of in_w f has no closed form; distances not computed")
    for r in rows:
        d = "-" if r["distance"] is None else f"{r['distance']:.6g}"
        lines.append(f"t={r['t']:g}  points={r['points']}  windowed={r['windowed']}  distance={d}")
    _write_lines(lines, args.output)
    return 0


def _line3(args) -> lines3d.LineInP3:
    shift = _float_list(args.shift) if args.shift else [0.0, 0.0, 0.0]
    if len(shift) != 3:
        raise InputError("--shift needs three angles")
    if (args.roots is None) == (args.forms is None):
        raise InputError("give exactly one of --roots and --forms")
    if args.roots is not None:
        roots = _complex_list(args.roots)
        if len(roots) != 4:
            raise InputError("--roots needs four entries")
        return lines3d.from_roots(roots, shift)
    rows = [_complex_list(r) for r in _split(args.forms, ";")]
    if len(rows) != 4 or any(len(r) != 2 for r in rows):
        raise InputError("--forms needs four pairs a,b separated by ';'")
    if any(lines3d.is_infinite(z) for r in rows for z in r):
        raise InputError("form coefficients must be finite")
    line = lines3d.from_linear_forms(rows)
    return lines3d.LineInP3(line.roots, tuple(np.add(line.phase_shift, shift)))


def _arcs(args) -> int:
    if args.roots is None or args.forms is not None:
        raise InputError("line3 arcs needs --roots with three distinct roots")
    roots = _complex_list(args.roots)
    if len(roots) != 3:
        raise InputError("line3 arcs needs exactly three roots")
    scales = _complex_list(args.scales) if args.scales else None
    if scales is not None and (len(scales) != 3 or any(lines3d.is_infinite(z) or z == 0 for z in scales)):
        raise InputError("--scales needs three finite nonzero factors")
    out = []
    for arc in ((0, 1), (1, 2), (0, 2)):
        value = lines3d.arc_image(roots, arc, scales)
        if args.format == "json":
            out.append({"arc": list(arc), "value": [_angle(a, args.degrees) for a in value]})
        else:
            out.append(f"arc {arc[0]}-{arc[1]}: ({', '.join(_fmt(a, args.degrees) for a in value)})")
    if args.format == "json":
        out = [json.dumps(out, indent=2)]
    _write_lines(out, args.output)
    return 0


def cmd_line3(args) -> int:
    if args.action == "arcs":
        return _arcs(args)
    line = _line3(args)
    deg = args.degrees
    action = args.action
    out = []
    if action == "classify":
        out.append(lines3d.classify(line))
    elif action == "sample":
        if args.half_plane != "both":
            line = lines3d.real_normalize(line)
        cloud = lines3d.sample_membrane(line, samples=args.samples, half_plane=args.half_plane,
                                        seed=args.seed, workers=args.workers)
        _emit_cloud(cloud, args)
    elif action == "limits":
        lls = lines3d.phase_limit_lines(line)
        pairs = lines3d.lines_intersect(lls)
        if args.format == "json":
            out.append(json.dumps({"lines": [ll.to_dict() for ll in lls],
                                   "intersecting_pairs": [list(p) for p in pairs]}, indent=2))
        else:
            for ll in lls:
                fixed = ", ".join(_fmt(a, deg) for a in ll.fixed_angles)
                out.append(f"h_{ll.free_index}: direction {ll.direction.astype(int).tolist()} through ({fixed})")
            out.append("intersecting pairs: " + (" ".join(f"h_{i}-h_{j}" for i, j in pairs) or "none"))
    elif action == "segments":
        segs = lines3d.coamoeba_segments(line)
        if args.format == "json":
            out.append(json.dumps([s.to_dict() for s in segs], indent=2))
        else:
            for s in segs:
                fixed = ", ".join(_fmt(a, deg) for a in s.fixed_angles)
                lo, hi = s.interval
                out.append(f"segment on h_{s.direction_index}: base ({fixed}) "
                           f"parameter from {_fmt(lo, deg)} to {_fmt(hi, deg)} length {_fmt(s.length, deg)}")
    elif action == "contour":
        real = lines3d.real_normalize(line)
        cloud = lines3d.contour_image(real, epsilon=args.epsilon, points_per_piece=args.points_per_piece)
        pieces = {k: list(v) for k, v in cloud.meta["pieces"].items()}
        _emit_cloud(cloud, args, extra={"pieces": pieces})
    elif action == "rank":
        if args.at is None:
            raise InputError("line3 rank needs --at")
        x = parse_complex(args.at)
        if lines3d.is_infinite(x):
            raise InputError("--at must be finite")
        out.append(str(lines3d.differential_rank(line, x)))
    if out:
        _write_lines(out, args.output)
    return 0


# --------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for stochastic sampling (default 0)")
    common.add_argument("--degrees", action="store_true", help="print angles in degrees")
    common.add_argument("--workers", type=int, default=None,
                        help="threads for sampling (default: COAMOEBA_THREADS or 1)")
    common.add_argument("-o", "--output", default="-", help="output path, '-' for stdout")

    poly = _Parser(add_help=False)
    poly.add_argument("--poly", required=True, help='Laurent polynomial, e.g. "x+y+1"')
    poly.add_argument("--vars", default="x,y", help="comma-separated variable names (default x,y)")

    parser = _Parser(prog="coamoeba", description="Coamoebae, phase limit sets and lines in P^3.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample-curve", parents=[common, poly], help="sample the coamoeba of a plane curve")
    p.add_argument("--r-min", type=float, default=1e-3)
    p.add_argument("--r-max", type=float, default=1e3)
    p.add_argument("--shells", type=int, default=48)
    p.add_argument("--angles", type=int, default=256)
    p.add_argument("--solve-for", default=None, help="variable to solve for (default: the second)")
    p.add_argument("--no-refine", action="store_true", help="skip refinement near crossing parameters")
    p.add_argument("--format", choices=["csv", "ply", "json"], default="csv")
    p.set_defaults(func=cmd_sample_curve)

    p = sub.add_parser("membership", parents=[common], help="classify points against the coamoeba of a line")
    p.add_argument("--line", required=True, help="coefficients a,b,c of ax+by+c")
    p.add_argument("--point", required=True, action="append", help="alpha,beta in radians (repeatable)")
    p.add_argument("--tol", type=float, default=1e-6, help="tolerance for vertices and boundary (default 1e-6)")
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("initial", parents=[common, poly], help="initial form in_w f")
    p.add_argument("--weight", required=True, help="integer weight, e.g. 1,0")
    p.set_defaults(func=cmd_initial)

    p = sub.add_parser("fan", parents=[common, poly], help="Newton polytope and normal fan")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--weight", default=None, help="also report the cone containing this weight")
    p.set_defaults(func=cmd_fan)

    p = sub.add_parser("limits", parents=[common, poly], help="phase limit set summary")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("degenerate", parents=[common, poly], help="fibres t^-w X approaching coA(in_w f)")
    p.add_argument("--weight", required=True)
    p.add_argument("--t", default="0.1,0.01,0.001", help="comma-separated parameters in (0, 1]")
    p.add_argument("--window", default=None, help="modulus window lo,hi for distances (default 0.5,2)")
    p.add_argument("--output-prefix", default=None, help="write each fibre cloud to PREFIX_k.FORMAT")
    p.add_argument("--format", choices=["csv", "ply", "json"], default="csv")
    p.set_defaults(func=cmd_degenerate)

    p = sub.add_parser("line3", parents=[common], help="lines in P^3")
    p.add_argument("action", choices=["sample", "classify", "limits", "segments", "contour", "rank", "arcs"])
    p.add_argument("--roots", default=None, help="four roots, e.g. inf,-0.5,0,1.5 (three for arcs)")
    p.add_argument("--forms", default=None, help="four linear forms a,b;a,b;a,b;a,b (l = a s + b t)")
    p.add_argument("--shift", default=None, help="extra phase shift of the three chart coordinates")
    p.add_argument("--scales", default=None, help="arcs only: factors multiplying the three forms")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--half-plane", choices=["both", "upper", "lower"], default="both")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--points-per-piece", type=int, default=200)
    p.add_argument("--at", default=None, help="parameter value for rank")
    p.add_argument("--format", choices=["text", "csv", "ply", "json"], default=None)
    p.set_defaults(func=cmd_line3)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) == "line3" and args.format is None:
            args.format = "csv" if args.action in ("sample", "contour") else "text"
        if args.command == "line3" and args.action in ("sample", "contour") and args.format == "text":
            raise InputError("point clouds are written as csv, ply or json")
        return args.func(args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); not an error
        sys.stdout = open(os.devnull, "w")
        return 0
    except RootFindingError as exc:
        print(f"coamoeba: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        # ParseError, UnsupportedRankError and InputError are ValueErrors
        print(f"coamoeba: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
