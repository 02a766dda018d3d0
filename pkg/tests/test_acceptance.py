"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line with the measured quantity; the lines are
repeated in an "acceptance criteria" section at the end of the pytest run.
"""

import io
import json
import shlex
import time
from contextlib import redirect_stdout

import numpy as np

from coamoeba import cli
from coamoeba.laurent import LaurentPolynomial, deform, evaluate, initial_form, parse, scale_torus
from coamoeba.lines3d import (
    INF,
    contour_image,
    from_roots,
    is_cocircular,
    limit_circle_image,
    lines_intersect,
    phase_limit_lines,
    quadrilateral_violations,
    sample_membrane,
)
from coamoeba.phase_limit import CodualHyperplane, degenerate, distance_to_hyperplanes, initial_coamoeba
from coamoeba.plane import LineT2, PlaneGrid, line2_boundary_lines, line2_membership, sample_plane_curve
from coamoeba.polytope import cone_of, newton_polytope, normal_fan
from coamoeba.torus import directed_hausdorff, nearest_distance, torus_distance, wrap_angle

from oracles import cross_ratio_real, initial_terms

XY = ["x", "y"]
W = np.exp(2j * np.pi / 3)
REAL_ROOTS = [INF, -0.5, 0, 1.5]
SYM_ROOTS = [INF, 1, W, W ** 2]


def cli_json(command: str):
    buf = io.StringIO()
    with redirect_stdout(buf):
        assert cli.main(shlex.split(command)) == 0
    return json.loads(buf.getvalue())


def test_criterion_1_two_triangle_law(acceptance):
    start = time.perf_counter()
    grid = PlaneGrid(shells=300, angles=324)
    cloud = sample_plane_curve(parse("x+y+1", XY), grid)
    labels = line2_membership(LineT2(1, 1, 1), cloud.points)
    inside = np.isin(labels, ["interior", "vertex"]).mean()
    axis = -np.pi + 2 * np.pi * (np.arange(100) + 0.5) / 100
    a, b = np.meshgrid(axis, axis)
    probes = np.column_stack([a.ravel(), b.ravel()])
    probes = probes[np.abs(probes[:, 0] - probes[:, 1]) >= np.pi + 0.05]
    gap = nearest_distance(probes, cloud.points).max()
    elapsed = time.perf_counter() - start
    ok = len(cloud) >= 100_000 and inside == 1.0 and gap <= 0.05 and elapsed < 10
    acceptance(1, "two-triangle law", ok,
               f"{len(cloud)} points, {100 * inside:.3f}% interior/vertex, "
               f"{len(probes)} probes covered within {gap:.4f} (<= 0.05), {elapsed:.2f}s (< 10s)")


def test_criterion_2_contour_values(acceptance):
    cloud = contour_image(from_roots(REAL_ROOTS), epsilon=1e-3)
    targets = [[np.pi] * 3, [0, np.pi, np.pi], [0, 0, np.pi], [0, 0, 0]]
    errs = [torus_distance(cloud.piece(f"segment_{k}"), np.array(t)).max() for k, t in enumerate(targets)]
    acceptance(2, "contour values", max(errs) <= 1e-6,
               "max distance per segment " + ", ".join(f"{e:.2e}" for e in errs) + " (<= 1e-6)")


def test_criterion_3_limit_circles_converge(acceptance):
    line = from_roots(SYM_ROOTS)
    h = phase_limit_lines(line)
    rows = []
    ok = True
    for i in range(4):
        d = [h[i].distance(limit_circle_image(line, i, e)).max() for e in (1e-1, 1e-2, 1e-3)]
        ok &= d[0] > d[1] > d[2] and d[2] < 1e-2
        rows.append(f"h_{i}: " + " > ".join(f"{v:.2e}" for v in d))
    acceptance(3, "phase limit line convergence", ok, "; ".join(rows) + " (last < 1e-2)")


def _quadruple(rng, cocircular):
    c = complex(*rng.normal(size=2))
    r = rng.uniform(0.5, 2)
    z = list(c + r * np.exp(1j * np.sort(rng.uniform(-np.pi, np.pi, 4))))
    if not cocircular:
        z[3] += 0.2 * r * np.exp(1j * rng.uniform(-np.pi, np.pi))
    return z


def test_criterion_4_cocircular_iff_intersecting(acceptance):
    real_pairs = lines_intersect(phase_limit_lines(from_roots(REAL_ROOTS)))
    sym_pairs = lines_intersect(phase_limit_lines(from_roots(SYM_ROOTS)))
    named = (is_cocircular(REAL_ROOTS) and len(real_pairs) >= 1
             and not is_cocircular(SYM_ROOTS) and len(sym_pairs) == 0)
    rng = np.random.default_rng(2024)
    agree = 0
    for k in range(200):
        z = _quadruple(rng, cocircular=k % 2 == 0)
        if k % 10 == 0:
            z[k % 4] = INF  # the circle becomes a line through the other three
        finite = [w for w in z if w is not INF]
        oracle = cross_ratio_real(*z, tol=1e-9) if len(finite) == 4 else None
        circ = is_cocircular(z, tol=1e-9)
        meet = bool(lines_intersect(phase_limit_lines(from_roots(z)), tol=1e-9))
        agree += circ == meet and (oracle is None or oracle == circ)
    acceptance(4, "cocircular iff intersecting limit lines", named and agree == 200,
               f"real line {len(real_pairs)} intersecting pairs, symmetric line {len(sym_pairs)}; "
               f"{agree}/200 random quadruples agree")


def test_criterion_5_twelve_segments(acceptance):
    start = time.perf_counter()
    roots = ",".join(f"{float(z.real)!r}{float(z.imag):+.17g}i" for z in (1 + 0j, W, W ** 2))
    segs = cli_json(f"line3 segments --roots inf,{roots} --format json")
    triples = {i: [s for s in segs if s["direction_index"] == i] for i in range(4)}
    parallel = all(len({tuple(s["direction"]) for s in t}) == 1 and len(t) == 3 for t in triples.values())
    s = np.linspace(0, 1, 102)[1:-1]
    pts = np.concatenate([
        wrap_angle(np.array(seg["fixed_angles"])
                   + (seg["interval"][0] + s * (seg["interval"][1] - seg["interval"][0]))[:, None]
                   * np.array(seg["direction"]))
        for seg in segs
    ])
    cloud = sample_membrane(from_roots(SYM_ROOTS), samples=1_000_000)
    gap = nearest_distance(pts, cloud.points).max()
    elapsed = time.perf_counter() - start
    ok = len(segs) == 12 and parallel and gap < 0.03 and elapsed < 60
    acceptance(5, "twelve segments in triples", ok,
               f"{len(segs)} segments, triples {[len(t) for t in triples.values()]}, parallel={parallel}, "
               f"max distance to {len(cloud)}-point membrane {gap:.4f} (< 0.03), {elapsed:.1f}s (< 60s)")


def _random_instance(rng, rank):
    k = int(rng.integers(1, 11))
    exps = {tuple(int(e) for e in rng.integers(-3, 4, rank)) for _ in range(k)}
    coeffs = {m: complex(*rng.integers(-9, 10, 2)) or 1 for m in exps}
    w = tuple(int(v) for v in rng.integers(-4, 5, rank))
    return LaurentPolynomial.from_dict(rank, coeffs), w


def test_criterion_6_initial_form_oracle(acceptance):
    rng = np.random.default_rng(6)
    matches = fan_checks = fan_ok = 0
    for k in range(1000):
        f, w = _random_instance(rng, 1 + k % 4)
        g = initial_form(f, w)
        matches += g.as_dict() == initial_terms(f.as_dict(), w)
        if f.rank <= 3:
            fan_checks += 1
            cone = cone_of(normal_fan(newton_polytope(f)), w)
            fan_ok += g.is_monomial() == cone.is_maximal
    acceptance(6, "initial forms and the fan", matches == 1000 and fan_ok == fan_checks,
               f"{matches}/1000 match enumeration, monomial iff maximal on {fan_ok}/{fan_checks} with n <= 3")


def test_criterion_7_deformation_identity(acceptance):
    rng = np.random.default_rng(7)
    worst = 0.0
    for k in range(1000):
        f, w = _random_instance(rng, 1 + k % 4)
        t = float(rng.uniform(0.05, 1.0))
        x = rng.uniform(0.5, 2.0, f.rank) * np.exp(1j * rng.uniform(-np.pi, np.pi, f.rank))
        rhs = evaluate(f, scale_torus(x, w, t))
        lhs = evaluate(deform(f, w, t), x)
        worst = max(worst, abs(lhs - rhs) / (1e-9 * (1 + abs(rhs))))
    acceptance(7, "deformation identity", worst <= 1.0,
               f"max |f(t)(x) - f(t^w x)| / (1e-9 (1 + |f(t^w x)|)) = {worst:.2e} over 1000 instances (<= 1)")


def test_criterion_8_degeneration(acceptance):
    f = parse("x+y+1", XY)
    boundary = {n: o for n, o in line2_boundary_lines(LineT2(1, 1, 1))}
    rows = []
    ok = True
    for w in ((1, 0), (0, 1), (-1, -1)):
        clouds = degenerate(f, w, [1e-1, 1e-2, 1e-3])
        d = [c.meta["distance"] for c in clouds]
        predicted = initial_coamoeba(f, w)
        (h,) = predicted
        exact = h == CodualHyperplane(2, h.normal, (boundary[h.normal],))
        last = clouds[-1]
        recomputed = distance_to_hyperplanes(last.points[last.meta["window"]], predicted).max()
        ok &= d[0] > d[1] > d[2] and d[2] < 2e-2 and exact and recomputed == d[2]
        rows.append(f"w={w}: " + " > ".join(f"{v:.2e}" for v in d) + f", line {h.normal}={h.offsets[0]:.6f} "
                    + ("equals" if exact else "differs from") + " the boundary line")
    acceptance(8, "degeneration to initial coamoebae", ok, "; ".join(rows) + " (last < 2e-2)")


def test_criterion_9_real_line_hull_and_symmetry(acceptance):
    line = from_roots(REAL_ROOTS)
    upper = sample_membrane(line, samples=100_000, half_plane="upper")
    viol = quadrilateral_violations(line, upper.points)
    bad = int(np.count_nonzero(viol > 1e-9))
    full = sample_membrane(line, samples=100_000)
    sym = directed_hausdorff(-full.points, full.points)
    acceptance(9, "real line hull and symmetry", bad == 0 and sym < 0.02,
               f"{bad} of {len(upper)} upper-half points violate the quadrilateral constraints "
               f"(max excess {viol.max():.1e}); symmetry distance {sym:.4f} (< 0.02)")
