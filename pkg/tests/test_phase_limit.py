import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coamoeba.laurent import LaurentPolynomial, LaurentTerm, evaluate, parse
from coamoeba.phase_limit import (
    CodualHyperplane,
    binomial_coamoeba,
    degenerate,
    distance_to_hyperplanes,
    edge_hyperplanes,
    hypersurface_phase_limit,
    initial_coamoeba,
    phase_limit_summary,
)
from coamoeba.plane import LineT2, PlaneGrid, line2_boundary_lines, sample_plane_curve

from oracles import circle_dist

XY = ["x", "y"]


def _families(hyps):
    return sorted((h.normal, tuple(np.round(h.offsets, 12))) for h in hyps)


def test_binomial_examples():
    h = binomial_coamoeba(LaurentTerm(1, (1,)), LaurentTerm(1, (0,)))
    assert h.normal == (1,) and h.offsets == pytest.approx((np.pi,))
    h = binomial_coamoeba(LaurentTerm(1, (1, 0)), LaurentTerm(-1, (0, 1)))
    assert h.normal == (1, -1) and h.offsets == pytest.approx((0.0,))
    h = binomial_coamoeba(LaurentTerm(1, (2,)), LaurentTerm(-1, (0,)))
    assert h.offsets == pytest.approx((0.0, np.pi))
    with pytest.raises(ValueError):
        binomial_coamoeba(LaurentTerm(1, (1,)), LaurentTerm(2, (1,)))


def test_codual_hyperplane_invariants():
    h = CodualHyperplane(2, (-1, 1), (0.5, 3.0))
    assert h.normal == (1, -1)
    assert list(h.offsets) == sorted(h.offsets)
    assert all(-np.pi < o <= np.pi for o in h.offsets)
    with pytest.raises(ValueError):
        CodualHyperplane(2, (2, 4), (0.0,))
    assert h.contains([-0.5, 0.0]) and not h.contains([0.0, 0.0])
    assert h.distance([0.0, 0.0]) == pytest.approx(0.25)


coef = st.tuples(st.floats(0.3, 3), st.floats(-np.pi, np.pi)).map(lambda p: p[0] * np.exp(1j * p[1]))


def exps(n):
    return st.tuples(*[st.integers(-4, 4)] * n)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(exps(n), exps(n))), coef, coef, st.data())
def test_binomial_solutions_lift_to_zeros(ab, ca, cb, data):
    a, b = ab
    if a == b:
        return
    n = len(a)
    h = binomial_coamoeba(LaurentTerm(ca, a), LaurentTerm(cb, b))
    f = LaurentPolynomial.from_dict(n, {a: ca, b: cb})
    d = np.subtract(a, b)
    g = np.gcd.reduce(np.abs(d))
    assert len(h.offsets) == g
    # a point on the set: solve <v, theta> = offset for the first nonzero coordinate
    k = data.draw(st.integers(0, g - 1))
    theta = np.array(data.draw(st.lists(st.floats(-np.pi, np.pi), min_size=n, max_size=n)))
    v = np.array(h.normal)
    j = int(np.flatnonzero(v)[0])
    rest = theta @ v - theta[j] * v[j]
    theta[j] = (h.offsets[k] - rest) / v[j]
    assert h.contains(theta, tol=1e-9)
    # lift: moduli r with |c_a| r^a = |c_b| r^b, i.e. <d, log r> = log|c_b/c_a|
    logr = np.zeros(n)
    logr[j] = np.log(abs(cb / ca)) / d[j]
    x = np.exp(logr + 1j * theta)
    scale = abs(ca) * np.prod(np.abs(x) ** np.array(a)) + abs(cb) * np.prod(np.abs(x) ** np.array(b))
    assert abs(evaluate(f, x)) <= 1e-8 * scale
    # off the set no modulus works: the two terms never have opposite phases
    off = theta.copy()
    off[j] += 0.3 / v[j]
    if not h.contains(off, tol=1e-6):
        phase = np.angle(ca) + np.dot(a, off) - np.angle(cb) - np.dot(b, off)
        assert circle_dist(phase, np.pi) > 1e-7


def test_binomial_correctness_on_a_thousand_points():
    # solutions built from the congruence lift to zeros; points off every
    # translate give two terms whose phases never cancel
    rng = np.random.default_rng(5)
    worst_zero, closest_phase = 0.0, np.inf
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        a, b = rng.integers(-4, 5, (2, n))
        if not np.any(a - b):
            b[0] += 1
        ca, cb = rng.uniform(0.3, 3, 2) * np.exp(1j * rng.uniform(-np.pi, np.pi, 2))
        h = binomial_coamoeba(LaurentTerm(ca, a), LaurentTerm(cb, b))
        v, d = np.array(h.normal), a - b
        j = int(np.flatnonzero(v)[0])
        theta = rng.uniform(-np.pi, np.pi, n)
        theta[j] += (rng.choice(h.offsets) - theta @ v) / v[j]
        logr = rng.normal(size=n)
        logr[j] += (np.log(abs(cb / ca)) - d @ logr) / d[j]
        x = np.exp(logr + 1j * theta)
        ta, tb = ca * np.prod(x ** a), cb * np.prod(x ** b)
        worst_zero = max(worst_zero, abs(ta + tb) / (abs(ta) + abs(tb)))
        off = rng.uniform(-np.pi, np.pi, n)
        if h.distance(off) > 1e-6:
            gap = circle_dist(np.angle(ca / cb) + d @ off, np.pi)
            closest_phase = min(closest_phase, gap)
    assert worst_zero <= 1e-8
    assert closest_phase > 0


def test_translate_count_matches_brute_force_grid():
    # <d, theta> = pi + arg(c_b/c_a) on a grid, against the union of the translates
    ca, cb = 1.0, np.exp(0.7j)
    h = binomial_coamoeba(LaurentTerm(ca, (3, -2)), LaurentTerm(cb, (0, 1)))
    assert len(h.offsets) == 3
    grid = -np.pi + 2 * np.pi * np.arange(10_000) / 10_000
    rng = np.random.default_rng(0)
    alpha = rng.choice(grid, 4000)
    beta = rng.choice(grid, 4000)
    theta = np.column_stack([alpha, beta])
    direct = circle_dist(3 * alpha - 3 * beta, np.pi + 0.7)
    union = h.distance(theta) * 2  # |v|_1 = 2 for v = (1, -1)
    assert np.allclose(direct <= 1e-9, union <= 1e-9)
    assert np.allclose(np.minimum(direct, 1.0), np.minimum(3 * union, 1.0), atol=1e-9)


def test_translation_invariance():
    h = CodualHyperplane(3, (1, -2, 1), (0.4, -2.0))
    for delta in ([2, 1, 0], [0, 1, 2], [1.3, 0.2, -0.9]):
        moved = h.translate(delta)
        if np.dot(h.normal, delta) == 0:
            assert moved == h
    assert h.translate([2 * np.pi, 0, 0]).offsets == pytest.approx(h.offsets)


def test_line_edges_are_the_boundary_lines():
    result = hypersurface_phase_limit(parse("x+y+1", XY))
    assert len(result) == 3
    hyps = [h for _, hs in result for h in hs]
    expected = [CodualHyperplane(2, n, (o,)) for n, o in line2_boundary_lines(LineT2(1, 1, 1))]
    assert _families(hyps) == _families(expected)
    for line in (LineT2(2, -1j, 1 + 1j), LineT2(-3, 0.5, 2j)):
        hyps = [h for _, hs in hypersurface_phase_limit(line.polynomial()) for h in hs]
        expected = [CodualHyperplane(2, n, (o,)) for n, o in line2_boundary_lines(line)]
        assert _families(hyps) == _families(expected)


def test_edge_with_interior_point():
    f = parse("x^2+x*y+y^2+x+y+1", XY)
    hyps = edge_hyperplanes(f, (2, 0), (0, 2))
    assert len(hyps) == 2
    assert all(h.normal == (1, -1) for h in hyps)
    assert sorted(o for h in hyps for o in h.offsets) == pytest.approx([-2 * np.pi / 3, 2 * np.pi / 3])


def test_repeated_roots_are_merged_with_multiplicity():
    f = parse("x^2 + 2*x*y + y^2 + 1", XY)  # (x + y)^2 on the top edge
    hyps = edge_hyperplanes(f, (2, 0), (0, 2))
    assert len(hyps) == 1 and hyps[0].multiplicity == 2
    assert circle_dist(hyps[0].offsets[0], np.pi) < 1e-6
    f = parse("x^3 + y^3 + 1", XY)  # distinct cube roots of -1
    hyps = edge_hyperplanes(f, (3, 0), (0, 3))
    assert [h.multiplicity for h in hyps] == [1, 1, 1]
    f = parse("x^3 - 3*x^2*y + 3*x*y^2 - y^3 + 1", XY)  # (x - y)^3
    hyps = edge_hyperplanes(f, (3, 0), (0, 3))
    assert len(hyps) == 1 and hyps[0].multiplicity == 3
    assert circle_dist(hyps[0].offsets[0], 0) < 1e-4


def test_monomial_has_no_phase_limit():
    with pytest.raises(ValueError):
        hypersurface_phase_limit(parse("3*x*y", XY))
    assert phase_limit_summary(parse("3*x*y", XY)).entries == ()


def test_rank_three_plane():
    f = parse("x+y+z+1", ["x", "y", "z"])
    result = hypersurface_phase_limit(f)
    assert len(result) == 6  # edges of the tetrahedron
    assert all(len(hs) == 1 and h.offsets == pytest.approx((np.pi,)) for _, hs in result for h in hs)


def test_summary_of_the_line():
    report = phase_limit_summary(parse("x+y+1", XY))
    assert sorted(r for e in report.entries for r in e.cone.rays) == [(-1, -1), (0, 1), (1, 0)]
    assert sorted(str(e.initial) for e in report.entries) == ["x+1", "x+y", "y+1"]
    assert len(report.hyperplanes()) == 3
    data = json.loads(report.to_json())
    assert len(data["cones"]) == 3 and all(c["codual"] for c in data["cones"])
    text = report.render()
    assert "json:" in text and "<[1, -1], theta>" in text


def test_summary_of_the_scaled_triangle():
    report = phase_limit_summary(parse("x^2+x*y+y^2+x+y+1", XY))
    assert len(report.entries) == 3
    diag = next(e for e in report.entries if e.cone.rays == ((-1, -1),))
    assert len(diag.hyperplanes) == 2


def test_summary_lower_dimensional_cones_have_no_closed_form():
    report = phase_limit_summary(parse("x+y*z+1", ["x", "y", "z"]))
    lineality_only = [e for e in report.entries if not e.cone.rays]
    assert len(lineality_only) == 1 and lineality_only[0].hyperplanes is None


def test_initial_coamoeba():
    f = parse("x+y+1", XY)
    assert initial_coamoeba(f, (2, 3)) == []
    assert _families(initial_coamoeba(f, (1, 0))) == _families([CodualHyperplane(2, (0, 1), (np.pi,))])
    assert initial_coamoeba(f, (0, 0)) is None


@pytest.mark.parametrize("w,expected", [
    ((1, 0), CodualHyperplane(2, (0, 1), (np.pi,))),
    ((0, 1), CodualHyperplane(2, (1, 0), (np.pi,))),
    ((-1, -1), CodualHyperplane(2, (1, -1), (np.pi,))),
])
def test_degeneration_converges(w, expected):
    clouds = degenerate(parse("x+y+1", XY), w, [1e-1, 1e-2, 1e-3])
    d = [c.meta["distance"] for c in clouds]
    assert d[0] > d[1] > d[2] and d[2] < 2e-2
    pts = clouds[-1].points[clouds[-1].meta["window"]]
    assert np.max(distance_to_hyperplanes(pts, [expected])) == pytest.approx(d[2])


def test_degeneration_at_t_one_is_a_plain_sample():
    f = parse("x^2 + x*y - 3*y + 1", XY)
    grid = PlaneGrid(shells=10, angles=16)
    (cloud,) = degenerate(f, (1, 2), [1.0], grid=grid)
    assert np.array_equal(cloud.points, sample_plane_curve(f, grid).points)


def test_degeneration_validation():
    f = parse("x+y+1", XY)
    with pytest.raises(ValueError):
        degenerate(f, (0, 0), [0.1])
    with pytest.raises(ValueError):
        degenerate(f, (1, 0), [0.0])
    with pytest.raises(ValueError):
        degenerate(parse("x+y+z", ["x", "y", "z"]), (1, 0, 0), [0.1])


def test_degeneration_is_deterministic_across_workers():
    f = parse("x^2+x*y+y^2+1", XY)
    a = degenerate(f, (-1, -1), [0.1, 0.01], workers=1)
    b = degenerate(f, (-1, -1), [0.1, 0.01], workers=2)
    assert all(np.array_equal(p.points, q.points) for p, q in zip(a, b))
