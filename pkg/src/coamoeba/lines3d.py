"""Coamoebae of lines in P^3 through the four roots of their coordinate forms.

A line is parametrised by four linear forms l_0..l_3 on P^1.  Their zeros
zeta_0..zeta_3 (possibly infinity) decide the shape of the coamoeba.  After a
change of coordinates on P^1 we always have zeta_0 = infinity and the affine
parametrisation

    x  ->  (x - zeta_1, x - zeta_2, x - zeta_3),

up to a constant phase shift in each coordinate.  Points of U P^3 are shown
in the chart that subtracts the argument of l_0, so they are triples of
angles and the diagonal line reads {(t, t, t)}.

Internally forms are evaluated homogeneously, l_k(s, t) = s - zeta_k t for a
finite root and l_k = t for the root at infinity, so that infinity needs no
special casing.
"""

from __future__ import annotations

import cmath
import itertools
import warnings
from dataclasses import dataclass
from math import gcd
from typing import Literal, Sequence

import numpy as np

from ._parallel import ordered_map
from .plane import LineT2, reduce_to_standard_line
from .torus import PointCloud, circle_distance, wrap_angle

__all__ = [
    "INF",
    "LineInP3",
    "PhaseLimitLine",
    "CoamoebaSegment",
    "NearCocircularWarning",
    "from_linear_forms",
    "from_roots",
    "real_normalize",
    "classify",
    "is_cocircular",
    "phase_limit_lines",
    "lines_intersect",
    "arc_image",
    "coamoeba_segments",
    "sample_membrane",
    "contour_image",
    "differential_rank",
    "limit_circle_image",
    "projected_line",
    "project",
    "quadrilateral",
    "quadrilateral_violations",
]

INF = complex(np.inf, 0.0)

COCIRCULAR_TOL = 1e-10
NEAR_COCIRCULAR_TOL = 1e-6
INTERSECT_TOL = 1e-9
ROOT_TOL = 1e-12

LineClass = Literal["two-distinct-roots", "three-distinct-roots", "real-line", "generic"]


class NearCocircularWarning(UserWarning):
    """Four roots are within 1e-6 of a circle but outside the 1e-10 tolerance."""


def is_infinite(z) -> bool:
    return cmath.isinf(complex(z))


def _root(z) -> complex:
    z = complex(z)
    if cmath.isnan(z):
        raise ValueError("root is NaN")
    # + 0.0 turns negative zeros into plain zeros
    return INF if cmath.isinf(z) else complex(z.real + 0.0, z.imag + 0.0)


def _homogeneous(z: complex) -> tuple[complex, complex]:
    return (1 + 0j, 0j) if is_infinite(z) else (z, 1 + 0j)


def _form(z: complex, s, t):
    # the normalised linear form vanishing at z
    return t if is_infinite(z) else s - z * t


def _same_root(a: complex, b: complex, tol: float = ROOT_TOL) -> bool:
    if is_infinite(a) or is_infinite(b):
        return is_infinite(a) and is_infinite(b)
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _distinct(roots: Sequence[complex]) -> list[complex]:
    out: list[complex] = []
    for z in roots:
        if not any(_same_root(z, w) for w in out):
            out.append(z)
    return out


# --------------------------------------------------------------------------
# the line and its normal form

@dataclass(frozen=True)
class LineInP3:
    """A line in P^3 in normal form: roots (inf, zeta_1, zeta_2, zeta_3).

    ``phase_shift`` is added to the three chart coordinates, so the
    coamoeba of the original line is ``arg(x - zeta_i) + phase_shift_i``.
    """

    roots: tuple[complex, complex, complex, complex]
    phase_shift: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        roots = tuple(_root(z) for z in self.roots)
        if len(roots) != 4:
            raise ValueError("a line in P^3 needs four roots")
        if not is_infinite(roots[0]):
            raise ValueError("LineInP3 expects zeta_0 = inf; use from_roots to normalise")
        if len(_distinct(roots)) < 2:
            raise ValueError("all four forms vanish at the same point")
        shift = tuple(float(wrap_angle(a)) for a in self.phase_shift)
        if len(shift) != 3:
            raise ValueError("phase_shift needs three angles")
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "phase_shift", shift)

    @property
    def shift4(self) -> np.ndarray:
        """Shifts of the four homogeneous arguments; the first is zero."""
        return np.array((0.0,) + self.phase_shift)

    def homogeneous_args(self, s, t) -> np.ndarray:
        """Arguments of (l_0, .., l_3) at homogeneous points, shape (..., 4)."""
        s = np.asarray(s, dtype=complex)
        t = np.asarray(t, dtype=complex)
        vals = np.stack([np.broadcast_to(_form(z, s, t), np.broadcast(s, t).shape) for z in self.roots], axis=-1)
        return np.angle(vals) + self.shift4

    def __call__(self, x) -> np.ndarray:
        """arg(phi(x)) in the chart, for x in C away from the roots; shape (..., 3)."""
        x = np.asarray(x, dtype=complex)
        vals = np.stack([np.broadcast_to(_form(z, x, 1.0), x.shape) for z in self.roots[1:]], axis=-1)
        if np.any(vals == 0):
            raise ValueError("phi is undefined at a root")
        return wrap_angle(np.angle(vals) + np.array(self.phase_shift))

    def unshifted(self) -> LineInP3:
        return LineInP3(self.roots)

    def finite_roots(self) -> list[complex]:
        return [z for z in self.roots[1:] if not is_infinite(z)]

    def is_real_normalized(self, tol: float = ROOT_TOL) -> bool:
        fin = self.finite_roots()
        scale = max([1.0] + [abs(z) for z in fin])
        return all(abs(z.imag) <= tol * scale for z in fin)

    def to_dict(self) -> dict:
        return {
            "roots": [_format_root(z) for z in self.roots],
            "phase_shift": list(self.phase_shift),
        }


def _format_root(z: complex) -> str:
    if is_infinite(z):
        return "inf"
    return f"{z.real:.17g}{z.imag:+.17g}i" if z.imag else f"{z.real:.17g}"


def from_linear_forms(forms) -> LineInP3:
    """Normal form of the line [l_0 : l_1 : l_2 : l_3] with l_i = a_i s + b_i t.

    ``forms`` is a 4x2 complex array of rows (a_i, b_i).  When zeta_0 is
    finite the substitution s = zeta_0 s' + t', t = s' moves it to infinity;
    then each l_i / l_0 is (a_i / b_0)(x - zeta_i) with x = s'/t', and the
    constant factors become the phase shifts.
    """
    F = np.asarray(forms, dtype=complex)
    if F.shape != (4, 2):
        raise ValueError("need a 4x2 array of linear forms (a_i, b_i)")
    if not np.all(np.isfinite(F)):
        raise ValueError("form coefficients must be finite")
    if np.any(np.all(F == 0, axis=1)):
        raise ValueError("a linear form is identically zero")
    # proportional forms: every 2x2 minor against row 0 vanishes
    minors = F[:, 0] * F[0, 1] - F[:, 1] * F[0, 0]
    if np.all(np.abs(minors) <= ROOT_TOL * np.abs(F).max() ** 2):
        raise ValueError("all four forms are proportional; they vanish at a common point")
    a0, b0 = F[0]
    if a0 != 0:
        z0 = -b0 / a0
        F = np.column_stack([F[:, 0] * z0 + F[:, 1], F[:, 0]])
        F[0, 0] = 0  # exactly: l_0 became a0 * t'
    b0 = F[0, 1]
    roots = [INF]
    shifts = []
    for a, b in F[1:]:
        if abs(a) <= ROOT_TOL * abs(b):
            roots.append(INF)
            shifts.append(np.angle(b / b0))
        else:
            roots.append(-b / a)
            shifts.append(np.angle(a / b0))
    return LineInP3(tuple(roots), tuple(shifts))


def from_roots(roots: Sequence[complex], phase_shift: Sequence[float] = (0.0, 0.0, 0.0)) -> LineInP3:
    """The line with forms l_i = s - zeta_i t (or t for zeta_i = inf), normalised.

    ``phase_shift`` is added on top of whatever shift the normalisation needs.
    """
    roots = [_root(z) for z in roots]
    if len(roots) != 4:
        raise ValueError("a line in P^3 needs four roots")
    forms = [(0, 1) if is_infinite(z) else (1, -z) for z in roots]
    line = from_linear_forms(forms)
    shift = np.array(line.phase_shift) + np.asarray(phase_shift, dtype=float)
    return LineInP3(line.roots, tuple(shift))


def real_normalize(line: LineInP3) -> LineInP3:
    """An affine change of parameter making the finite roots real.

    Only possible for cocircular (collinear, since zeta_0 = inf) roots.
    The parameter becomes x' with x = c + u x', |u| = 1, c the foot of the
    perpendicular from 0 to the root line; every coordinate then picks up
    the phase arg(u).
    """
    fin = _distinct(line.finite_roots())
    if line.is_real_normalized():
        return line
    if len(fin) == 3 and not is_cocircular(line.roots):
        raise ValueError("roots are not cocircular; the line is not real")
    if len(fin) == 1:
        u, c = 1 + 0j, 1j * fin[0].imag
    else:
        a, b = max(itertools.combinations(fin, 2), key=lambda p: abs(p[0] - p[1]))
        u = (b - a) / abs(b - a)
        c = a - u * (a / u).real
    new_roots = [INF] + [z if is_infinite(z) else complex(((z - c) / u).real) for z in line.roots[1:]]
    shift = [s + (0.0 if is_infinite(z) else np.angle(u)) for s, z in zip(line.phase_shift, line.roots[1:])]
    return LineInP3(tuple(new_roots), tuple(shift))


# --------------------------------------------------------------------------
# classification

def is_cocircular(roots: Sequence[complex], tol: float = COCIRCULAR_TOL) -> bool:
    """Whether four distinct points of P^1 lie on one circle (or line).

    With a root at infinity the other three must be collinear; otherwise the
    cross-ratio must be real, both up to ``tol`` after normalising by
    magnitude.
    """
    return _cocircularity_defect(roots) <= tol


def _cocircularity_defect(roots: Sequence[complex]) -> float:
    roots = [_root(z) for z in roots]
    if len(roots) != 4:
        raise ValueError("cocircularity needs four roots")
    if len(_distinct(roots)) != 4:
        raise ValueError("cocircularity needs four distinct roots")
    inf = [k for k, z in enumerate(roots) if is_infinite(z)]
    if inf:
        a, b, c = (z for k, z in enumerate(roots) if k != inf[0])
        r = (c - a) / (b - a)
        return abs(r.imag) / abs(r)
    z1, z2, z3, z4 = roots
    cr = (z1 - z3) * (z2 - z4) / ((z2 - z3) * (z1 - z4))
    return abs(cr.imag) / abs(cr)


def classify(line: LineInP3) -> LineClass:
    """How many distinct roots, and for four whether they are cocircular.

    Inputs that miss cocircularity by less than 1e-6 are called generic and
    raise a :class:`NearCocircularWarning`.
    """
    k = len(_distinct(line.roots))
    if k == 2:
        return "two-distinct-roots"
    if k == 3:
        return "three-distinct-roots"
    defect = _cocircularity_defect(line.roots)
    if defect <= COCIRCULAR_TOL:
        return "real-line"
    if defect <= NEAR_COCIRCULAR_TOL:
        warnings.warn(
            f"roots miss a common circle by {defect:.3g}; classified as generic",
            NearCocircularWarning,
            stacklevel=2,
        )
    return "generic"


def _require_distinct(line: LineInP3, what: str) -> None:
    if len(_distinct(line.roots)) != 4:
        raise ValueError(f"{what} needs four distinct roots")


# --------------------------------------------------------------------------
# phase limit lines

_DIAGONAL = np.ones(3)


@dataclass(frozen=True)
class PhaseLimitLine:
    """The coordinate line {fixed_angles + s * direction} of U P^3 (chart).

    For free_index 0 the direction is the diagonal (1, 1, 1); otherwise it
    is the unit vector of the free coordinate, whose entry in
    ``fixed_angles`` is just a base point.
    """

    free_index: int
    fixed_angles: tuple[float, float, float]

    def __post_init__(self):
        if self.free_index not in (0, 1, 2, 3):
            raise ValueError("free_index must be 0..3")
        object.__setattr__(self, "fixed_angles", tuple(float(wrap_angle(a)) for a in self.fixed_angles))

    @property
    def direction(self) -> np.ndarray:
        return _direction(self.free_index)

    def point(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return wrap_angle(np.array(self.fixed_angles) + s[..., None] * self.direction)

    def distance(self, p) -> np.ndarray | float:
        return _distance_to_line(np.asarray(p, dtype=float), np.array(self.fixed_angles), self.free_index)

    def to_dict(self) -> dict:
        return {"free_index": self.free_index, "direction": self.direction.astype(int).tolist(),
                "fixed_angles": list(self.fixed_angles)}


def _direction(i: int) -> np.ndarray:
    if i == 0:
        return _DIAGONAL.copy()
    d = np.zeros(3)
    d[i - 1] = 1.0
    return d


def _distance_to_line(p: np.ndarray, base: np.ndarray, free_index: int):
    """l-infinity torus distance from points p (..., 3) to a coordinate line."""
    d = wrap_angle(p - base)
    if free_index != 0:
        keep = [k for k in range(3) if k != free_index - 1]
        out = circle_distance(d[..., keep], 0.0).max(axis=-1)
        return float(out) if np.ndim(out) == 0 else out
    # min over s of max_j |d_j - s|: the optimum is at a coordinate or a
    # midpoint of two of them (on the circle, also the antipodal midpoint)
    cands = [d[..., j] for j in range(3)]
    for j, k in itertools.combinations(range(3), 2):
        mid = (d[..., j] + d[..., k]) / 2
        cands += [mid, mid + np.pi]
    best = None
    for s in cands:
        val = circle_distance(d, s[..., None]).max(axis=-1)
        best = val if best is None else np.minimum(best, val)
    return float(best) if np.ndim(best) == 0 else best


def phase_limit_lines(line: LineInP3) -> list[PhaseLimitLine]:
    """The four lines h_0..h_3 of accumulation points.

    h_0 is the diagonal (as x -> inf all three arguments agree with arg x);
    for i >= 1, h_i frees coordinate i and fixes coordinate j at
    arg(zeta_i - zeta_j).  Phase shifts are added back.
    """
    _require_distinct(line, "phase limit lines")
    shift = np.array(line.phase_shift)
    out = [PhaseLimitLine(0, tuple(shift))]
    z = line.roots
    for i in (1, 2, 3):
        base = shift.copy()
        for j in (1, 2, 3):
            if j != i:
                base[j - 1] += np.angle(z[i] - z[j])
        out.append(PhaseLimitLine(i, tuple(base)))
    return out


def _int_cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def lines_intersect(lines: Sequence[PhaseLimitLine], tol: float = INTERSECT_TOL) -> list[tuple[int, int]]:
    """Pairs (i, j) of lines that meet in U P^3.

    Two lines p + s e and q + t f with integer directions meet iff q - p lies
    in span(e, f) + 2 pi Z^3.  With n = e x f primitive that is
    <n, q - p> in 2 pi Z; parallel lines meet iff they coincide.
    """
    out = []
    for (a, la), (b, lb) in itertools.combinations(enumerate(lines), 2):
        e = tuple(int(v) for v in la.direction)
        f = tuple(int(v) for v in lb.direction)
        diff = np.array(lb.fixed_angles) - np.array(la.fixed_angles)
        n = _int_cross(e, f)
        if any(n):
            g = gcd(gcd(abs(n[0]), abs(n[1])), abs(n[2]))
            meet = circle_distance(float(np.dot(np.array(n) // g, diff)), 0.0) <= tol
        else:
            meet = _distance_to_line(np.array(lb.fixed_angles), np.array(la.fixed_angles), la.free_index) <= tol
        if meet:
            out.append((la.free_index, lb.free_index))
    return out


def limit_circle_image(line: LineInP3, i: int, epsilon: float, samples: int = 2000) -> np.ndarray:
    """arg(phi) on the circle of radius epsilon about zeta_i.

    For zeta_0 = inf the circle is |x| = 1/epsilon, the image of a circle of
    radius epsilon under x -> 1/x.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    psi = -np.pi + 2 * np.pi * (np.arange(samples) + 0.5) / samples
    z = line.roots[i]
    if is_infinite(z):
        x = np.exp(1j * psi) / epsilon
    else:
        x = z + epsilon * np.exp(1j * psi)
    return line(x)


# --------------------------------------------------------------------------
# arcs and segments

def _mobius_to_01inf(za: complex, zb: complex, zc: complex) -> np.ndarray:
    """2x2 matrix on homogeneous coordinates sending za, zb, zc to 0, 1, inf."""
    def vanish(z):
        s, t = _homogeneous(z)
        return np.array([t, -s])  # row vector of a form vanishing at z

    La, Lc = vanish(za), vanish(zc)
    hb = np.array(_homogeneous(zb))
    return np.array([La * (Lc @ hb), Lc * (La @ hb)])


def arc_point(roots3: Sequence[complex], arc: tuple[int, int], u: float = 0.5) -> tuple[complex, complex]:
    """Homogeneous point of the arc from roots3[a] to roots3[b] avoiding the third root.

    ``u`` in (0, 1) is the position along the arc in the transported real
    coordinate, so u = 0.5 is the arc's midpoint.
    """
    a, b = arc
    c = ({0, 1, 2} - {a, b}).pop()
    M = _mobius_to_01inf(roots3[a], roots3[b], roots3[c])
    s, t = np.linalg.solve(M, np.array([u, 1.0], dtype=complex))
    return complex(s), complex(t)


def arc_image(roots3: Sequence[complex], arc: tuple[int, int] = (0, 1),
              scales: Sequence[complex] | None = None) -> np.ndarray:
    """The constant value of arg(l_0, l_1, l_2) mod the diagonal on one arc.

    The circle through the three roots is the Moebius image of the real line;
    the arc between roots ``arc = (a, b)`` is the one avoiding the third
    root.  Forms are s - zeta t (t for infinity), multiplied by ``scales``.
    Returns (theta_1 - theta_0, theta_2 - theta_0).
    """
    roots3 = [_root(z) for z in roots3]
    if len(roots3) != 3 or len(_distinct(roots3)) != 3:
        raise ValueError("arc_image needs three distinct roots")
    if sorted(arc) not in ([0, 1], [0, 2], [1, 2]):
        raise ValueError("arc must name two of the three roots")
    scales = np.ones(3, dtype=complex) if scales is None else np.asarray(scales, dtype=complex)
    s, t = arc_point(roots3, arc)
    vals = np.array([_form(z, s, t) for z in roots3]) * scales
    th = np.angle(vals)
    return wrap_angle(th[1:] - th[0])


@dataclass(frozen=True)
class CoamoebaSegment:
    """An open segment {fixed_angles + s * direction : s strictly between the
    interval endpoints} of U P^3 (chart), parallel to coordinate direction
    ``direction_index`` (0 meaning the diagonal).

    ``source`` is (i, (a, b), c): the segment is the image of the arc from
    zeta_a to zeta_b of the circle through the roots other than zeta_i,
    the arc that avoids zeta_c.
    """

    direction_index: int
    fixed_angles: tuple[float, float, float]
    interval: tuple[float, float]
    source: tuple[int, tuple[int, int], int]

    @property
    def direction(self) -> np.ndarray:
        return _direction(self.direction_index)

    @property
    def length(self) -> float:
        return abs(self.interval[1] - self.interval[0])

    def points(self, k: int = 100, margin: float = 0.0) -> np.ndarray:
        """``k`` points along the open segment, avoiding ``margin`` at each end."""
        lo, hi = self.interval
        s = np.linspace(0.0, 1.0, k + 2)[1:-1]
        s = margin + s * (1 - 2 * margin)
        vals = lo + s * (hi - lo)
        return wrap_angle(np.array(self.fixed_angles) + vals[:, None] * self.direction)

    def to_dict(self) -> dict:
        i, (a, b), c = self.source
        return {
            "direction_index": self.direction_index,
            "direction": self.direction.astype(int).tolist(),
            "fixed_angles": list(self.fixed_angles),
            "interval": list(self.interval),
            "circle_of_roots": [k for k in range(4) if k != i],
            "arc": [a, b],
        }


def coamoeba_segments(line: LineInP3) -> list[CoamoebaSegment]:
    """The 12 segments in the coamoeba of a line with non-cocircular roots.

    For each i the circle through the other three roots has three arcs.
    Dropping l_i, each arc maps to a single point of U P^2, while
    arg(l_i / l_c) (c the root off the arc) moves monotonically from its
    limit at one endpoint root to its limit at the other, less than pi in
    total.  That sweeps a segment parallel to coordinate direction i.
    """
    _require_distinct(line, "segments")
    if is_cocircular(line.roots):
        raise ValueError("roots are cocircular: the circles coincide; use the real-line tools")
    roots = line.roots
    out = []
    for i in range(4):
        others = [k for k in range(4) if k != i]
        for a, b in itertools.combinations(others, 2):
            c = next(k for k in others if k not in (a, b))
            sub = [roots[a], roots[b], roots[c]]
            s, t = arc_point(sub, (0, 1))
            mid = line.homogeneous_args(s, t)
            rel = mid - mid[c]  # Theta_j - Theta_c, constant on the arc for j != i

            def limit(k):
                sk, tk = _homogeneous(roots[k])
                th = line.homogeneous_args(sk, tk)
                return th[i] - th[c]

            va, vb = limit(a), limit(b)
            sweep_a = wrap_angle(rel[i] - va)
            sweep_b = wrap_angle(vb - rel[i])
            start, end = rel[i] - sweep_a, rel[i] + sweep_b
            if i == 0:
                # chart_m = (Theta_m - Theta_c) - s along (-1,-1,-1); flip to (1,1,1)
                base = rel[1:].copy()
                start, end = -start, -end
            else:
                base = rel[1:] - rel[0]
                base[i - 1] = -rel[0]
            # fold the start into (-pi, pi], keeping the signed sweep
            shift = wrap_angle(start) - start
            interval = (start + shift, end + shift)
            out.append(CoamoebaSegment(i, tuple(wrap_angle(base)), interval, (i, (a, b), c)))
    return out


# --------------------------------------------------------------------------
# projections and the quadrilateral of a real line

def projected_line(line: LineInP3, i: int) -> LineT2:
    """The plane line obtained by forgetting l_i (projection along direction i).

    For i >= 1 its coordinates are the two remaining chart coordinates; for
    i = 0 they are (theta_2 - theta_1, theta_3 - theta_1).
    """
    _require_distinct(line, "projection")
    z = line.roots
    sh = np.array((0.0,) + line.phase_shift)
    if i == 0:
        a = (z[1] - z[3]) * np.exp(-1j * (sh[2] - sh[1]))
        b = -(z[1] - z[2]) * np.exp(-1j * (sh[3] - sh[1]))
        return LineT2(a, b, z[3] - z[2])
    j, k = (m for m in (1, 2, 3) if m != i)
    return LineT2(np.exp(-1j * sh[j]), -np.exp(-1j * sh[k]), z[j] - z[k])


def project(points, i: int) -> np.ndarray:
    """Chart points (k, 3) to the coordinates of :func:`projected_line`."""
    p = np.asarray(points, dtype=float)
    if i == 0:
        return wrap_angle(p[..., 1:] - p[..., :1])
    keep = [m for m in range(3) if m != i - 1]
    return p[..., keep]


def _triangle_violation(q: np.ndarray, side: int) -> np.ndarray:
    """How far standard-frame points lie outside one closed triangle.

    side = +1 is {alpha - beta >= pi, alpha <= pi, beta >= -pi}, side = -1 its
    negative; every lift by 2 pi Z^2 is tried.
    """
    best = np.full(q.shape[:-1], np.inf)
    for k1, k2 in itertools.product((-1, 0, 1), repeat=2):
        a = q[..., 0] + 2 * np.pi * k1
        b = q[..., 1] + 2 * np.pi * k2
        if side > 0:
            v = np.maximum.reduce([np.pi - (a - b), a - np.pi, -np.pi - b, np.zeros_like(a)])
        else:
            v = np.maximum.reduce([(a - b) + np.pi, -np.pi - a, b - np.pi, np.zeros_like(a)])
        best = np.minimum(best, v)
    return best


def quadrilateral(line: LineInP3) -> np.ndarray:
    """The four constant values of arg(phi) on the real intervals between the
    roots of a real-normalised line, left to right."""
    if not line.is_real_normalized() or len(_distinct(line.roots)) != 4:
        raise ValueError("the quadrilateral needs a real-normalised line with four distinct roots")
    r = sorted(z.real for z in line.finite_roots())
    xs = [r[0] - 1.0, (r[0] + r[1]) / 2, (r[1] + r[2]) / 2, r[2] + 1.0]
    return line(np.array(xs, dtype=complex))


def quadrilateral_violations(line: LineInP3, points, half_plane: Literal["upper", "lower"] = "upper") -> np.ndarray:
    """Per point and per projection direction, the distance outside the triangle
    that the given half plane maps into; shape (k, 4).  Zero everywhere means
    the points satisfy all four triangle-projection constraints, which
    together cut out the convex hull of the quadrilateral."""
    if not line.is_real_normalized():
        raise ValueError("half planes are only meaningful for real-normalised lines")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = [z.real for z in line.finite_roots()]
    probe = line(np.array([np.mean(r) + (1j if half_plane == "upper" else -1j) * (1 + np.ptp(r))]))
    out = np.empty((len(pts), 4))
    for i in range(4):
        l2 = projected_line(line, i)
        ref = reduce_to_standard_line(l2, project(probe, i))[0]
        side = 1 if ref[0] - ref[1] > np.pi else -1
        out[:, i] = _triangle_violation(reduce_to_standard_line(l2, project(pts, i)), side)
    return out


# --------------------------------------------------------------------------
# sampling

def _stratified(rng: np.random.Generator, k: int) -> np.ndarray:
    # Latin hypercube in two dimensions
    u = (rng.permutation(k) + rng.random(k)) / k
    v = (rng.permutation(k) + rng.random(k)) / k
    return np.column_stack([u, v])


def _ray_meet(pa: complex, pb: complex, ta: np.ndarray, tb: np.ndarray) -> np.ndarray:
    """Points y = pa + r e^{i ta} = pb + s e^{i tb} with r, s > 0 (NaN where the rays miss)."""
    ea, eb = np.exp(1j * ta), np.exp(1j * tb)
    d = pb - pa
    with np.errstate(divide="ignore", invalid="ignore"):
        det = eb.real * ea.imag - ea.real * eb.imag
        r = (eb.real * d.imag - eb.imag * d.real) / det
        s = (ea.real * d.imag - ea.imag * d.real) / det
    y = pa + r * ea
    return np.where((r > 0) & (s > 0) & np.isfinite(r), y, np.nan)


def _projection_pullback(line: LineInP3, i: int, k: int, seed, keep) -> np.ndarray:
    """``k`` points of C whose images are uniform over the projection along direction i.

    Forgetting l_i leaves two angles arg(l_j / l_m), arg(l_k / l_m).  In the
    coordinate y = x (m = 0) or y = 1/(x - zeta_1) (i = 0, m = 1) these are
    the directions of y seen from two fixed points, so a pair of angles
    determines y as the meeting point of two rays.  Angle pairs come from a
    scrambled Halton sequence; pairs whose rays miss are rejected.
    """
    from scipy.stats import qmc

    z = line.roots
    if i == 0:
        j, kk = 2, 3
        pa, pb = 1 / (z[j] - z[1]), 1 / (z[kk] - z[1])
        oa, ob = -np.angle(z[1] - z[j]), -np.angle(z[1] - z[kk])
    else:
        j, kk = (m for m in (1, 2, 3) if m != i)
        pa, pb, oa, ob = z[j], z[kk], 0.0, 0.0
    engine = qmc.Halton(2, scramble=True, seed=seed)
    got, n = [], 0
    while n < k:
        t = -np.pi + 2 * np.pi * engine.random(max(64, 4 * (k - n)))
        y = _ray_meet(pa, pb, t[:, 0] + oa, t[:, 1] + ob)
        y = y[np.isfinite(y)]
        if i == 0:
            y = y[y != 0]
            y = z[1] + 1 / y
        y = y[keep(y)]
        got.append(y)
        n += len(y)
    return np.concatenate(got)[:k]


def sample_membrane(line: LineInP3, samples: int = 100_000,
                    half_plane: Literal["upper", "lower", "both"] = "both",
                    seed: int = 0, workers: int | None = None) -> PointCloud:
    """arg(phi) over a stratified sample of C.

    Two kinds of strata:

    * log-polar shells: one about the centroid of the finite roots with
      large moduli (3 to 1e3 times the root spread; its image hugs h_0) and
      one about each finite root with moduli 1e-4 to 0.3 times the distance
      to the nearest other root (hugging h_i).  Moduli and angles form a
      Latin hypercube.
    * projection pullbacks: for each of the four coordinate projections,
      points of C whose projected images are uniform (see
      :func:`_projection_pullback`).  These cover the middle of the
      membrane evenly, which shells alone do not.

    With four distinct roots 80% of the samples are pullbacks, split evenly;
    otherwise only shells are used.  ``half_plane`` keeps Im x > 0 or < 0
    and needs a real-normalised line.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if half_plane not in ("upper", "lower", "both"):
        raise ValueError("half_plane must be upper, lower or both")
    if half_plane != "both" and not line.is_real_normalized():
        raise ValueError("half planes need a real-normalised line; call real_normalize first")
    fin = _distinct(line.finite_roots())
    center = complex(np.mean(fin)) if fin else 0j
    spread = max([1.0] + [abs(z - center) for z in fin])
    generic = len(_distinct(line.roots)) == 4
    n_pull = (4 * samples // 5) // 4 if generic else 0
    n_shell = samples - 4 * n_pull
    n_root = n_shell // (len(fin) + 1) if fin else 0
    sets = [(center, 3 * spread if generic else 1e-3 * spread, 1e3 * spread, n_shell - n_root * len(fin))]
    for z in fin:
        near = min([abs(z - w) for w in fin if w != z] + [spread])
        sets.append((z, 1e-4 * near, 0.3 * near, n_root))
    lo, hi = {"both": (-np.pi, np.pi), "upper": (0.0, np.pi), "lower": (-np.pi, 0.0)}[half_plane]
    keep = {"both": lambda y: np.ones(y.shape, bool),
            "upper": lambda y: y.imag > 0,
            "lower": lambda y: y.imag < 0}[half_plane]
    jobs = [("shell", js) for js in sets] + [("pullback", i) for i in range(4) if n_pull]
    seeds = np.random.SeedSequence(seed).spawn(len(jobs))

    def work(job):
        (kind, spec), ss = job
        if kind == "pullback":
            x = _projection_pullback(line, spec, n_pull, np.random.default_rng(ss), keep)
        else:
            c, r0, r1, k = spec
            if k == 0:
                return np.empty((0, 3))
            uv = _stratified(np.random.default_rng(ss), k)
            r = r0 * (r1 / r0) ** uv[:, 0]
            psi = lo + (hi - lo) * uv[:, 1]
            x = c + r * np.exp(1j * psi)
        x = x[~np.isin(x, fin)]
        return line(x)

    parts = ordered_map(work, list(zip(jobs, seeds)), workers)
    return PointCloud(
        3,
        np.concatenate(parts),
        provenance=f"sample_membrane roots={[_format_root(z) for z in line.roots]} "
                   f"samples={samples} half_plane={half_plane} seed={seed}",
        meta={"shell_sets": [(complex(c), r0, r1, k) for c, r0, r1, k in sets],
              "pullback_per_projection": n_pull},
    )


def contour_image(line: LineInP3, epsilon: float = 1e-3, points_per_piece: int = 200) -> PointCloud:
    """arg(phi) along the upper half-plane contour of a real line.

    The contour runs along the real axis from -1/epsilon to 1/epsilon,
    detouring over each root on a semicircle of radius epsilon, and closes
    with the semicircle of radius 1/epsilon about 0.  ``meta['pieces']``
    maps piece names (segment_0..3, semicircle_1..3, large_semicircle) to
    row ranges.
    """
    if not line.is_real_normalized() or len(_distinct(line.roots)) != 4:
        raise ValueError("contour_image needs a real line with four distinct roots; see real_normalize")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    r = sorted(z.real for z in line.finite_roots())
    R = 1.0 / epsilon
    ends = [-R] + [v for z in r for v in (z - epsilon, z + epsilon)] + [R]
    if any(b <= a for a, b in zip(ends, ends[1:])) or R <= max(abs(z) for z in r) + epsilon:
        raise ValueError("epsilon too large: contour pieces overlap")
    k = points_per_piece
    pieces: list[tuple[str, np.ndarray]] = []
    for m in range(4):
        a, b = ends[2 * m], ends[2 * m + 1]
        pieces.append((f"segment_{m}", np.linspace(a, b, k).astype(complex)))
        if m < 3:
            psi = np.linspace(np.pi, 0.0, k)
            pieces.append((f"semicircle_{m + 1}", r[m] + epsilon * np.exp(1j * psi)))
    psi = np.linspace(0.0, np.pi, k)
    pieces.append(("large_semicircle", R * np.exp(1j * psi)))
    order = ["segment_0", "semicircle_1", "segment_1", "semicircle_2", "segment_2",
             "semicircle_3", "segment_3", "large_semicircle"]
    named = dict(pieces)
    index, chunks, start = {}, [], 0
    for name in order:
        x = named[name]
        chunks.append(line(x))
        index[name] = (start, start + len(x))
        start += len(x)
    return PointCloud(3, np.concatenate(chunks),
                      provenance=f"contour_image epsilon={epsilon:g} points_per_piece={k}",
                      meta={"pieces": index})


def differential_rank(line: LineInP3, x: complex, h: float = 1e-6, rel_tol: float = 1e-6) -> int:
    """Numerical rank of the real 3x2 Jacobian of arg(phi) at x (central differences)."""
    x = complex(x)
    for z in line.roots[1:]:
        if not is_infinite(z) and abs(x - z) <= 10 * h:
            raise ValueError("x is at a root of the parametrisation")
    cols = []
    for step in (h, 1j * h):
        d = wrap_angle(line(x + step) - line(x - step)) / (2 * h)
        cols.append(d)
    J = np.column_stack(cols)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))
