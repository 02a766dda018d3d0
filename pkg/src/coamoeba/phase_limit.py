"""Phase limit sets of hypersurfaces.

The phase limit set is the union of the coamoebae of the initial forms
in_w f over w != 0.  Where in_w f is supported on an edge of the Newton
polytope this coamoeba is a finite union of codual hyperplanes
{theta : <v, theta> = phi mod 2 pi}, which we compute in closed form.  The
degeneration sampler watches the fibres t^{-w} X approach coA(in_w X) as the
real parameter t goes to 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .laurent import LaurentPolynomial, LaurentTerm, deform, initial_form, weight_value
from .plane import PlaneGrid, plane_curve_points
from .polytope import Cone, logarithmic_limit_directions, newton_polytope, normal_fan, primitive
from .roots import RESIDUAL_TOL, solve_univariate
from .torus import PointCloud, arg_map, circle_distance, wrap_angle

__all__ = [
    "CodualHyperplane",
    "binomial_coamoeba",
    "edge_hyperplanes",
    "hypersurface_phase_limit",
    "initial_coamoeba",
    "degenerate",
    "distance_to_hyperplanes",
    "PhaseLimitReport",
    "phase_limit_summary",
]

ROOT_MERGE_TOL = 1e-6
# the root finder stops once |g(z)| <= RESIDUAL_TOL * scale, which leaves an
# m-fold root smeared over a disc of radius about RESIDUAL_TOL ** (1 / m)
CLUSTER_FACTOR = 4.0


def _canonical_sign(v: Sequence[int]) -> int:
    first = next(a for a in v if a != 0)
    return 1 if first > 0 else -1


@dataclass(frozen=True)
class CodualHyperplane:
    """The union over k of {theta in U^n : <normal, theta> = offsets[k] mod 2 pi}.

    ``normal`` is primitive with its first nonzero entry positive; offsets
    are in (-pi, pi] and sorted.  ``multiplicity`` counts how often the
    family arose (repeated roots of an edge polynomial).
    """

    rank: int
    normal: tuple[int, ...]
    offsets: tuple[float, ...]
    multiplicity: int = 1

    def __post_init__(self):
        v = tuple(int(a) for a in self.normal)
        if len(v) != self.rank:
            raise ValueError(f"normal must have length {self.rank}")
        if primitive(v) != v and primitive(v) != tuple(-a for a in v):
            raise ValueError("normal must be primitive")
        offs = np.asarray(self.offsets, dtype=float)
        if _canonical_sign(v) < 0:
            v = tuple(-a for a in v)
            offs = -offs
        object.__setattr__(self, "normal", v)
        object.__setattr__(self, "offsets", tuple(sorted(float(wrap_angle(o)) for o in offs)))

    def distance(self, theta) -> np.ndarray | float:
        """l-infinity distance on U^n: min_k circle_distance(<v, theta>, phi_k) / |v|_1."""
        theta = np.asarray(theta, dtype=float)
        pair = theta @ np.array(self.normal, dtype=float)
        d = np.min([circle_distance(pair, o) for o in self.offsets], axis=0)
        out = d / np.abs(self.normal).sum()
        return float(out) if np.ndim(out) == 0 else out

    def contains(self, theta, tol: float = 1e-9):
        d = self.distance(theta)
        return d <= tol

    def translate(self, delta) -> CodualHyperplane:
        """The image under theta -> theta + delta."""
        shift = float(np.dot(self.normal, np.asarray(delta, dtype=float)))
        return CodualHyperplane(self.rank, self.normal, tuple(o + shift for o in self.offsets), self.multiplicity)

    def to_dict(self) -> dict:
        return {"normal": list(self.normal), "offsets": list(self.offsets), "multiplicity": self.multiplicity}


def binomial_coamoeba(t1: LaurentTerm, t2: LaurentTerm) -> CodualHyperplane:
    """Coamoeba of c_a xi^a + c_b xi^b = 0.

    That is xi^(a-b) = -c_b/c_a, so <d, theta> = pi + arg(c_b/c_a) with
    d = a - b = g v.  Dividing by g gives g parallel translates.
    """
    a, b = tuple(t1.exponent), tuple(t2.exponent)
    if len(a) != len(b):
        raise ValueError("terms have different ranks")
    if a == b:
        raise ValueError("a binomial needs two distinct exponents")
    d = [x - y for x, y in zip(a, b)]
    g = reduce(gcd, (abs(x) for x in d))
    v = tuple(x // g for x in d)
    phi = np.pi + np.angle(t2.coefficient / t1.coefficient)
    if _canonical_sign(v) < 0:
        v, phi = tuple(-x for x in v), -phi
    offsets = [(phi + 2 * np.pi * k) / g for k in range(g)]
    return CodualHyperplane(len(a), v, tuple(offsets))


def edge_hyperplanes(f: LaurentPolynomial, p: Sequence[int], q: Sequence[int]) -> list[CodualHyperplane]:
    """Codual families of the part of ``f`` on the edge from p to q.

    With u the primitive edge direction and L the lattice length, the edge
    part is xi^p g(xi^u) with g(z) = sum_j c_{p+ju} z^j.  Each root r of g
    gives {<u, theta> = arg r}; numerically equal roots are merged and
    counted in ``multiplicity``.
    """
    p, q = tuple(int(a) for a in p), tuple(int(a) for a in q)
    d = [b - a for a, b in zip(p, q)]
    L = reduce(gcd, (abs(x) for x in d))
    if L == 0:
        raise ValueError("edge endpoints coincide")
    u = tuple(x // L for x in d)
    coeffs = f.as_dict()
    g = [coeffs.get(tuple(a + j * s for a, s in zip(p, u)), 0j) for j in range(L + 1)]
    if g[0] == 0 or g[-1] == 0:
        raise ValueError("edge endpoints must be in the support")
    if L == 1:
        return [binomial_coamoeba(LaurentTerm(g[0], p), LaurentTerm(g[1], q))]
    roots = solve_univariate(g[::-1])
    groups = _cluster_roots(np.asarray(roots))
    out = [CodualHyperplane(f.rank, u, (float(np.angle(np.mean(grp))),), len(grp)) for grp in groups]
    return sorted(out, key=lambda h: h.offsets)


def _cluster_roots(roots: np.ndarray) -> list[np.ndarray]:
    """Group numerically repeated roots.  For each remaining root take the
    largest m whose m nearest roots fit in the disc an m-fold root smears to."""
    remaining = list(roots)
    groups = []
    while remaining:
        r = remaining[0]
        order = np.argsort([abs(z - r) for z in remaining], kind="stable")
        for m in range(len(remaining), 0, -1):
            cand = np.array([remaining[k] for k in order[:m]])
            radius = max(ROOT_MERGE_TOL, CLUSTER_FACTOR * RESIDUAL_TOL ** (1.0 / m)) if m > 1 else np.inf
            if np.max(np.abs(cand - cand.mean())) <= radius * max(1.0, abs(r)):
                break
        groups.append(cand)
        keep = set(int(k) for k in order[m:])
        remaining = [z for k, z in enumerate(remaining) if k in keep]
    return groups


def hypersurface_phase_limit(f: LaurentPolynomial) -> list[tuple[Cone, list[CodualHyperplane]]]:
    """For each edge of the Newton polytope whose normal cone has dimension
    n - 1 >= 1, that cone and the codual families of in_w f for w in it."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no phase limit set")
    if f.is_monomial():
        raise ValueError("a monomial has no edges, so no phase limit set")
    fan = normal_fan(newton_polytope(f))
    out = []
    for cone in fan.cones:
        if len(cone.face) == 2 and cone.dim == f.rank - 1 and cone.dim >= 1:
            p, q = cone.face
            out.append((cone, edge_hyperplanes(f, p, q)))
    return out


def initial_coamoeba(f: LaurentPolynomial, w: Sequence[int]) -> list[CodualHyperplane] | None:
    """Closed-form coA(in_w f) when in_w f lives on a segment, else ``None``.

    A monomial initial form has empty coamoeba and gives ``[]``.
    """
    g = initial_form(f, w)
    if g.is_monomial():
        return []
    supp = np.array(g.support)
    base = supp[0]
    diffs = supp[1:] - base
    if np.linalg.matrix_rank(diffs.astype(float)) != 1:
        return None
    u = primitive(diffs[0])
    t = [0] + list((diffs @ np.array(u)) // int(np.dot(u, u)))
    lo, hi = int(np.argmin(t)), int(np.argmax(t))
    return edge_hyperplanes(g, g.support[lo], g.support[hi])


def distance_to_hyperplanes(points, hyperplanes: Sequence[CodualHyperplane]) -> np.ndarray:
    """Distance from each point to the union of the given families."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if not hyperplanes:
        return np.full(len(pts), np.inf)
    return np.min([h.distance(pts) for h in hyperplanes], axis=0)


def _auto_solve_for(g: LaurentPolynomial) -> int:
    # solve for a variable the initial form actually depends on
    exps = g.exponent_matrix()
    spans = exps.max(axis=0) - exps.min(axis=0)
    return int(np.argmax(spans > 0)) if spans.any() else 1


def degenerate(f: LaurentPolynomial, w: Sequence[int], t_sequence: Sequence[float],
               grid: PlaneGrid | None = None, window: tuple[float, float] = (0.5, 2.0),
               workers: int | None = None) -> list[PointCloud]:
    """Argument clouds of the fibres t^{-w} X for each t.

    The fibre is V(t^{-w(f)} f(t)) with f(t)(x) = f(t^w x).  Because t is
    real and positive, its argument image is that of actual points of X
    moved along the degeneration.  Each cloud's ``meta`` records ``t``, the
    boolean ``window`` mask of samples whose coordinates all have modulus in
    ``window``, and ``distance``: the largest distance from a windowed
    sample to coA(in_w f) when that set has a closed form (else ``None``).
    Without an explicit grid the solved variable is one that in_w f
    depends on.
    """
    if f.rank != 2:
        raise ValueError("degenerate samples plane curves; f must have rank 2")
    w = tuple(int(a) for a in w)
    if len(w) != 2 or not any(w):
        raise ValueError("weight must be a nonzero integer vector of length 2")
    ts = [float(t) for t in t_sequence]
    if any(not t > 0 for t in ts):
        raise ValueError("degeneration parameters must be positive")
    if grid is None:
        grid = PlaneGrid(solve_for=_auto_solve_for(initial_form(f, w)))
    predicted = initial_coamoeba(f, w)
    wf = weight_value(f, w)
    lo, hi = window

    def fibre(t):
        ft = deform(f, w, t)
        ft = LaurentPolynomial.from_dict(2, {m: c * t ** (-wf) for m, c in ft.as_dict().items()})
        pts, stats = plane_curve_points(ft, grid, workers=1)
        mod = np.abs(pts)
        mask = np.all((mod >= lo) & (mod <= hi), axis=1)
        theta = arg_map(pts) if len(pts) else np.empty((0, 2))
        dist = None
        if predicted is not None and predicted and mask.any():
            dist = float(distance_to_hyperplanes(theta[mask], predicted).max())
        return PointCloud(
            2, theta,
            provenance=f"degenerate f={f} w={w} t={t:g} {grid.describe()}",
            meta=dict(stats, t=t, window=mask, window_bounds=window, distance=dist, grid=grid),
        )

    return ordered_map(fibre, ts, workers)


# --------------------------------------------------------------------------
# summary report

@dataclass(frozen=True)
class PhaseLimitEntry:
    cone: Cone
    weight: tuple[int, ...]
    initial: LaurentPolynomial
    hyperplanes: tuple[CodualHyperplane, ...] | None

    def to_dict(self) -> dict:
        return {
            "rays": [list(r) for r in self.cone.rays],
            "lineality": [list(v) for v in self.cone.lineality],
            "dim": self.cone.dim,
            "weight": list(self.weight),
            "initial_form": str(self.initial),
            "codual": None if self.hyperplanes is None else [h.to_dict() for h in self.hyperplanes],
        }


@dataclass(frozen=True)
class PhaseLimitReport:
    """Cones of the logarithmic limit set with their initial forms and, for
    edge cones, closed-form codual families."""

    polynomial: LaurentPolynomial
    entries: tuple[PhaseLimitEntry, ...] = field(default_factory=tuple)

    def hyperplanes(self) -> list[CodualHyperplane]:
        return [h for e in self.entries if e.hyperplanes for h in e.hyperplanes]

    def to_dict(self) -> dict:
        return {
            "polynomial": str(self.polynomial),
            "rank": self.polynomial.rank,
            "cones": [e.to_dict() for e in self.entries],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_text(self, degrees: bool = False) -> str:
        unit = (lambda a: f"{np.degrees(a):.10g}deg") if degrees else (lambda a: f"{a:.10g}")
        lines = [f"phase limit set of {self.polynomial}"]
        if not self.entries:
            lines.append("  empty (no weight w != 0 has a non-monomial initial form)")
        for e in self.entries:
            rays = " ".join(str(list(r)) for r in e.cone.rays) or "-"
            lin = " ".join(str(list(v)) for v in e.cone.lineality)
            head = f"  cone dim {e.cone.dim} rays {rays}"
            if lin:
                head += f" lineality {lin}"
            lines.append(head)
            lines.append(f"    in_w f = {e.initial}   (w = {list(e.weight)})")
            if e.hyperplanes is None:
                lines.append("    coamoeba: no closed form; sample it")
            for h in e.hyperplanes or ():
                offs = ", ".join(unit(o) for o in h.offsets)
                mult = f" x{h.multiplicity}" if h.multiplicity > 1 else ""
                lines.append(f"    <{list(h.normal)}, theta> = {offs}{mult}")
        return "\n".join(lines)

    def render(self, degrees: bool = False) -> str:
        """Human-readable text followed by the machine-readable JSON section."""
        return self.to_text(degrees) + "\n\njson:\n" + self.to_json()


def phase_limit_summary(f: LaurentPolynomial) -> PhaseLimitReport:
    """Every cone of dimension 1..n-1 of the normal fan with a relative
    interior weight, its initial form, and the closed-form coamoeba where the
    initial form is supported on an edge."""
    if f.is_zero():
        raise ValueError("the zero polynomial has no phase limit set")
    entries = []
    if not f.is_monomial():
        edges = {cone.face: hyps for cone, hyps in hypersurface_phase_limit(f)}
        for cone in logarithmic_limit_directions(f):
            # adding lineality vectors stays in the relative interior and
            # makes w nonzero for cones that are pure lineality
            w = tuple(np.add.reduce([cone.relative_interior_point(), *cone.lineality]).tolist())
            g = initial_form(f, w)
            hyp = edges[cone.face] if cone.face in edges else initial_coamoeba(f, w)
            entries.append(PhaseLimitEntry(cone, tuple(w), g, None if hyp is None else tuple(hyp)))
    return PhaseLimitReport(f, tuple(entries))
