"""Newton polytopes, their normal fans and the logarithmic limit directions of
a hypersurface.

Everything here is exact: exponents, normals and rays are Python integers.
Fans use the minimum convention, so the cone of a face F is the closure of
the set of weights w for which <., w> is minimised over the support exactly
on F.  Construction is limited to rank n <= 3.

A face's normal cone is generated by the inner normals of the facets that
contain it, plus the lineality space (the orthogonal complement of the affine
hull of the polytope).  Facets here are facets of the polytope inside its own
affine hull, so lower-dimensional polytopes are handled by the same rule.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import UnsupportedRankError
from .laurent import LaurentPolynomial

__all__ = [
    "NewtonPolytope",
    "Cone",
    "NormalFan",
    "newton_polytope",
    "normal_fan",
    "logarithmic_limit_directions",
    "cone_of",
    "face_of",
    "MAX_RANK",
]

MAX_RANK = 3

Vec = tuple[int, ...]


# --------------------------------------------------------------------------
# small exact helpers

def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def _sub(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def _cross(u: Sequence[int], v: Sequence[int]) -> Vec:
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def primitive(v: Sequence[int]) -> Vec:
    """Divide an integer vector by the gcd of its entries."""
    g = reduce(gcd, (abs(int(a)) for a in v), 0)
    if g == 0:
        raise ValueError("the zero vector has no primitive form")
    return tuple(int(a) // g for a in v)


def integer_rank(vectors: Sequence[Sequence[int]]) -> int:
    """Rank of a list of integer vectors by fraction-free elimination."""
    rows = [list(map(int, v)) for v in vectors if any(v)]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank]
        for r in range(rank + 1, len(rows)):
            if rows[r][col]:
                f = rows[r][col]
                rows[r] = [p[col] * a - f * b for a, b in zip(rows[r], p)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def _affine_rank(points: Sequence[Vec]) -> int:
    if len(points) <= 1:
        return 0
    return integer_rank([_sub(p, points[0]) for p in points[1:]])


def _positive(v: Vec) -> Vec:
    # sign convention for lineality generators: first nonzero entry positive
    first = next(a for a in v if a)
    return v if first > 0 else tuple(-a for a in v)


def _orthogonal_basis(directions: Sequence[Vec], n: int) -> tuple[Vec, ...]:
    """Primitive integer basis of the orthogonal complement of span(directions), n <= 3."""
    return tuple(_positive(v) for v in _orthogonal_raw(directions, n))


def _orthogonal_raw(directions: Sequence[Vec], n: int) -> tuple[Vec, ...]:
    d = integer_rank(directions)
    if d == n:
        return ()
    if d == 0:
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    indep = []
    for v in directions:
        if integer_rank(indep + [v]) > len(indep):
            indep.append(v)
    if n == 2:
        (a, b), = indep
        return (primitive((-b, a)),)
    if d == 2:
        return (primitive(_cross(indep[0], indep[1])),)
    # n == 3, d == 1: two independent vectors orthogonal to e
    e = indep[0]
    out: list[Vec] = []
    for k in range(3):
        c = _cross(e, tuple(int(i == k) for i in range(3)))
        if any(c) and integer_rank(out + [c]) > len(out):
            out.append(primitive(c))
        if len(out) == 2:
            break
    return tuple(out)


def _chain_2d(points: Sequence[tuple[int, int]]) -> list[int]:
    """Indices of the strict convex hull vertices, counterclockwise (monotone chain)."""
    order = sorted(range(len(points)), key=lambda i: points[i])

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(seq):
        out: list[int] = []
        for i in seq:
            while len(out) >= 2 and turn(points[out[-2]], points[out[-1]], points[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = half(order)
    upper = half(reversed(order))
    return lower[:-1] + upper[:-1]


# --------------------------------------------------------------------------
# polytopes

@dataclass(frozen=True)
class NewtonPolytope:
    """Convex hull of the support of a Laurent polynomial.

    ``facets`` lists ``(inner_normal, vertex_subset)`` for the facets of the
    polytope inside its affine hull; inner normals lie in the direction space
    of that hull.  ``lineality`` spans the orthogonal complement of the hull.
    """

    rank: int
    vertices: tuple[Vec, ...]
    support: tuple[Vec, ...]
    dim: int
    lineality: tuple[Vec, ...]
    facets: tuple[tuple[Vec, frozenset], ...]

    def __contains__(self, m) -> bool:
        m = tuple(int(a) for a in m)
        if any(_dot(v, _sub(m, self.vertices[0])) != 0 for v in self.lineality):
            return False
        for u, face in self.facets:
            if _dot(u, _sub(m, next(iter(face)))) < 0:
                return False
        return True


def _facets_1d(points: list[Vec], rank: int) -> list[tuple[Vec, frozenset]]:
    base = points[0]
    e = primitive(next(_sub(p, base) for p in points if p != base))
    t = [_dot(_sub(p, base), e) for p in points]
    lo, hi = points[t.index(min(t))], points[t.index(max(t))]
    return [(e, frozenset([lo])), (tuple(-a for a in e), frozenset([hi]))]


def _facets_2d(points: list[Vec], rank: int, lineality: tuple[Vec, ...]) -> list[tuple[Vec, frozenset]]:
    if rank == 2:
        proj = [tuple(p) for p in points]
        normal = None
    else:
        normal = lineality[0]
        drop = next(k for k in range(3) if normal[k] != 0)
        keep = [k for k in range(3) if k != drop]
        proj = [(p[keep[0]], p[keep[1]]) for p in points]
    ring = _chain_2d(proj)
    facets = []
    for a, b in zip(ring, ring[1:] + ring[:1]):
        p, q = points[a], points[b]
        edge = _sub(q, p)
        u = (-edge[1], edge[0]) if rank == 2 else _cross(normal, edge)
        u = primitive(u)
        other = next(points[c] for c in ring if c not in (a, b))
        if _dot(u, _sub(other, p)) < 0:
            u = tuple(-x for x in u)
        facets.append((u, frozenset([p, q])))
    return facets


def _facets_3d(points: list[Vec]) -> list[tuple[Vec, frozenset]]:
    found: dict[Vec, frozenset] = {}
    try:
        hull = ConvexHull(np.array(points, dtype=float))
        candidates = [tuple(s) for s in hull.simplices]
    except QhullError:
        candidates = []
    ok = bool(candidates)
    for tri in candidates:
        a, b, c = (points[i] for i in tri)
        n = _cross(_sub(b, a), _sub(c, a))
        if not any(n):
            ok = False
            break
        n = primitive(n)
        vals = [_dot(n, _sub(p, a)) for p in points]
        if min(vals) >= 0:
            found[n] = frozenset(p for p, v in zip(points, vals) if v == 0)
        elif max(vals) <= 0:
            n = tuple(-x for x in n)
            found[n] = frozenset(p for p, v in zip(points, vals) if v == 0)
        else:
            ok = False
            break
    if ok:
        return list(found.items())
    # floating point hull disagreed with exact arithmetic: search every plane
    found = {}
    for a, b, c in itertools.combinations(points, 3):
        n = _cross(_sub(b, a), _sub(c, a))
        if not any(n):
            continue
        n = primitive(n)
        if n in found or tuple(-x for x in n) in found:
            continue
        vals = [_dot(n, _sub(p, a)) for p in points]
        if min(vals) >= 0:
            found[n] = frozenset(p for p, v in zip(points, vals) if v == 0)
        elif max(vals) <= 0:
            found[tuple(-x for x in n)] = frozenset(p for p, v in zip(points, vals) if v == 0)
    return list(found.items())


def _polytope_from_points(points: Sequence[Sequence[int]], rank: int) -> NewtonPolytope:
    pts = sorted({tuple(int(a) for a in p) for p in points})
    if not pts:
        raise ValueError("the Newton polytope of the zero polynomial is empty")
    if rank > MAX_RANK:
        raise UnsupportedRankError(f"Newton polytopes are supported for rank <= {MAX_RANK}, got {rank}")
    if any(len(p) != rank for p in pts):
        raise ValueError(f"support points must have length {rank}")
    dim = _affine_rank(pts)
    lineality = _orthogonal_basis([_sub(p, pts[0]) for p in pts[1:]], rank)
    if dim == 0:
        facets = []
    elif dim == 1:
        facets = _facets_1d(pts, rank)
    elif dim == 2:
        facets = _facets_2d(pts, rank, lineality)
    else:
        facets = _facets_3d(pts)
    if dim == 0:
        vertices = tuple(pts)
    elif dim == 1:
        vertices = tuple(sorted(set().union(*(f for _, f in facets))))
    else:
        # a support point is a vertex when the facets through it pin it down
        vertices = tuple(
            p for p in pts
            if _affine_rank([p] + [q for q in pts if all(q in f for _, f in facets if p in f)]) == 0
        )
    facets = tuple(sorted((u, frozenset(q for q in face if q in vertices)) for u, face in facets))
    return NewtonPolytope(rank, vertices, tuple(pts), dim, lineality, facets)


def newton_polytope(f: LaurentPolynomial) -> NewtonPolytope:
    """The Newton polytope of ``f``: vertices are the extreme support points.

    >>> from coamoeba.laurent import parse
    >>> newton_polytope(parse("x^2+x*y+y^2+x+y+1", ["x", "y"])).vertices
    ((0, 0), (0, 2), (2, 0))
    """
    if f.is_zero():
        raise ValueError("the Newton polytope of the zero polynomial is empty")
    return _polytope_from_points(f.support, f.rank)


# --------------------------------------------------------------------------
# cones and fans

@dataclass(frozen=True)
class Cone:
    """A rational polyhedral cone ``cone(rays) + span(lineality)``.

    ``face`` is the set of polytope vertices the cone is normal to (empty for
    a cone built on its own).
    """

    rank: int
    rays: tuple[Vec, ...]
    lineality: tuple[Vec, ...] = ()
    face: tuple[Vec, ...] = ()

    def __post_init__(self):
        rays = tuple(primitive(r) for r in self.rays)
        lin = tuple(primitive(v) for v in self.lineality)
        if any(len(v) != self.rank for v in rays + lin):
            raise ValueError(f"cone generators must have length {self.rank}")
        if len(set(rays)) != len(rays):
            raise ValueError("rays must be pairwise non-parallel")
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "lineality", lin)
        object.__setattr__(self, "face", tuple(sorted(tuple(int(a) for a in v) for v in self.face)))

    @property
    def dim(self) -> int:
        return integer_rank(list(self.rays) + list(self.lineality))

    @property
    def is_maximal(self) -> bool:
        return self.dim == self.rank

    def relative_interior_point(self) -> Vec:
        """An integer vector in the relative interior: the sum of the rays."""
        return tuple(sum(r[i] for r in self.rays) for i in range(self.rank))

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "lineality": [list(v) for v in self.lineality],
            "face": [list(v) for v in self.face],
        }


@dataclass(frozen=True)
class NormalFan:
    """The normal fan of a Newton polytope under the minimum convention:
    one cone per nonempty face, indexed by its vertex set."""

    polytope: NewtonPolytope
    cones: tuple[Cone, ...]

    @property
    def rank(self) -> int:
        return self.polytope.rank

    def cones_of_dim(self, k: int) -> list[Cone]:
        return [c for c in self.cones if c.dim == k]

    def maximal_cones(self) -> list[Cone]:
        return self.cones_of_dim(self.rank)

    def cone_for_face(self, face) -> Cone:
        key = tuple(sorted(tuple(v) for v in face))
        for c in self.cones:
            if c.face == key:
                return c
        raise KeyError(f"{key} is not a face of the polytope")

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(
            {
                "rank": self.rank,
                "vertices": [list(v) for v in self.polytope.vertices],
                "cones": [c.to_dict() for c in self.cones],
            },
            indent=indent,
        )


def _faces(P: NewtonPolytope) -> list[frozenset]:
    top = frozenset(P.vertices)
    faces = {top}
    frontier = {f for _, f in P.facets}
    while frontier:
        faces |= frontier
        nxt = set()
        for a, b in itertools.combinations(faces - {top}, 2):
            c = a & b
            if c and c not in faces:
                nxt.add(c)
        frontier = nxt
    return sorted(faces, key=lambda f: (len(f), sorted(f)))


def normal_fan(P: NewtonPolytope) -> NormalFan:
    """One cone per face F: cone{inner facet normals of facets containing F} + lineality."""
    if P.rank > MAX_RANK:
        raise UnsupportedRankError(f"normal fans are supported for rank <= {MAX_RANK}, got {P.rank}")
    cones = []
    for face in _faces(P):
        rays = sorted(u for u, facet in P.facets if face <= facet)
        cones.append(Cone(P.rank, tuple(rays), P.lineality, tuple(face)))
    for c in cones:
        if c.dim != P.rank - _affine_rank(list(c.face)):
            raise AssertionError("normal cone has the wrong dimension")  # pragma: no cover
    return NormalFan(P, tuple(cones))


def face_of(P: NewtonPolytope, w: Sequence[int]) -> tuple[Vec, ...]:
    """Vertices of P minimising <., w>."""
    w = [int(a) for a in w]
    if len(w) != P.rank:
        raise ValueError(f"weight has length {len(w)}, polytope has rank {P.rank}")
    vals = [_dot(v, w) for v in P.vertices]
    low = min(vals)
    return tuple(v for v, x in zip(P.vertices, vals) if x == low)


def cone_of(fan: NormalFan, w: Sequence[int]) -> Cone:
    """The cone of the fan containing ``w`` in its relative interior.

    That is the cone of the face on which <., w> is minimised; ties are not
    broken, they select a lower-dimensional cone.
    """
    return fan.cone_for_face(face_of(fan.polytope, w))


def logarithmic_limit_directions(f: LaurentPolynomial) -> list[Cone]:
    """Cones of the normal fan of dimension 1..n-1: the weights w != 0 whose
    initial form ``in_w f`` is not a monomial."""
    fan = normal_fan(newton_polytope(f))
    return [c for c in fan.cones if 1 <= c.dim <= f.rank - 1]

