"""Coamoebae of plane curves: a sampler for curves in (C*)^2 and the exact
two-triangle description of the coamoeba of a line ax + by + c = 0."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._parallel import ordered_map
from .laurent import LaurentPolynomial, evaluate
from .roots import solve_univariate_batch
from .torus import PointCloud, arg_map, circle_distance, log_map, torus_distance, wrap_angle

__all__ = [
    "LineT2",
    "PlaneGrid",
    "line2_membership",
    "line2_boundary_lines",
    "reduce_to_standard_line",
    "plane_curve_points",
    "crossing_parameters",
    "sample_plane_curve",
    "MEMBERSHIP_TOL",
]

MEMBERSHIP_TOL = 1e-12
DEGENERATE_TOL = 1e-12

Membership = Literal["interior", "vertex", "closure-boundary", "outside"]

# the real points of x + y + 1 = 0 land on these three points of U^2
STANDARD_VERTICES = np.array([[np.pi, 0.0], [np.pi, np.pi], [0.0, np.pi]])


@dataclass(frozen=True)
class LineT2:
    """The line ``a x + b y + c = 0`` in (C*)^2 with a, b, c nonzero."""

    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for name in ("a", "b", "c"):
            value = complex(getattr(self, name))
            if value == 0:
                raise ValueError(f"line coefficient {name} must be nonzero")
            object.__setattr__(self, name, value)

    @property
    def shift(self) -> np.ndarray:
        """Translation taking this line's coamoeba onto that of x + y + 1."""
        return np.array([np.angle(self.a / self.c), np.angle(self.b / self.c)])

    def polynomial(self) -> LaurentPolynomial:
        return LaurentPolynomial.from_dict(2, {(1, 0): self.a, (0, 1): self.b, (0, 0): self.c})


def reduce_to_standard_line(line: LineT2, p) -> np.ndarray:
    """Move ``p`` into the frame where the line reads x + y + 1 = 0.

    Substituting x = (c/a) x', y = (c/b) y' gives arg x' = arg x + arg(a/c),
    and likewise for y.
    """
    p = np.asarray(p, dtype=float)
    return wrap_angle(p + line.shift)


def _classify_standard(p: np.ndarray, tol: float) -> np.ndarray:
    alpha, beta = p[..., 0], p[..., 1]
    out = np.full(alpha.shape, "outside", dtype=object)
    vertex = np.zeros(alpha.shape, dtype=bool)
    for v in STANDARD_VERTICES:
        vertex |= torus_distance(p, v) <= tol
    on_line = (
        (circle_distance(alpha, np.pi) <= tol)
        | (circle_distance(beta, np.pi) <= tol)
        | (circle_distance(alpha - beta, np.pi) <= tol)
    )
    interior = np.abs(alpha - beta) > np.pi
    out[interior] = "interior"
    out[on_line] = "closure-boundary"
    out[vertex] = "vertex"
    return out


def line2_membership(line: LineT2, p, tol: float = MEMBERSHIP_TOL):
    """Classify a point of U^2 against the coamoeba of a line.

    Returns one of ``"vertex"`` (the three images of real points, which
    belong to the coamoeba), ``"interior"`` (the two open triangles),
    ``"closure-boundary"`` (on one of the three boundary lines but not a
    vertex) or ``"outside"``.  An ``(k, 2)`` array of points gives an array of
    labels.
    """
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 2:
        raise ValueError("line2_membership needs points of rank 2")
    labels = _classify_standard(reduce_to_standard_line(line, p), tol)
    return str(labels) if labels.ndim == 0 else labels


def line2_boundary_lines(line: LineT2) -> list[tuple[tuple[int, int], float]]:
    """The three codual lines bounding the closure, as ``(normal, offset)``
    with the set ``{theta : <normal, theta> = offset mod 2 pi}``."""
    sa, sb = line.shift
    return [
        ((0, 1), wrap_angle(np.pi - sb)),
        ((1, -1), wrap_angle(np.pi - sa + sb)),
        ((1, 0), wrap_angle(np.pi - sa)),
    ]


def _log_polar(center: complex, r_min: float, r_max: float, shells: int, angles: int) -> np.ndarray:
    radii = np.geomspace(r_min, r_max, shells)
    theta = -np.pi + 2 * np.pi * (np.arange(angles) + 0.5) / angles
    return center + (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


@dataclass(frozen=True)
class PlaneGrid:
    """Log-polar grid in the parametrising coordinate.

    Moduli are log-uniform on [r_min, r_max] (``shells`` values) and
    arguments sit at the midpoints of ``angles`` equal sectors, which keeps
    samples off the real axes.

    Near a parameter value zeta where the solved coordinate runs off to 0 or
    infinity the argument map is singular: a small disc around zeta covers a
    whole band of the coamoeba.  Uniform shells resolve that band badly, so
    each such zeta also gets ``refine_shells`` x ``refine_angles`` samples
    with moduli |x - zeta| log-uniform on |zeta| * [refine_min, refine_max].
    Set ``refine_shells=0`` to turn this off.
    """

    r_min: float = 1e-3
    r_max: float = 1e3
    shells: int = 48
    angles: int = 256
    solve_for: int = 1
    refine_shells: int = 24
    refine_angles: int = 125
    refine_min: float = 1e-5
    refine_max: float = 0.3

    def __post_init__(self):
        if not 0 < self.r_min <= self.r_max:
            raise ValueError("need 0 < r_min <= r_max")
        if self.shells < 1 or self.angles < 1:
            raise ValueError("grid needs at least one shell and one angle")
        if self.solve_for not in (0, 1):
            raise ValueError("solve_for must be 0 or 1")
        if self.refine_shells < 0 or (self.refine_shells and self.refine_angles < 1):
            raise ValueError("refinement needs a nonnegative shell count and at least one angle")
        if not 0 < self.refine_min <= self.refine_max < 1:
            raise ValueError("need 0 < refine_min <= refine_max < 1")

    def parameter_values(self, centers=()) -> np.ndarray:
        """Grid values; ``centers`` are the parameter values to refine around."""
        parts = [_log_polar(0j, self.r_min, self.r_max, self.shells, self.angles)]
        if self.refine_shells:
            for z in centers:
                a = abs(z)
                parts.append(_log_polar(complex(z), a * self.refine_min, a * self.refine_max,
                                        self.refine_shells, self.refine_angles))
        return np.concatenate(parts)

    def describe(self) -> str:
        text = (f"r=[{self.r_min:g},{self.r_max:g}] shells={self.shells} "
                f"angles={self.angles} solve_for={self.solve_for}")
        if self.refine_shells:
            text += (f" refine={self.refine_shells}x{self.refine_angles}"
                     f"@[{self.refine_min:g},{self.refine_max:g}]")
        return text


def _coefficient_rows(f: LaurentPolynomial, solve_for: int, params: np.ndarray):
    exps = f.exponent_matrix()
    coeffs = f.coefficient_array()
    other = 1 - solve_for
    sdeg = exps[:, solve_for]
    lo, hi = int(sdeg.min()), int(sdeg.max())
    rows = np.zeros((len(params), hi - lo + 1), dtype=complex)
    for e, c in zip(exps, coeffs):
        rows[:, hi - e[solve_for]] += c * params ** int(e[other])
    return rows


def crossing_parameters(f: LaurentPolynomial, solve_for: int) -> np.ndarray:
    """Nonzero parameter values where the solved coordinate tends to 0 or infinity.

    These are the roots of the coefficients of the lowest and highest powers
    of the solved variable, read as polynomials in the other variable.
    """
    exps = f.exponent_matrix()
    coeffs = f.coefficient_array()
    other = 1 - solve_for
    out = []
    for level in {int(exps[:, solve_for].min()), int(exps[:, solve_for].max())}:
        sel = exps[:, solve_for] == level
        e = exps[sel, other]
        lo, hi = int(e.min()), int(e.max())
        if hi == lo:
            continue
        poly = np.zeros(hi - lo + 1, dtype=complex)
        for k, c in zip(e, coeffs[sel]):
            poly[hi - k] += c
        roots, ok = solve_univariate_batch(poly[None, :])
        if ok[0]:
            out.extend(z for z in roots[0] if np.isfinite(z) and z != 0)
    return np.array(out, dtype=complex)


def plane_curve_points(f: LaurentPolynomial, grid: PlaneGrid | None = None, workers: int | None = None):
    """Points of V(f) in (C*)^2 over a log-polar grid.

    For each grid value of the parametrising coordinate the polynomial in the
    other coordinate is solved.  Returns ``(points, stats)`` where ``points``
    has shape ``(k, 2)`` and ``stats`` counts skipped samples.
    """
    grid = grid or PlaneGrid()
    if f.rank != 2:
        raise ValueError("plane curve sampling needs a polynomial in two variables")
    if f.is_zero():
        raise ValueError("cannot sample the zero polynomial")
    exps = f.exponent_matrix()
    s, o = grid.solve_for, 1 - grid.solve_for
    if exps[:, s].min() == exps[:, s].max():
        raise ValueError(f"degenerate: f does not depend on variable {s + 1}, nothing to solve for")
    if exps[:, o].min() == exps[:, o].max():
        raise ValueError(f"degenerate: f does not depend on variable {o + 1}")

    centers = crossing_parameters(f, s) if grid.refine_shells else ()
    params = grid.parameter_values(centers)
    params = params[params != 0]
    chunks = np.array_split(np.arange(len(params)), max(1, len(params) // 8192))

    def work(idx):
        rows = _coefficient_rows(f, s, params[idx])
        scale = np.abs(rows).max(axis=1)
        degenerate = np.abs(rows[:, 0]) <= DEGENERATE_TOL * scale
        keep = ~degenerate
        roots, ok = solve_univariate_batch(rows[keep])
        kept = idx[keep][ok]
        roots = roots[ok]
        d = roots.shape[1]
        sol = roots.ravel()
        par = np.repeat(params[kept], d)
        good = np.isfinite(sol) & (sol != 0)
        pts = np.empty((good.sum(), 2), dtype=complex)
        pts[:, o] = par[good]
        pts[:, s] = sol[good]
        return pts, int(degenerate.sum()), int((~ok).sum()), int((~good).sum())

    results = ordered_map(work, chunks, workers)
    points = np.concatenate([r[0] for r in results]) if results else np.empty((0, 2), complex)
    stats = {
        "skipped_degenerate": sum(r[1] for r in results),
        "solver_failures": sum(r[2] for r in results),
        "zero_solutions": sum(r[3] for r in results),
        "refinement_centers": len(centers),
    }
    return points, stats


def sample_plane_curve(f: LaurentPolynomial, grid: PlaneGrid | None = None,
                       workers: int | None = None) -> PointCloud:
    """Argument image of :func:`plane_curve_points`: a sampled coamoeba of V(f)."""
    grid = grid or PlaneGrid()
    points, stats = plane_curve_points(f, grid, workers)
    return PointCloud(
        2,
        arg_map(points),
        provenance=f"sample_plane_curve f={f} {grid.describe()}",
        meta=dict(stats, grid=grid, **_lift_diagnostics(f, points)),
    )


def _lift_diagnostics(f: LaurentPolynomial, points: np.ndarray) -> dict:
    """Largest relative residual |f(x)| / sum |c_m x^m| over the lifted points
    and the range of log|x| they cover."""
    if len(points) == 0:
        return {"max_relative_residual": 0.0}
    mags = np.exp(log_map(points))
    scale = sum(abs(t.coefficient) * np.prod(mags ** np.array(t.exponent), axis=1) for t in f.terms)
    logs = log_map(points)
    return {
        "max_relative_residual": float(np.max(np.abs(evaluate(f, points)) / scale)),
        "log_modulus_min": float(logs.min()),
        "log_modulus_max": float(logs.max()),
    }


def standard_line() -> LineT2:
    return LineT2(1, 1, 1)
