"""The argument and logarithm maps, the real torus U^n and point clouds on it.

Angles are always reported by their representative in (-pi, pi], so that
pi and -pi name the same point.  Distances on U^n are the l-infinity
geodesic distance: the largest per-coordinate circle distance.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

TWO_PI = 2.0 * np.pi

__all__ = [
    "wrap_angle",
    "circle_distance",
    "arg_map",
    "log_map",
    "torus_distance",
    "PointCloud",
    "nearest_distance",
    "directed_hausdorff",
    "write_csv",
    "read_csv",
    "write_ply",
]


def wrap_angle(theta):
    """Representative of ``theta`` modulo 2*pi in (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    out = np.pi - np.mod(np.pi - theta, TWO_PI)
    return float(out) if out.ndim == 0 else out


def circle_distance(a, b=0.0):
    """Geodesic distance on the circle R / 2*pi*Z, in [0, pi]."""
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), TWO_PI)
    out = np.minimum(d, TWO_PI - d)
    return float(out) if out.ndim == 0 else out


def _as_torus_element(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if np.any(x == 0):
        raise ValueError("torus elements have nonzero coordinates")
    return x


def arg_map(x) -> np.ndarray:
    """Coordinatewise argument of a point (or rows of points) of (C*)^n."""
    return wrap_angle(np.angle(_as_torus_element(x)))


def log_map(x) -> np.ndarray:
    """Coordinatewise ``log|x_i|``."""
    return np.log(np.abs(_as_torus_element(x)))


def torus_distance(p, q) -> float | np.ndarray:
    """l-infinity geodesic distance on U^n; broadcasts over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape[-1:] != q.shape[-1:]:
        raise ValueError("torus points have different ranks")
    out = circle_distance(p, q)
    out = np.max(np.asarray(out), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PointCloud:
    """Sampled points of U^n together with where they came from.

    ``meta`` holds sampler bookkeeping (skip counters, piece boundaries).
    """

    rank: int
    points: np.ndarray
    provenance: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.rank)
        object.__setattr__(self, "points", wrap_angle(pts))

    def __len__(self):
        return len(self.points)

    def piece(self, name: str) -> np.ndarray:
        start, stop = self.meta["pieces"][name]
        return self.points[start:stop]


def _periodic_tree(points: np.ndarray) -> cKDTree:
    shifted = np.mod(np.asarray(points, dtype=float) + np.pi, TWO_PI)
    # cKDTree requires data strictly inside [0, boxsize)
    shifted[shifted >= TWO_PI] = 0.0
    return cKDTree(shifted, boxsize=TWO_PI)


def nearest_distance(queries, cloud, tree: cKDTree | None = None) -> np.ndarray:
    """For each query point the torus distance to the nearest cloud point."""
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    if tree is None:
        tree = _periodic_tree(cloud)
    q = np.mod(queries + np.pi, TWO_PI)
    q[q >= TWO_PI] = 0.0
    dist, _ = tree.query(q, k=1, p=np.inf)
    return dist


def directed_hausdorff(source, target) -> float:
    """One-sided Hausdorff distance sup_{s in source} d(s, target) on U^n."""
    source = np.asarray(source, dtype=float)
    if len(source) == 0:
        return 0.0
    return float(nearest_distance(source, target).max())


def write_csv(cloud: PointCloud, path, degrees: bool = False) -> None:
    """Header ``theta_1,...,theta_n``; one row per point, 17 significant digits."""
    pts = np.degrees(cloud.points) if degrees else cloud.points
    header = ",".join(f"theta_{i + 1}" for i in range(cloud.rank))
    with _open_text(path) as fh:
        fh.write(header + "\n")
        for row in pts:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_csv(path) -> PointCloud:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    rank = len(header)
    return PointCloud(rank, np.array(rows).reshape(-1, rank), provenance=f"csv:{os.fspath(path)}")


def write_ply(cloud: PointCloud, path, degrees: bool = False) -> None:
    """ASCII PLY with vertices only; rank-2 clouds get z = 0."""
    pts = np.degrees(cloud.points) if degrees else cloud.points
    if cloud.rank > 3:
        raise ValueError("PLY export supports rank at most 3")
    xyz = np.zeros((len(pts), 3))
    xyz[:, : cloud.rank] = pts
    with _open_text(path) as fh:
        fh.write("ply\nformat ascii 1.0\n")
        if cloud.provenance:
            fh.write(f"comment {cloud.provenance}\n")
        fh.write(f"element vertex {len(xyz)}\n")
        fh.write("property double x\nproperty double y\nproperty double z\nend_header\n")
        for row in xyz:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


class _open_text:
    # "-" means stdout, anything else a file path
    def __init__(self, path):
        self.path = path

    def __enter__(self):
        if self.path == "-" or self.path is None:
            import sys

            self.fh = sys.stdout
            self.close = False
        elif isinstance(self.path, io.TextIOBase):
            self.fh = self.path
            self.close = False
        else:
            self.fh = open(Path(self.path), "w", newline="")
            self.close = True
        return self.fh

    def __exit__(self, *exc):
        if self.close:
            self.fh.close()
        return False
