"""
The coamoeba of a line in the plane
===================================

The line x + y + 1 = 0 in (C*)^2 has a coamoeba made of two open triangles
in the square [-pi, pi]^2 together with three vertices.  We sample it,
classify the samples, and look at the three boundary lines.

Run with an output directory to also get CSV point clouds:

    python3 demos/plane_line.py out/
"""

import sys
from pathlib import Path

import numpy as np

from coamoeba import LineT2, PlaneGrid, line2_membership, parse, sample_plane_curve
from coamoeba.plane import line2_boundary_lines
from coamoeba.torus import nearest_distance, write_csv

out = Path(sys.argv[1]) if len(sys.argv) > 1 else None

# Sample the curve: a log-polar grid in x, solve for y, take arguments.
f = parse("x + y + 1", ["x", "y"])
cloud = sample_plane_curve(f, PlaneGrid(shells=120, angles=180))
print(f"{len(cloud)} points sampled from V({f})")

# Every sample lands in the closed two-triangle region |alpha - beta| >= pi.
line = LineT2(1, 1, 1)
labels, counts = np.unique(line2_membership(line, cloud.points), return_counts=True)
print("labels:", dict(zip(labels.tolist(), counts.tolist())))

# Real x gives the three vertices (pi, 0), (pi, pi), (0, pi).
for p in [(np.pi, 0), (np.pi, np.pi), (0, np.pi), (0, 0), (3 * np.pi / 4, -np.pi / 2)]:
    d = nearest_distance([p], cloud.points)[0]
    print(f"  {np.round(p, 3)} -> {line2_membership(line, p)}, nearest sample {d:.3f}")

# The closure is bounded by three lines; they are also the phase limit set.
for normal, offset in line2_boundary_lines(line):
    print(f"  boundary line <{normal}, theta> = {offset:.6f}")

# A general line ax + by + c is the standard one translated by
# (arg(a/c), arg(b/c)).
general = LineT2(2, -1j, 1 + 1j)
moved = sample_plane_curve(general.polynomial(), PlaneGrid(shells=60, angles=90))
print(f"shift of {general}: {np.round(general.shift, 4)}")
print("labels:", set(line2_membership(general, moved.points, tol=1e-9)))

if out:
    out.mkdir(parents=True, exist_ok=True)
    write_csv(cloud, out / "line.csv")
    write_csv(moved, out / "general_line.csv")
    print(f"wrote {out / 'line.csv'} and {out / 'general_line.csv'}")
