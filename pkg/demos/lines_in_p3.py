"""
Coamoebae of lines in P^3
=========================

A line in P^3 meeting the torus is determined, up to a phase shift, by the
four roots of its coordinate forms on P^1.  Two lines tell the story:

* the real line with roots (inf, -1/2, 0, 3/2), whose roots lie on a circle;
* the symmetric line with roots (inf, 1, w, w^2), w a primitive cube root
  of unity, whose roots do not.

Run with an output directory to also get CSV point clouds:

    python3 demos/lines_in_p3.py out/
"""

import sys
from pathlib import Path

import numpy as np

from coamoeba import (
    INF,
    classify,
    coamoeba_segments,
    contour_image,
    differential_rank,
    from_roots,
    is_cocircular,
    lines_intersect,
    phase_limit_lines,
    quadrilateral,
    quadrilateral_violations,
    sample_membrane,
)
from coamoeba.lines3d import limit_circle_image
from coamoeba.torus import directed_hausdorff, nearest_distance, write_csv

out = Path(sys.argv[1]) if len(sys.argv) > 1 else None
w = np.exp(2j * np.pi / 3)
real = from_roots([INF, -0.5, 0, 1.5])
sym = from_roots([INF, 1, w, w ** 2])

for name, line in [("real", real), ("symmetric", sym)]:
    print(f"{name} line: {classify(line)}, cocircular roots: {is_cocircular(line.roots)}")

# Near each root the coamoeba runs off along a coordinate line h_i of the
# torus.  The limit lines meet exactly when the roots are cocircular.
for name, line in [("real", real), ("symmetric", sym)]:
    h = phase_limit_lines(line)
    print(f"{name}: intersecting pairs {lines_intersect(h)}")

# Small circles around a root map closer and closer to its limit line.
h = phase_limit_lines(sym)
for eps in (1e-1, 1e-2, 1e-3):
    d = max(h[i].distance(limit_circle_image(sym, i, eps)).max() for i in range(4))
    print(f"  epsilon={eps:g}: farthest circle point from its limit line {d:.2e}")

# The symmetric coamoeba contains 12 segments, three along each direction.
segs = coamoeba_segments(sym)
for s in segs:
    print(f"  h_{s.direction_index}: from {np.round(s.fixed_angles, 3)} over {np.round(s.interval, 3)}")

cloud = sample_membrane(sym, samples=200_000)
pts = np.concatenate([s.points(50) for s in segs])
print(f"segments sit within {nearest_distance(pts, cloud.points).max():.4f} of a "
      f"{len(cloud)}-point sample")

# The map from the line to the torus is an immersion away from real points.
print("differential rank at 0.3+0.2i:", differential_rank(sym, 0.3 + 0.2j))

# For the real line the upper half plane maps into the convex hull of a
# quadrilateral, and the whole coamoeba is symmetric in the origin.
print("quadrilateral vertices:\n", np.round(quadrilateral(real), 4))
upper = sample_membrane(real, samples=50_000, half_plane="upper")
print("largest hull violation:", quadrilateral_violations(real, upper.points).max())
full = sample_membrane(real, samples=50_000)
print(f"symmetry defect: {directed_hausdorff(-full.points, full.points):.4f}")

# The contour along the real axis with small detours over the roots traces
# the quadrilateral's edges; the straight pieces land on its vertices.
contour = contour_image(real, epsilon=1e-3)
for k in range(4):
    print(f"  segment_{k} maps to {np.round(contour.piece(f'segment_{k}')[0], 6)}")

if out:
    out.mkdir(parents=True, exist_ok=True)
    write_csv(cloud, out / "symmetric_line.csv")
    write_csv(upper, out / "real_line_upper.csv")
    write_csv(contour, out / "real_line_contour.csv")
    print(f"wrote clouds to {out}")
