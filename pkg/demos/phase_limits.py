"""
Phase limit sets and toric degenerations
========================================

The phase limit set of a hypersurface collects the arguments of points that
run off to infinity.  It is the union of the coamoebae of the initial forms
in_w f over nonzero weights w; along an edge of the Newton polytope that
coamoeba is a finite family of codual hyperplanes.

We check this on x + y + 1 by watching the fibres t^-w V(f) approach the
coamoeba of in_w f as t -> 0, and look at a polynomial whose Newton polygon
has an edge of lattice length 2.
"""

import numpy as np

from coamoeba import degenerate, initial_coamoeba, initial_form, parse, phase_limit_summary

xy = ["x", "y"]

f = parse("x + y + 1", xy)
print(phase_limit_summary(f).to_text())

# Each fibre t^-w V(f) is sampled and compared, inside the window of moduli
# [0.5, 2], with the codual line predicted for in_w f.
for w in [(1, 0), (0, 1), (-1, -1)]:
    clouds = degenerate(f, w, [1e-1, 1e-2, 1e-3])
    (h,) = initial_coamoeba(f, w)
    trend = ", ".join(f"{c.meta['distance']:.1e}" for c in clouds)
    print(f"w={w}: in_w f = {initial_form(f, w)}, limit <{list(h.normal)}, theta> = {h.offsets[0]:.4f}, "
          f"distances {trend}")

# On an edge of lattice length 2 the restricted polynomial u^2 + u + 1 has
# two roots, so the edge contributes two parallel codual lines.
g = parse("x^2 + x*y + y^2 + x + y + 1", xy)
report = phase_limit_summary(g)
print()
print(report.to_text())
for c in degenerate(g, (-1, -1), [1e-1, 1e-2, 1e-3]):
    print(f"  t={c.meta['t']:g}: distance to the two lines {c.meta['distance']:.1e}")
print("offsets in units of pi:",
      [round(o / np.pi, 6) for h in report.hyperplanes() if h.normal == (1, -1) for o in h.offsets])
