"""Coamoebae of algebraic varieties: sampling, exact descriptions of lines,
Newton polytopes and normal fans, and phase limit sets."""

from .errors import CoamoebaError, ParseError, RootFindingError, UnknownVariableError, UnsupportedRankError
from .laurent import (
    LaurentPolynomial,
    LaurentTerm,
    deform,
    evaluate,
    initial_form,
    parse,
    scale_torus,
    to_string,
    weight_value,
)
from .lines3d import (
    INF,
    CoamoebaSegment,
    LineInP3,
    NearCocircularWarning,
    PhaseLimitLine,
    arc_image,
    classify,
    coamoeba_segments,
    contour_image,
    differential_rank,
    from_linear_forms,
    from_roots,
    is_cocircular,
    lines_intersect,
    phase_limit_lines,
    quadrilateral,
    quadrilateral_violations,
    real_normalize,
    sample_membrane,
)
from .phase_limit import (
    CodualHyperplane,
    PhaseLimitReport,
    binomial_coamoeba,
    degenerate,
    distance_to_hyperplanes,
    edge_hyperplanes,
    hypersurface_phase_limit,
    initial_coamoeba,
    phase_limit_summary,
)
from .plane import LineT2, PlaneGrid, line2_boundary_lines, line2_membership, sample_plane_curve
from .polytope import Cone, NewtonPolytope, NormalFan, cone_of, face_of, logarithmic_limit_directions, newton_polytope, normal_fan
from .roots import solve_univariate
from .torus import PointCloud, arg_map, circle_distance, log_map, torus_distance, wrap_angle

__version__ = "0.1.0"
