"""Planar projective-metric geometry: Minkowski and Hilbert metrics, metric
point reflections, projective centers and symmetry classification."""

from .bodies import Chord, ConvexBody, Ellipse, PNormBall, Polygon, ProjectiveImage, load_body, unit_disk
from .centers import (
    CenterReport,
    PointReflection,
    Translation,
    conjugate_center,
    construct_point_reflection,
    is_projective_center,
    kronecker_orbit,
    pencil_orbit,
)
from .classifier import classify, fit_conic, scan_centers
from .metrics import Hilbert, Minkowski, distance, geodesic_point, metric_midpoint
from .projective import (
    HomogeneousPoint,
    LineCoeffs,
    Projectivity,
    affine_point_reflection,
    affine_ratio,
    cross_ratio,
    harmonic_conjugate,
    line_to_infinity,
    projectivity_from_correspondence,
)

__version__ = "0.1.0"
