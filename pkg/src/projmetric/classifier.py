"""Decide from center scans whether a space is symmetric, and detect ellipses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bodies import ConvexBody
from .centers import (
    DEFAULT_DIRECTIONS,
    DEFAULT_FIT_TOL,
    CenterReport,
    construct_point_reflection,
    is_projective_center,
    reflection_defects,
)
from .errors import DegenerateInput, GridTooSmall
from .metrics import Hilbert, MetricSpace
from .projective import LineCoeffs

DEFAULT_GRID = 7
DEFAULT_CONIC_TOL = 1e-6
CONIC_SAMPLES = 32
CLEARANCE = 0.05

SYMMETRIC_MINKOWSKI = "symmetric-minkowski"
SYMMETRIC_HYPERBOLIC = "symmetric-hyperbolic"
NOT_SYMMETRIC = "not-symmetric"


@dataclass(frozen=True)
class ConicFit:
    coeffs: np.ndarray
    residual: float
    is_ellipse: bool


@dataclass(frozen=True)
class SymmetryVerdict:
    kind: str
    grid: int
    center_fraction: float
    conic_residual: Optional[float]
    failing_points: tuple = ()


def fit_conic(points, tol: float = DEFAULT_CONIC_TOL) -> ConicFit:
    """Least-squares conic ``ax² + bxy + cy² + dx + ey + f = 0``.

    Points are moved to zero mean and unit RMS radius first; ``coeffs`` refer
    to the original coordinates (unit norm), ``residual`` is the largest
    algebraic error in the normalized frame.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[1] != 2 or len(X) < 6:
        raise DegenerateInput("conic fit needs at least six 2D points")
    mean = X.mean(axis=0)
    spread = float(np.sqrt(np.mean(np.sum((X - mean) ** 2, axis=1))))
    if spread == 0.0:
        raise DegenerateInput("all points coincide")
    x, y = ((X - mean) / spread).T
    D = np.column_stack([x * x, x * y, y * y, x, y, np.ones_like(x)])
    _, s, vt = np.linalg.svd(D, full_matrices=False)
    if s[-2] <= 1e-10 * s[0]:
        raise DegenerateInput("points do not determine a unique conic")
    a, b, c, d, e, f = vt[-1]
    residual = float(np.max(np.abs(D @ vt[-1])))
    is_ellipse = residual <= tol and 4 * a * c - b * b > 0

    # back to original coordinates: u = (X - mean) / spread
    k = 1.0 / spread
    mx, my = mean
    A, B, C = a * k * k, b * k * k, c * k * k
    Dd = d * k - 2 * A * mx - B * my
    Ee = e * k - 2 * C * my - B * mx
    F = f - d * k * mx - e * k * my + A * mx * mx + B * mx * my + C * my * my
    coeffs = np.array([A, B, C, Dd, Ee, F])
    return ConicFit(coeffs / np.linalg.norm(coeffs), residual, bool(is_ellipse))


def scan_points(body: ConvexBody, grid: int) -> np.ndarray:
    """Square lattice of ``grid²`` interior points, row-major from the lower left.

    The lattice fills the largest centered square whose corners keep a
    boundary clearance of 5% of the body diameter; distance to the boundary
    is concave on a convex body, so every lattice point keeps it too. The
    center is a lattice point when ``grid`` is odd.
    """
    if grid < 2:
        raise GridTooSmall("grid must be at least 2")
    c = body.center
    clearance = CLEARANCE * body.diameter
    corners = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)

    def fits(h: float) -> bool:
        Q = c + h * corners
        return bool(np.all(body.contains_many(Q))) and min(_clearance(body, P) for P in Q) >= clearance

    lo, hi = 0.0, body.diameter
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if fits(mid):
            lo = mid
        else:
            hi = mid
    ticks = np.linspace(-lo, lo, grid)
    return np.array([c + np.array([x, y]) for y in ticks for x in ticks])


def _clearance(body: ConvexBody, P: np.ndarray) -> float:
    """Smallest distance to the boundary along 16 directions."""
    best = np.inf
    for theta in np.linspace(0.0, np.pi, 16, endpoint=False):
        t_neg, t_pos = body.chord_params(P, np.array([np.cos(theta), np.sin(theta)]))
        best = min(best, -t_neg, t_pos)
    return float(best)


def scan_centers(
    space: MetricSpace,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_FIT_TOL,
    n_directions: int = DEFAULT_DIRECTIONS,
    isometry_pairs: int = 0,
    seed: int = 0,
) -> list[CenterReport]:
    """Center reports over the scan lattice of the body (or indicatrix).

    Minkowski spaces report every lattice point as a center. With
    ``isometry_pairs > 0`` each center also gets the isometry defect of its
    reflection on that many random pairs (seeded, so output is reproducible).
    """
    points = scan_points(space.body, grid)
    rng = np.random.default_rng(seed)
    reports = []
    for P in points:
        if isinstance(space, Hilbert):
            report = is_projective_center(space.body, P, n_directions, tol)
        else:
            report = CenterReport(P, LineCoeffs.ideal(), 0.0, True, True)
        if isometry_pairs and report.is_projective_center:
            refl = construct_point_reflection(space, P, n_directions, tol)
            err = reflection_defects(space, refl, rng, n_pairs=isometry_pairs, n_chords=0)["isometry"]
            report = CenterReport(
                report.point, report.line, report.fit_residual,
                report.line_misses_body, True, err,
            )
        reports.append(report)
    return reports


def classify(
    space: MetricSpace,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_FIT_TOL,
    conic_tol: float = DEFAULT_CONIC_TOL,
) -> SymmetryVerdict:
    if not isinstance(space, Hilbert):
        return SymmetryVerdict(SYMMETRIC_MINKOWSKI, grid, 1.0, None)
    reports = scan_centers(space, grid, tol)
    failing = tuple(tuple(r.point.tolist()) for r in reports if not r.is_projective_center)
    fraction = (len(reports) - len(failing)) / len(reports) if reports else 0.0
    conic = fit_conic(space.body.boundary_points(CONIC_SAMPLES), conic_tol)
    symmetric = reports and not failing and conic.is_ellipse
    kind = SYMMETRIC_HYPERBOLIC if symmetric else NOT_SYMMETRIC
    return SymmetryVerdict(kind, grid, fraction, conic.residual, failing)
