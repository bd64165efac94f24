"""Minkowski and Hilbert metrics with unit-speed geodesics and midpoints."""

from __future__ import annotations

import math

import numpy as np

from .bodies import Chord, ConvexBody
from .errors import NearBoundary, NotSymmetric, ParameterOutOfRange, PointOutside
from .projective import as_point

NEAR_BOUNDARY = 1e-9


class MetricSpace:
    kind: str = ""
    body: ConvexBody

    def admissible(self, X) -> bool:
        raise NotImplementedError

    def distance(self, A, B) -> float:
        raise NotImplementedError

    def geodesic_point(self, A, B, s: float) -> np.ndarray:
        raise NotImplementedError

    def midpoint(self, A, B) -> np.ndarray:
        raise NotImplementedError


class Minkowski(MetricSpace):
    """The plane normed by the gauge of a centrally symmetric indicatrix."""

    kind = "minkowski"

    def __init__(self, indicatrix: ConvexBody):
        if not indicatrix.is_centrally_symmetric():
            raise NotSymmetric("Minkowski indicatrix must be centrally symmetric")
        self.body = indicatrix

    def admissible(self, X) -> bool:
        return True

    def distance(self, A, B) -> float:
        A, B = as_point(A), as_point(B)
        return self.body.gauge(B - A)

    def geodesic_point(self, A, B, s: float) -> np.ndarray:
        A, B = as_point(A), as_point(B)
        if not math.isfinite(s):
            raise ParameterOutOfRange("geodesic parameter must be finite")
        v = B - A
        g = self.body.gauge(v)
        if g == 0.0:
            raise ValueError("geodesic needs A != B")
        return A + (s / g) * v

    def midpoint(self, A, B) -> np.ndarray:
        A, B = as_point(A), as_point(B)
        return 0.5 * (A + B)


class Hilbert(MetricSpace):
    """Hilbert metric ``½|ln (A,B;C,D)|`` on the interior of a convex body."""

    kind = "hilbert"

    def __init__(self, body: ConvexBody):
        self.body = body

    def admissible(self, X) -> bool:
        return self.body.contains(X)

    def _chord(self, A, B) -> tuple[Chord, float]:
        A, B = as_point(A), as_point(B)
        for X in (A, B):
            if not self.body.contains(X):
                raise PointOutside(f"point {X.tolist()} is not inside the body")
        v = B - A
        s = float(np.hypot(v[0], v[1]))
        if s == 0.0:
            return None, 0.0
        chord = self.body.chord_through(A, v / s)
        if min(-chord.t_C, chord.t_D, chord.t_D - s, s - chord.t_C) < NEAR_BOUNDARY:
            raise NearBoundary("point within 1e-9 of the boundary")
        return chord, s

    def distance(self, A, B) -> float:
        chord, s = self._chord(A, B)
        if chord is None:
            return 0.0
        # A at t = 0, B at t = s, C at t_C < 0, D at t_D > s
        return 0.5 * (math.log1p(s / -chord.t_C) - math.log1p(-s / chord.t_D))

    def geodesic_point(self, A, B, s: float) -> np.ndarray:
        if not math.isfinite(s):
            raise ParameterOutOfRange("geodesic parameter must be finite")
        chord, _ = self._chord(A, B)
        if chord is None:
            raise ValueError("geodesic needs A != B")
        near, far = -chord.t_C, chord.t_D
        if s < 0:
            near, far = far, near
        q = math.exp(-2.0 * abs(s))
        t = near * far * -math.expm1(-2.0 * abs(s)) / (far * q + near)
        return chord.point(t if s >= 0 else -t)

    def midpoint(self, A, B) -> np.ndarray:
        d = self.distance(A, B)
        if d == 0.0:
            return as_point(A)
        return self.geodesic_point(A, B, 0.5 * d)


def distance(space: MetricSpace, A, B) -> float:
    return space.distance(A, B)


def geodesic_point(space: MetricSpace, A, B, s: float) -> np.ndarray:
    """Point at signed distance ``s`` from A on the geodesic towards B."""
    return space.geodesic_point(A, B, s)


def metric_midpoint(space: MetricSpace, A, B) -> np.ndarray:
    return space.midpoint(A, B)


def sample_points(space: MetricSpace, n: int, rng: np.random.Generator, shrink: float = 0.9) -> np.ndarray:
    """``n`` random admissible points.

    Hilbert: uniform in the body shrunk by ``shrink`` about its center, which
    keeps samples clear of the boundary. Minkowski: uniform in the box
    ``[-2, 2]^2`` scaled to the indicatrix.
    """
    body = space.body
    lo, hi = body.bounding_box()
    c = body.center
    if isinstance(space, Minkowski):
        return c + rng.uniform(-1.0, 1.0, size=(n, 2)) * (hi - lo)
    out = []
    while len(out) < n:
        X = rng.uniform(lo, hi, size=(max(16, 2 * (n - len(out))), 2))
        X = X[body.contains_many(X)]
        out.extend(c + shrink * (X - c))
    return np.array(out[:n])
