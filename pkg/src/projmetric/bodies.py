"""Bounded convex open domains in the plane.

Every body answers membership, chord and boundary queries. Ellipses and
polygons use closed forms; p-norm balls locate their boundary by bisection;
projective images pull queries back through the inverse map.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .errors import InvalidBody, InvalidSpec, NotSymmetric, PointOutside
from .projective import HomogeneousPoint, Projectivity, as_point

BISECTION_STEPS = 60


@dataclass(frozen=True)
class Chord:
    """Boundary points C, D of the line ``anchor + t * direction`` (t_C < 0 < t_D)."""

    C: np.ndarray
    D: np.ndarray
    direction: np.ndarray
    anchor: np.ndarray
    t_C: float
    t_D: float

    def point(self, t: float) -> np.ndarray:
        return self.anchor + t * self.direction


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = float(np.hypot(v[0], v[1]))
    if v.shape != (2,) or not math.isfinite(n) or n == 0.0:
        raise ValueError(f"direction must be a non-zero 2D vector, got {v!r}")
    return v / n


class ConvexBody:
    """Common interface; subclasses provide ``contains`` and ``chord_params``."""

    kind: str = ""
    strictly_convex: bool = True
    center: np.ndarray

    def contains(self, X) -> bool:
        raise NotImplementedError

    def chord_params(self, P: np.ndarray, d: np.ndarray) -> tuple[float, float]:
        """Line parameters ``(t_neg, t_pos)`` where ``P + t d`` leaves the body."""
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        lo, hi = self.bounding_box()
        return float(np.max(hi - lo))

    def contains_many(self, X) -> np.ndarray:
        return np.array([self.contains(x) for x in np.atleast_2d(X)], dtype=bool)

    def chord_through(self, P, direction) -> Chord:
        P = as_point(P)
        if not self.contains(P):
            raise PointOutside(f"point {P.tolist()} is not inside the body")
        d = _unit(direction)
        t_C, t_D = self.chord_params(P, d)
        t_C, t_D = self._outside(P, d, t_C, -1.0), self._outside(P, d, t_D, 1.0)
        return Chord(P + t_C * d, P + t_D * d, d, P, float(t_C), float(t_D))

    def _outside(self, P, d, t: float, sign: float) -> float:
        # rounding can leave a computed boundary point a few ulps inside
        step = 2.0 * np.finfo(float).eps * max(1.0, abs(t), float(np.max(np.abs(P))))
        for _ in range(32):
            if not self.contains(P + t * d):
                return t
            t += sign * step
            step *= 2.0
        return t

    def boundary_points(self, count: int) -> np.ndarray:
        """``count`` boundary points at uniform angles around the center."""
        if count < 3:
            raise ValueError("boundary_points needs count >= 3")
        out = np.empty((count, 2))
        for k in range(count):
            theta = 2.0 * math.pi * k / count
            u = np.array([math.cos(theta), math.sin(theta)])
            out[k] = self.center + self.chord_params(self.center, u)[1] * u
        return out

    def _symmetry_samples(self) -> np.ndarray:
        return self.boundary_points(64)

    def is_centrally_symmetric(self, tol: float = 1e-9) -> bool:
        c = self.center
        scale = self.diameter
        for Y in self._symmetry_samples():
            v = c - Y
            r = float(np.hypot(*v))
            if r == 0.0:
                return False
            t = self.chord_params(c, v / r)[1]
            if abs(t - r) > tol * scale:
                return False
        return True

    def gauge(self, v) -> float:
        """Minkowski functional of ``body - center`` (symmetric bodies only)."""
        if not self.is_centrally_symmetric():
            raise NotSymmetric(f"{self.kind} body is not centrally symmetric")
        v = np.asarray(v, dtype=float)
        r = float(np.hypot(v[0], v[1]))
        if r == 0.0:
            return 0.0
        return r / self.chord_params(self.center, v / r)[1]


class Ellipse(ConvexBody):
    """``{X : (X - c)^T S (X - c) < 1}`` with S symmetric positive definite."""

    kind = "ellipse"

    def __init__(self, center=(0.0, 0.0), shape=((1.0, 0.0), (0.0, 1.0))):
        self.center = as_point(center)
        S = np.asarray(shape, dtype=float)
        if S.shape != (2, 2) or not np.all(np.isfinite(S)):
            raise InvalidBody("ellipse shape must be a finite 2x2 matrix")
        if not np.allclose(S, S.T, rtol=1e-12, atol=1e-14):
            raise InvalidBody("ellipse shape matrix must be symmetric")
        if np.min(np.linalg.eigvalsh(S)) <= 0:
            raise InvalidBody("ellipse shape matrix must be positive definite")
        self.shape = S

    @classmethod
    def from_axes(cls, a: float, b: float, center=(0.0, 0.0), angle: float = 0.0) -> "Ellipse":
        c, s = math.cos(angle), math.sin(angle)
        R = np.array([[c, -s], [s, c]])
        return cls(center, R @ np.diag([1.0 / a**2, 1.0 / b**2]) @ R.T)

    def contains(self, X) -> bool:
        p = as_point(X) - self.center
        return bool(p @ self.shape @ p < 1.0)

    def contains_many(self, X) -> np.ndarray:
        p = np.atleast_2d(np.asarray(X, dtype=float)) - self.center
        return np.einsum("ni,ij,nj->n", p, self.shape, p) < 1.0

    def chord_params(self, P, d):
        p = np.asarray(P, dtype=float) - self.center
        Sd = self.shape @ d
        alpha = float(d @ Sd)
        beta = float(p @ Sd)
        gamma = float(p @ self.shape @ p) - 1.0
        disc = math.sqrt(max(beta * beta - alpha * gamma, 0.0))
        q = -(beta + math.copysign(disc, beta))
        if q == 0.0:
            return -math.sqrt(-gamma / alpha), math.sqrt(-gamma / alpha)
        r1, r2 = q / alpha, gamma / q
        return min(r1, r2), max(r1, r2)

    def gauge(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return math.sqrt(max(float(v @ self.shape @ v), 0.0))

    def is_centrally_symmetric(self, tol: float = 1e-9) -> bool:
        return True

    def bounding_box(self):
        half = np.sqrt(np.diag(np.linalg.inv(self.shape)))
        return self.center - half, self.center + half

    def to_dict(self):
        return {"kind": "ellipse", "center": self.center.tolist(), "shape": self.shape.tolist()}


class PNormBall(ConvexBody):
    """``{X : || L^{-1} (X - c) ||_p < 1}`` for ``p > 1``."""

    kind = "pnorm"

    def __init__(self, p: float, scale=((1.0, 0.0), (0.0, 1.0)), center=(0.0, 0.0)):
        p = float(p)
        if not math.isfinite(p) or p <= 1.0:
            raise InvalidBody("p-norm ball needs p > 1")
        L = np.asarray(scale, dtype=float)
        if L.shape != (2, 2) or not np.all(np.isfinite(L)) or abs(np.linalg.det(L)) <= 1e-12:
            raise InvalidBody("p-norm scale must be an invertible 2x2 matrix")
        self.p = p
        self.scale = L
        self.center = as_point(center)
        self._Linv = np.linalg.inv(L)

    def _u(self, X) -> np.ndarray:
        return self._Linv @ (np.asarray(X, dtype=float) - self.center)

    def contains(self, X) -> bool:
        u = self._u(as_point(X))
        return abs(u[0]) ** self.p + abs(u[1]) ** self.p < 1.0

    def contains_many(self, X) -> np.ndarray:
        U = (np.atleast_2d(np.asarray(X, dtype=float)) - self.center) @ self._Linv.T
        return np.sum(np.abs(U) ** self.p, axis=1) < 1.0

    def _exit(self, u0: np.ndarray, w: np.ndarray) -> float:
        p = self.p
        ux, uy = float(u0[0]), float(u0[1])
        wx, wy = float(w[0]), float(w[1])
        lo = 0.0
        hi = (1.0 + max(abs(ux), abs(uy))) / max(abs(wx), abs(wy))
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if abs(ux + mid * wx) ** p + abs(uy + mid * wy) ** p < 1.0:
                lo = mid
            else:
                hi = mid
        return hi

    def chord_params(self, P, d):
        u0 = self._u(P)
        w = self._Linv @ d
        return -self._exit(u0, -w), self._exit(u0, w)

    def gauge(self, v) -> float:
        u = self._Linv @ np.asarray(v, dtype=float)
        return float(np.sum(np.abs(u) ** self.p) ** (1.0 / self.p))

    def is_centrally_symmetric(self, tol: float = 1e-9) -> bool:
        return True

    def bounding_box(self):
        q = self.p / (self.p - 1.0)
        half = np.sum(np.abs(self.scale) ** q, axis=1) ** (1.0 / q)
        return self.center - half, self.center + half

    def to_dict(self):
        return {
            "kind": "pnorm",
            "p": self.p,
            "center": self.center.tolist(),
            "scale": self.scale.tolist(),
        }


class Polygon(ConvexBody):
    """Open convex polygon with counterclockwise vertices.

    Not strictly convex: admitted for center scans and as a negative test.
    """

    kind = "polygon"
    strictly_convex = False

    def __init__(self, vertices):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3 or not np.all(np.isfinite(V)):
            raise InvalidBody("polygon needs at least three finite 2D vertices")
        E = np.roll(V, -1, axis=0) - V
        turn = E[:, 0] * np.roll(E, -1, axis=0)[:, 1] - E[:, 1] * np.roll(E, -1, axis=0)[:, 0]
        scale = float(np.max(np.sum(E**2, axis=1)))
        if np.any(turn <= 1e-12 * scale):
            raise InvalidBody("polygon vertices must be strictly convex and counterclockwise")
        if abs(float(np.sum(np.arctan2(turn, np.sum(E * np.roll(E, -1, axis=0), axis=1)))) - 2 * math.pi) > 1e-6:
            raise InvalidBody("polygon boundary winds more than once")
        self.vertices = V
        self._normals = np.column_stack([E[:, 1], -E[:, 0]])
        self._offsets = np.einsum("ij,ij->i", self._normals, V)
        cross = V[:, 0] * np.roll(V, -1, axis=0)[:, 1] - np.roll(V, -1, axis=0)[:, 0] * V[:, 1]
        area = 0.5 * float(np.sum(cross))
        self.center = np.sum((V + np.roll(V, -1, axis=0)) * cross[:, None], axis=0) / (6.0 * area)

    def contains(self, X) -> bool:
        X = as_point(X)
        return bool(np.all(self._normals @ X < self._offsets))

    def contains_many(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.all(X @ self._normals.T < self._offsets, axis=1)

    def _exit(self, P, d) -> float:
        nd = self._normals @ d
        slack = self._offsets - self._normals @ P
        mask = nd > 0
        return float(np.min(slack[mask] / nd[mask]))

    def chord_params(self, P, d):
        P = np.asarray(P, dtype=float)
        return -self._exit(P, -d), self._exit(P, d)

    def _symmetry_samples(self):
        return np.vstack([self.vertices, self.boundary_points(64)])

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def to_dict(self):
        return {"kind": "polygon", "vertices": self.vertices.tolist()}


class ProjectiveImage(ConvexBody):
    """Image of a base body under a projectivity, kept in the affine chart.

    The construction samples the base boundary and rejects maps that send
    any part of the closure to (or across) the ideal line.
    """

    kind = "projective_image"

    def __init__(self, base: ConvexBody, map: Projectivity):
        if not isinstance(map, Projectivity):
            map = Projectivity(map)
        self.base = base
        self.map = map
        self._inv = map.inverse()
        samples = np.vstack([base.boundary_points(720), base.center])
        H = np.hstack([samples, np.ones((len(samples), 1))]) @ map.matrix.T
        w = H[:, 2] / np.max(np.abs(H), axis=1)
        if not (np.all(w > 1e-9) or np.all(w < -1e-9)):
            raise InvalidBody("projective image of the body is unbounded")
        self.strictly_convex = base.strictly_convex
        self.center = map(base.center)
        image = H[:-1, :2] / H[:-1, 2:3]
        lo, hi = image.min(axis=0), image.max(axis=0)
        pad = 1e-3 * float(np.max(hi - lo))
        self._bbox = (lo - pad, hi + pad)

    def _pull(self, X) -> HomogeneousPoint:
        return self._inv(HomogeneousPoint.from_array(X))

    def contains(self, X) -> bool:
        Y = self._pull(as_point(X))
        return (not Y.is_ideal) and self.base.contains(Y.affine())

    def chord_params(self, P, d):
        P = np.asarray(P, dtype=float)
        P0 = self._pull(P).affine()
        Q0 = self._pull(P + d)
        d0 = Q0.direction() if Q0.is_ideal else Q0.affine() - P0
        d0 = d0 / np.hypot(d0[0], d0[1])
        s_neg, s_pos = self.base.chord_params(P0, d0)
        ts = []
        for s in (s_neg, s_pos):
            X = self.map(P0 + s * d0)
            ts.append(float((X - P) @ d))
        return min(ts), max(ts)

    def bounding_box(self):
        return self._bbox[0].copy(), self._bbox[1].copy()

    def to_dict(self):
        return {
            "kind": "projective_image",
            "base": self.base.to_dict(),
            "map": self.map.matrix.tolist(),
        }


def unit_disk() -> Ellipse:
    return Ellipse()


_SCHEMA = None


def body_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        text = resources.files("projmetric").joinpath("schema/body.schema.json").read_text("utf-8")
        _SCHEMA = json.loads(text)
    return _SCHEMA


def _build(spec: dict) -> ConvexBody:
    kind = spec["kind"]
    if kind == "ellipse":
        center = spec.get("center", [0.0, 0.0])
        if "shape" in spec:
            return Ellipse(center, spec["shape"])
        a, b = spec.get("axes", [1.0, 1.0])
        return Ellipse.from_axes(a, b, center, spec.get("angle", 0.0))
    if kind == "pnorm":
        scale = spec.get("scale")
        if scale is None:
            r = spec.get("radius", 1.0)
            scale = [[r, 0.0], [0.0, r]]
        return PNormBall(spec["p"], scale, spec.get("center", [0.0, 0.0]))
    if kind == "polygon":
        return Polygon(spec["vertices"])
    return ProjectiveImage(_build(spec["base"]), Projectivity(spec["map"]))


def body_from_dict(spec: dict) -> ConvexBody:
    """Validate a body specification against the JSON schema and build it."""
    try:
        jsonschema.validate(spec, body_schema())
    except jsonschema.ValidationError as exc:
        raise InvalidSpec(f"invalid body spec: {exc.message}") from exc
    try:
        return _build(spec)
    except (InvalidBody, ValueError) as exc:
        raise InvalidSpec(f"invalid body spec: {exc}") from exc


def load_body(path) -> ConvexBody:
    """Read a UTF-8 JSON body specification. ``OSError`` propagates unchanged."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"{path}: not valid JSON ({exc})") from exc
    return body_from_dict(spec)
