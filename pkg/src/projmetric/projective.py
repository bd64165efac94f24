"""Planar projective arithmetic: ratios, cross ratios, harmonic conjugates
and projectivities of the real projective plane.

Affine points are plain ``numpy`` arrays of shape ``(2,)``. Points that may
lie on the ideal line are :class:`HomogeneousPoint` instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    DegenerateConfiguration,
    DegeneratePosition,
    DegenerateRatio,
    InvalidLine,
    NotCollinear,
    SingularSystem,
)

COLLINEAR_TOL = 1e-9
SINGULAR_TOL = 1e-12
IDEAL_TOL = 1e-12
_COINCIDE_TOL = 1e-14


def as_point(X) -> np.ndarray:
    p = np.asarray(X, dtype=float)
    if p.shape != (2,) or not np.all(np.isfinite(p)):
        raise DegenerateConfiguration(f"expected a finite 2D point, got {X!r}")
    return p


def _normalize_h(h: np.ndarray) -> np.ndarray:
    """Scale a homogeneous triple (or rows of triples) so the largest |entry| is +1."""
    h = np.asarray(h, dtype=float)
    if h.ndim == 1:
        k = int(np.argmax(np.abs(h)))
        return h / h[k]
    k = np.argmax(np.abs(h), axis=1)
    return h / h[np.arange(len(h)), k][:, None]


class HomogeneousPoint:
    """A point of the projective plane, ``(hx : hy : hw)``.

    Stored normalized so that the largest coordinate equals ``+1``; two
    instances compare equal when their triples are proportional.
    """

    __slots__ = ("_h",)

    def __init__(self, hx: float, hy: float, hw: float = 1.0):
        h = np.array([hx, hy, hw], dtype=float)
        if not np.all(np.isfinite(h)) or not np.any(h):
            raise DegenerateConfiguration(f"invalid homogeneous triple {h.tolist()}")
        self._h = _normalize_h(h)

    @classmethod
    def from_array(cls, h) -> "HomogeneousPoint":
        h = np.asarray(h, dtype=float)
        if h.shape == (2,):
            return cls(h[0], h[1], 1.0)
        if h.shape != (3,):
            raise DegenerateConfiguration(f"expected 2 or 3 coordinates, got {h.shape}")
        return cls(*h)

    @property
    def h(self) -> np.ndarray:
        return self._h.copy()

    @property
    def is_ideal(self) -> bool:
        return abs(self._h[2]) <= IDEAL_TOL

    def affine(self) -> np.ndarray:
        if self.is_ideal:
            raise DegenerateConfiguration("ideal point has no affine coordinates")
        return self._h[:2] / self._h[2]

    def direction(self) -> np.ndarray:
        """Unit vector pointing towards the point (meaningful for ideal points)."""
        v = self._h[:2]
        return v / np.linalg.norm(v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogeneousPoint):
            return NotImplemented
        return bool(np.linalg.norm(np.cross(self._h, other._h)) <= 1e-12)

    def __hash__(self):
        return hash(tuple(np.round(self._h, 12)))

    def __repr__(self) -> str:
        hx, hy, hw = self._h
        return f"HomogeneousPoint({hx:.12g}, {hy:.12g}, {hw:.12g})"


PointLike = Union[HomogeneousPoint, Sequence[float], np.ndarray]


def as_homogeneous(X: PointLike) -> HomogeneousPoint:
    if isinstance(X, HomogeneousPoint):
        return X
    return HomogeneousPoint.from_array(X)


@dataclass(frozen=True)
class LineCoeffs:
    """The line ``a x + b y + c = 0``; the ideal line is ``(0, 0, 1)``."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        v = np.array([self.a, self.b, self.c], dtype=float)
        if not np.all(np.isfinite(v)) or not np.any(v):
            raise InvalidLine(f"invalid line coefficients {v.tolist()}")

    @classmethod
    def ideal(cls) -> "LineCoeffs":
        return cls(0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, v) -> "LineCoeffs":
        a, b, c = np.asarray(v, dtype=float)
        return cls(float(a), float(b), float(c))

    @classmethod
    def through(cls, P: PointLike, Q: PointLike) -> "LineCoeffs":
        v = np.cross(as_homogeneous(P).h, as_homogeneous(Q).h)
        if np.linalg.norm(v) <= 1e-14:
            raise InvalidLine("points coincide")
        return cls.from_array(v / np.max(np.abs(v)))

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=float)

    @property
    def is_ideal(self) -> bool:
        v = self.as_array()
        return bool(np.hypot(v[0], v[1]) <= IDEAL_TOL * abs(v[2]))

    def evaluate(self, X) -> np.ndarray:
        """Signed value ``a x + b y + c`` at one point or an ``(N, 2)`` array."""
        X = np.asarray(X, dtype=float)
        return X @ np.array([self.a, self.b]) + self.c


class Projectivity:
    """A projective transformation given by an invertible 3x3 matrix modulo scale."""

    __slots__ = ("_m",)

    def __init__(self, m):
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3) or not np.all(np.isfinite(m)):
            raise SingularSystem("projectivity needs a finite 3x3 matrix")
        m = m / np.max(np.abs(m))
        if abs(np.linalg.det(m)) <= SINGULAR_TOL:
            raise SingularSystem("projectivity matrix is singular")
        self._m = m

    @classmethod
    def identity(cls) -> "Projectivity":
        return cls(np.eye(3))

    @classmethod
    def translation(cls, v) -> "Projectivity":
        m = np.eye(3)
        m[:2, 2] = np.asarray(v, dtype=float)
        return cls(m)

    @property
    def matrix(self) -> np.ndarray:
        return self._m.copy()

    def apply_h(self, H) -> np.ndarray:
        """Apply to homogeneous rows ``(N, 3)`` (or one triple); results normalized."""
        H = np.asarray(H, dtype=float)
        return _normalize_h(H @ self._m.T)

    def __call__(self, X):
        if isinstance(X, HomogeneousPoint):
            return HomogeneousPoint.from_array(self._m @ X.h)
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        pts = np.atleast_2d(X)
        H = np.hstack([pts, np.ones((len(pts), 1))]) @ self._m.T
        w = H[:, 2]
        if np.any(np.abs(w) <= IDEAL_TOL * np.max(np.abs(H), axis=1)):
            raise DegenerateConfiguration("point is mapped onto the ideal line")
        out = H[:, :2] / w[:, None]
        return out[0] if single else out

    def __matmul__(self, other: "Projectivity") -> "Projectivity":
        """Composition ``self ∘ other`` (apply ``other`` first)."""
        return Projectivity(self._m @ other._m)

    def inverse(self) -> "Projectivity":
        return Projectivity(np.linalg.inv(self._m))

    def distance_to(self, other: "Projectivity") -> float:
        """Max entry difference after aligning scale and sign (zero iff equal)."""
        a = self._m / np.linalg.norm(self._m)
        b = other._m / np.linalg.norm(other._m)
        if np.sum(a * b) < 0:
            b = -b
        return float(np.max(np.abs(a - b)))

    def __repr__(self) -> str:
        return f"Projectivity({np.array2string(self._m, precision=6)})"


def _check_collinear(points: Sequence[np.ndarray]) -> None:
    pts = np.asarray(points, dtype=float)
    spread = 0.0
    for P, Q in combinations(pts, 2):
        spread = max(spread, float(np.sum((P - Q) ** 2)))
    if spread == 0.0:
        return
    base = pts[0]
    for P, Q in combinations(pts[1:], 2):
        u, v = P - base, Q - base
        if abs(u[0] * v[1] - u[1] * v[0]) > COLLINEAR_TOL * spread:
            raise NotCollinear("points are not collinear")


def _coincide(P: np.ndarray, Q: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(P))), float(np.max(np.abs(Q))))
    return float(np.max(np.abs(P - Q))) <= _COINCIDE_TOL * scale


def affine_ratio(A, B, C) -> float:
    """Signed ``r`` with ``r (C - B) = C - A`` for collinear A, B, C."""
    A, B, C = as_point(A), as_point(B), as_point(C)
    _check_collinear([A, B, C])
    if _coincide(C, B):
        raise DegenerateRatio("affine ratio undefined for C = B")
    d = C - B
    k = int(np.argmax(np.abs(d)))
    return float((C - A)[k] / d[k])


def _line_coordinates(points: Sequence[HomogeneousPoint]) -> np.ndarray:
    """Rows ``(s, w)``: homogeneous coordinates on the common line.

    Affine points get ``(x_k, 1)`` with ``k`` the dominant axis of the line's
    direction; an ideal point gets ``(h_k, 0)``.
    """
    affine = [p.affine() for p in points if not p.is_ideal]
    ideal = [p for p in points if p.is_ideal]
    if len(ideal) > 1 or len(affine) < 2:
        raise DegenerateConfiguration("at most one ideal point is allowed")
    _check_collinear(affine)
    far = max(combinations(affine, 2), key=lambda pq: np.sum((pq[0] - pq[1]) ** 2))
    u = far[1] - far[0]
    if not np.any(u):
        raise DegenerateConfiguration("affine points coincide; the line is undetermined")
    u = u / np.linalg.norm(u)
    for p in ideal:
        v = p.direction()
        if abs(u[0] * v[1] - u[1] * v[0]) > COLLINEAR_TOL:
            raise NotCollinear("ideal point does not lie on the line")
    k = int(np.argmax(np.abs(u)))
    rows = []
    for p in points:
        if p.is_ideal:
            rows.append((p.h[k], 0.0))
        else:
            rows.append((p.affine()[k], 1.0))
    return np.array(rows)


def _det2(x: np.ndarray, y: np.ndarray) -> float:
    return float(x[0] * y[1] - y[0] * x[1])


def cross_ratio(A: PointLike, B: PointLike, C: PointLike, D: PointLike) -> float:
    """Affine cross ratio ``(A,B;C,D) = (A,B;C) / (A,B;D)``.

    One of the points may be ideal; ``(A,B;C,∞) = (A,B;C)`` by convention.
    """
    hp = [as_homogeneous(X) for X in (A, B, C, D)]
    a, b, c, d = _line_coordinates(hp)
    cb, da = _det2(c, b), _det2(d, a)
    scale = max(1.0, float(np.max(np.abs([a, b, c, d]))))
    if abs(cb) <= _COINCIDE_TOL * scale:
        raise DegenerateConfiguration("cross ratio undefined for C = B")
    if abs(da) <= _COINCIDE_TOL * scale:
        raise DegenerateConfiguration("cross ratio undefined for D = A")
    return _det2(c, a) * _det2(d, b) / (cb * da)


def harmonic_conjugate(A, B, O) -> HomogeneousPoint:
    """The point P with ``(A,B;O,P) = -1``; ideal when O is the midpoint of AB."""
    A, B, O = as_point(A), as_point(B), as_point(O)
    _check_collinear([A, B, O])
    if _coincide(A, B) or _coincide(O, A) or _coincide(O, B):
        raise DegenerateConfiguration("harmonic conjugate needs distinct A, B, O")
    u = B - A
    k = int(np.argmax(np.abs(u)))
    a, b = A[k] - O[k], B[k] - O[k]
    # P = O + (2ab / (a + b)) along the line, kept homogeneous
    s, w = 2.0 * a * b, a + b
    h = np.concatenate([w * O + (s / u[k]) * u, [w]])
    return HomogeneousPoint.from_array(h)


def affine_point_reflection(O) -> Projectivity:
    """Central symmetry ``X -> 2O - X``."""
    O = as_point(O)
    return Projectivity(np.array([[-1.0, 0.0, 2 * O[0]], [0.0, -1.0, 2 * O[1]], [0.0, 0.0, 1.0]]))


def _frame_matrix(points: Sequence[HomogeneousPoint]) -> np.ndarray:
    H = np.array([p.h / np.linalg.norm(p.h) for p in points])
    for i, j, k in combinations(range(4), 3):
        if abs(np.linalg.det(H[[i, j, k]])) <= 1e-10:
            raise DegeneratePosition("three of the four points are collinear")
    basis = H[:3].T
    try:
        lam = np.linalg.solve(basis, H[3])
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    return basis * lam


def projectivity_from_correspondence(
    src: Iterable[PointLike], dst: Iterable[PointLike]
) -> Projectivity:
    """The unique projectivity taking four points in general position to four others."""
    src = [as_homogeneous(p) for p in src]
    dst = [as_homogeneous(p) for p in dst]
    if len(src) != 4 or len(dst) != 4:
        raise DegeneratePosition("exactly four source and four target points are needed")
    Ms, Md = _frame_matrix(src), _frame_matrix(dst)
    try:
        return Projectivity(Md @ np.linalg.inv(Ms))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc


def line_to_infinity(line: LineCoeffs) -> Projectivity:
    """A projectivity sending ``line`` onto the ideal line (third row = line)."""
    if not isinstance(line, LineCoeffs):
        raise InvalidLine(f"expected LineCoeffs, got {type(line).__name__}")
    v = line.as_array()
    v = v / np.max(np.abs(v))
    k = int(np.argmax(np.abs(v)))
    if abs(v[2]) >= 0.5:
        k = 2
    rows = [np.eye(3)[i] for i in range(3) if i != k]
    return Projectivity(np.vstack(rows + [v]))
