"""Projective centers, metric point reflections, translations and center orbits.

A point O of a bounded convex domain is a projective center when the locus
O* of harmonic conjugates of O across the chords through O is a straight
line missing the domain. Sending that line to infinity makes O the affine
center of the image, and conjugating the central symmetry back yields the
metric point reflection of the Hilbert geometry at O.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .bodies import ConvexBody
from .errors import NotACenter, NotAProjectiveCenter, PointOutside
from .metrics import Hilbert, MetricSpace, Minkowski, sample_points
from .projective import (
    IDEAL_TOL,
    HomogeneousPoint,
    LineCoeffs,
    Projectivity,
    _check_collinear,
    affine_point_reflection,
    as_point,
    harmonic_conjugate,
    line_to_infinity,
)

DEFAULT_DIRECTIONS = 64
DEFAULT_FIT_TOL = 1e-6
LINE_SAMPLES = 1024
DEFAULT_BUDGET = 20_000
DEDUP_RESOLUTION = 1e-6


@dataclass(frozen=True)
class OStarSample:
    direction: np.ndarray
    conjugate: HomogeneousPoint


@dataclass(frozen=True)
class CenterReport:
    point: np.ndarray
    line: Optional[LineCoeffs]
    fit_residual: float
    line_misses_body: bool
    is_projective_center: bool
    reflection_isometry_error: Optional[float] = None


@dataclass(frozen=True)
class PointReflection:
    center: np.ndarray
    map: Projectivity

    def __call__(self, X):
        return self.map(X)


@dataclass(frozen=True)
class Translation:
    """``first ∘ second``: reflect in ``second.center``, then in ``first.center``."""

    first: PointReflection
    second: PointReflection

    @property
    def map(self) -> Projectivity:
        return self.first.map @ self.second.map

    def __call__(self, X):
        return self.first(self.second(X))


def ostar_locus(body: ConvexBody, O, n_directions: int = DEFAULT_DIRECTIONS) -> list[OStarSample]:
    """Harmonic conjugates of O across ``n_directions`` chords spread over [0, π)."""
    O = as_point(O)
    if n_directions < 8:
        raise ValueError("ostar_locus needs at least 8 directions")
    if not body.contains(O):
        raise PointOutside(f"point {O.tolist()} is not inside the body")
    samples = []
    for k in range(n_directions):
        theta = math.pi * k / n_directions
        d = np.array([math.cos(theta), math.sin(theta)])
        chord = body.chord_through(O, d)
        samples.append(OStarSample(d, harmonic_conjugate(chord.C, chord.D, O)))
    return samples


def _fit_line(H: np.ndarray, O: np.ndarray, scale: float) -> tuple[LineCoeffs, float]:
    """Total least squares line through homogeneous points.

    Works in a frame centered at O with unit length ``scale`` so the residual
    does not depend on where the body sits or how large it is.
    """
    if np.all(np.abs(H[:, 2]) <= IDEAL_TOL):
        return LineCoeffs.ideal(), 0.0
    N = np.array([[1.0 / scale, 0.0, -O[0] / scale], [0.0, 1.0 / scale, -O[1] / scale], [0.0, 0.0, 1.0]])
    Hn = H @ N.T
    Hn /= np.linalg.norm(Hn, axis=1)[:, None]
    _, _, vt = np.linalg.svd(Hn)
    l_frame = vt[-1]
    residual = float(np.max(np.abs(Hn @ l_frame)))
    line = N.T @ l_frame
    line /= np.max(np.abs(line))
    if np.hypot(line[0], line[1]) <= IDEAL_TOL:
        return LineCoeffs.ideal(), residual
    return LineCoeffs.from_array(line), residual


def line_misses_body(body: ConvexBody, line: LineCoeffs) -> bool:
    """True when the line stays outside the (open) body.

    Checks boundary samples for a common side and densely samples the line
    within twice the bounding box.
    """
    if line.is_ideal:
        return True
    values = line.evaluate(body.boundary_points(256))
    if not (np.all(values > 0) or np.all(values < 0)):
        return False
    lo, hi = body.bounding_box()
    mid, half = 0.5 * (lo + hi), hi - lo
    n = np.array([line.a, line.b])
    nn = float(n @ n)
    foot = mid - (line.evaluate(mid) / nn) * n
    along = np.array([-n[1], n[0]]) / math.sqrt(nn)
    reach = float(np.hypot(*half)) * 2.0
    ts = np.linspace(-reach, reach, LINE_SAMPLES)
    pts = foot + ts[:, None] * along
    inside_box = np.all(np.abs(pts - mid) <= half, axis=1)
    return not np.any(body.contains_many(pts[inside_box])) if np.any(inside_box) else True


def is_projective_center(
    body: ConvexBody,
    O,
    n_directions: int = DEFAULT_DIRECTIONS,
    tol: float = DEFAULT_FIT_TOL,
) -> CenterReport:
    O = as_point(O)
    samples = ostar_locus(body, O, n_directions)
    H = np.array([s.conjugate.h for s in samples])
    line, residual = _fit_line(H, O, body.diameter)
    misses = line_misses_body(body, line)
    return CenterReport(
        point=O,
        line=line,
        fit_residual=residual,
        line_misses_body=misses,
        is_projective_center=bool(residual <= tol and misses),
    )


def center_projectivity(
    body: ConvexBody,
    O,
    n_directions: int = DEFAULT_DIRECTIONS,
    tol: float = DEFAULT_FIT_TOL,
) -> Projectivity:
    """A projectivity taking O to the origin, which becomes the affine center of the image."""
    report = is_projective_center(body, O, n_directions, tol)
    if not report.is_projective_center:
        raise NotAProjectiveCenter(
            f"{report.point.tolist()} is not a projective center "
            f"(fit residual {report.fit_residual:.3g}, line misses body: {report.line_misses_body})"
        )
    to_infinity = line_to_infinity(report.line)
    return Projectivity.translation(-to_infinity(report.point)) @ to_infinity


def construct_point_reflection(
    space: MetricSpace,
    O,
    n_directions: int = DEFAULT_DIRECTIONS,
    tol: float = DEFAULT_FIT_TOL,
) -> PointReflection:
    """The metric point reflection at O.

    Minkowski: the central symmetry at O. Hilbert: the central symmetry of
    the image domain pulled back through :func:`center_projectivity`.
    """
    O = as_point(O)
    if isinstance(space, Minkowski):
        return PointReflection(O, affine_point_reflection(O))
    if not space.admissible(O):
        raise PointOutside(f"point {O.tolist()} is not inside the body")
    varpi = center_projectivity(space.body, O, n_directions, tol)
    flip = affine_point_reflection(varpi(O))
    return PointReflection(O, varpi.inverse() @ flip @ varpi)


def reflection_defects(
    space: MetricSpace,
    reflection: PointReflection,
    rng: np.random.Generator,
    n_pairs: int = 100,
    n_chords: int = 20,
) -> dict[str, float]:
    """Deviation of a reflection from each defining property.

    Keys: ``involution`` (matrix distance of map∘map to the identity),
    ``fixed`` (displacement of the center), ``chords`` (how far lines through
    the center are from being preserved), ``isometry`` (max distance defect).
    """
    O = reflection.center
    twice = reflection.map @ reflection.map
    involution = twice.distance_to(Projectivity.identity())
    fixed = float(np.max(np.abs(reflection(O) - O)))
    chords = 0.0
    for theta in rng.uniform(0.0, math.pi, size=n_chords):
        d = np.array([math.cos(theta), math.sin(theta)])
        if isinstance(space, Hilbert):
            chord = space.body.chord_through(O, d)
            C, D = reflection(chord.C), reflection(chord.D)
            err = min(
                max(np.linalg.norm(C - chord.C), np.linalg.norm(D - chord.D)),
                max(np.linalg.norm(C - chord.D), np.linalg.norm(D - chord.C)),
            )
        else:
            v = reflection(O + d) - O
            err = abs(v[0] * d[1] - v[1] * d[0])
        chords = max(chords, float(err))
    X = sample_points(space, n_pairs, rng)
    Y = sample_points(space, n_pairs, rng)
    RX, RY = reflection(X), reflection(Y)
    isometry = max(
        abs(space.distance(x, y) - space.distance(rx, ry)) for x, y, rx, ry in zip(X, Y, RX, RY)
    )
    return {"involution": involution, "fixed": fixed, "chords": chords, "isometry": float(isometry)}


def translate(t: Translation, X) -> np.ndarray:
    return t(as_point(X))


def make_translation(space: MetricSpace, P, Q) -> Translation:
    """``τ_PQ = ρ_P ∘ ρ_Q``."""
    return Translation(construct_point_reflection(space, P), construct_point_reflection(space, Q))


def conjugated_reflection(outer: PointReflection, inner: PointReflection) -> PointReflection:
    """``ρ_O ∘ ρ_Q ∘ ρ_O``, the reflection at ``ρ_O(Q)``."""
    return PointReflection(outer(inner.center), outer.map @ inner.map @ outer.map)


def _require_center(space: MetricSpace, X: np.ndarray) -> None:
    if isinstance(space, Hilbert):
        if not space.admissible(X):
            raise PointOutside(f"point {X.tolist()} is not inside the body")
        if not is_projective_center(space.body, X).is_projective_center:
            raise NotACenter(f"{X.tolist()} is not a center")


def conjugate_center(space: MetricSpace, O_reflection: PointReflection, Q) -> np.ndarray:
    """Image of the center Q under the reflection at O; again a center."""
    Q = as_point(Q)
    _require_center(space, Q)
    image = O_reflection(Q)
    _require_center(space, image)
    return image


def kronecker_orbit(p: float, q: float, x_lo: float, x_hi: float, max_iter: int) -> np.ndarray:
    """Sorted distinct values ``2ip - 2jq`` in ``[x_lo, x_hi]`` with ``|i| + |j| <= max_iter``.

    These are the positions, in arclength along a geodesic, of the images of
    O under ``τ_OP^i τ_OQ^j`` when ``d(O,P) = p`` and ``d(O,Q) = q``.
    """
    if not (p > 0 and q > 0):
        raise ValueError("kronecker_orbit needs p > 0 and q > 0")
    chunks = []
    for i in range(-max_iter, max_iter + 1):
        room = max_iter - abs(i)
        j_lo = max(-room, math.ceil((2 * i * p - x_hi) / (2 * q)) - 1)
        j_hi = min(room, math.floor((2 * i * p - x_lo) / (2 * q)) + 1)
        if j_lo > j_hi:
            continue
        j = np.arange(j_lo, j_hi + 1)
        v = 2 * i * p - 2 * j * q
        chunks.append(v[(v >= x_lo) & (v <= x_hi)])
    if not chunks:
        return np.empty(0)
    values = np.sort(np.concatenate(chunks))
    keep = np.concatenate([[True], np.diff(values) > 1e-12])
    return values[keep]


def max_gap(values: Sequence[float], x_lo: float, x_hi: float) -> float:
    """Largest empty stretch of ``[x_lo, x_hi]``, counting both ends."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        return float(x_hi - x_lo)
    edges = np.concatenate([[x_lo], v, [x_hi]])
    return float(np.max(np.diff(edges)))


def _dedup_key(X: np.ndarray) -> np.ndarray:
    k = np.round(X / DEDUP_RESOLUTION).astype(np.int64)
    return k[:, 0] * (1 << 32) + k[:, 1]


def _select(C, par, dist, keys, held: np.ndarray, limit: int):
    """Nearest-first distinct candidates not already held, at most ``limit``."""
    order = np.lexsort((C[:, 1], C[:, 0], dist))
    C, par, dist, keys = C[order], par[order], dist[order], keys[order]
    _, first = np.unique(keys, return_index=True)
    first.sort()
    first = first[~np.isin(keys[first], held)][:limit]
    return C[first], par[first], dist[first], keys[first]


def iter_pencil_orbit(
    space: MetricSpace,
    tip,
    pencil: Sequence[tuple],
    generations: int,
    budget: int = DEFAULT_BUDGET,
    window: Optional[float] = None,
) -> Iterator[np.ndarray]:
    """Yield the held center set before the first round and after each round.

    See :func:`pencil_orbit` for the closure rule.
    """
    tip = as_point(tip)
    seeds = [tip]
    for P, Q in pencil:
        P, Q = as_point(P), as_point(Q)
        _check_collinear([tip, P, Q])
        seeds.extend([P, Q])
    if window is None:
        window = 2.0 * max(float(np.linalg.norm(X - tip)) for X in seeds)
    if window + float(np.max(np.abs(tip))) >= (1 << 30) * DEDUP_RESOLUTION:
        raise ValueError("orbit window too large for the de-duplication grid")

    points: list[np.ndarray] = []
    maps: list[np.ndarray] = []
    held = np.empty(0, dtype=np.int64)
    for X in seeds:
        k = _dedup_key(X[None, :])
        if np.isin(k, held)[0]:
            continue
        try:
            refl = construct_point_reflection(space, X)
        except NotAProjectiveCenter as exc:
            raise NotACenter(str(exc)) from exc
        held = np.concatenate([held, k])
        points.append(X)
        maps.append(refl.map.matrix)
    yield np.array(points)

    frontier = np.arange(len(points))
    for _ in range(generations):
        room = budget - len(points)
        if frontier.size == 0 or room <= 0:
            yield np.array(points)
            continue
        Sh = np.hstack([np.array(points), np.ones((len(points), 1))])
        in_front = np.zeros(len(points), dtype=bool)
        in_front[frontier] = True
        pool, chunks, pending = None, [], 0
        cutoff = window
        for i in range(len(points)):
            targets = np.arange(len(points)) if in_front[i] else frontier
            H = Sh[targets] @ maps[i].T
            C = H[:, :2] / H[:, 2:3]
            dist = np.linalg.norm(C - tip, axis=1)
            ok = dist <= cutoff
            if isinstance(space, Hilbert):
                ok &= space.body.contains_many(C)
            par = np.column_stack([np.full(len(targets), i), targets])[ok]
            chunks.append((C[ok], par, dist[ok], _dedup_key(C[ok])))
            pending += int(ok.sum())
            if pending > 4 * room + 65536:
                parts = chunks if pool is None else [pool] + chunks
                pool = _select(*(np.concatenate(col) for col in zip(*parts)), held, room)
                chunks, pending = [], 0
                if len(pool[0]) == room:
                    cutoff = float(pool[2][-1])
        parts = chunks if pool is None else [pool] + chunks
        C, par, _, keys = _select(*(np.concatenate(col) for col in zip(*parts)), held, room)
        for X, (i, j) in zip(C, par):
            outer = maps[i]
            m = outer @ maps[j] @ outer
            points.append(X)
            maps.append(m / np.max(np.abs(m)))
        held = np.concatenate([held, keys])
        frontier = np.arange(len(points) - len(C), len(points))
        yield np.array(points)


def pencil_orbit(
    space: MetricSpace,
    tip,
    pencil: Sequence[tuple],
    generations: int,
    budget: int = DEFAULT_BUDGET,
    window: Optional[float] = None,
) -> np.ndarray:
    """Close a pencil of centers under conjugation for ``generations`` rounds.

    Each round reflects every held center in every other one, pairing at
    least one member of the previous round's additions. The reflection at a
    generated center ``ρ_X(Y)`` is the conjugate ``ρ_X ρ_Y ρ_X`` rather than
    a fresh fit. New points are kept within Euclidean distance ``window`` of
    the tip (default: twice the farthest pencil point), de-duplicated on a
    1e-6 grid, and admitted nearest-first until ``budget`` points are held.
    """
    for points in iter_pencil_orbit(space, tip, pencil, generations, budget, window):
        pass
    return points
