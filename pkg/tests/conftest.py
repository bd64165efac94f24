import math

import numpy as np
import pytest

from projmetric.bodies import Ellipse, PNormBall, Polygon
from projmetric.metrics import Hilbert, Minkowski

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def disk():
    return Ellipse()


def ellipse21():
    return Ellipse.from_axes(2.0, 1.0)


def pnorm4():
    return PNormBall(4.0)


def square():
    return Polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])


SPACES = {
    "minkowski-disk": lambda: Minkowski(disk()),
    "minkowski-p4": lambda: Minkowski(pnorm4()),
    "hilbert-disk": lambda: Hilbert(disk()),
    "hilbert-ellipse21": lambda: Hilbert(ellipse21()),
    "hilbert-p4": lambda: Hilbert(pnorm4()),
}


# --- independent oracles -------------------------------------------------


def bisect_exit(contains, P, d, t_hi=10.0, steps=200):
    """Exit parameter of the ray P + t d by bisection on a membership predicate."""
    lo, hi = 0.0, t_hi
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if contains(P + mid * d):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hilbert_oracle(contains, A, B):
    """½|ln (A,B;C,D)| with chord ends found by bisection and the cross ratio
    written out along the line parameter."""
    A, B = np.asarray(A, float), np.asarray(B, float)
    s = float(np.linalg.norm(B - A))
    if s == 0:
        return 0.0
    d = (B - A) / s
    tD = bisect_exit(contains, A, d)
    tC = -bisect_exit(contains, A, -d)
    a, b, c, dd = 0.0, s, tC, tD
    cr = ((c - a) / (c - b)) / ((dd - a) / (dd - b))
    return 0.5 * abs(math.log(cr))


def bisection_midpoint(space, A, B, steps=200):
    """Point on segment AB where d(A, X) = d(X, B), by bisection on the affine parameter."""
    A, B = np.asarray(A, float), np.asarray(B, float)
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        X = A + mid * (B - A)
        if space.distance(A, X) < space.distance(X, B):
            lo = mid
        else:
            hi = mid
    return A + 0.5 * (lo + hi) * (B - A)


def covering_radius(points, lo=-1.0, hi=1.0, resolution=201, margin=0.3):
    """Brute-force covering radius of the square ``[lo, hi]²`` by ``points``.

    Returns the largest nearest-point distance over a ``resolution²`` lattice
    plus half the lattice cell diagonal, an upper bound on the true value.
    Points farther than ``margin`` outside the square are ignored, which can
    only raise the result and changes nothing when it is below ``margin``.
    """
    g = np.linspace(lo, hi, resolution)
    G = np.array([(x, y) for x in g for y in g])
    P = np.asarray(points, float)
    P = P[np.all((P >= lo - margin) & (P <= hi + margin), axis=1)]
    if len(P) == 0:
        return math.inf
    step = (hi - lo) / (resolution - 1)
    worst = 0.0
    for chunk in np.array_split(G, max(1, len(G) // 64)):
        d = np.sqrt(((chunk[:, None, :] - P[None, :, :]) ** 2).sum(axis=2)).min(axis=1)
        worst = max(worst, float(d.max()))
    return worst + step * math.sqrt(2) / 2


def random_bounded_projectivity(rng, strength=0.3):
    """A projectivity close to an affine map whose third row keeps w > 0 on |x|, |y| <= 2."""
    m = np.eye(3) + strength * rng.uniform(-1, 1, size=(3, 3))
    m[2, :2] = rng.uniform(-0.15, 0.15, size=2)
    m[2, 2] = 1.0
    return m
