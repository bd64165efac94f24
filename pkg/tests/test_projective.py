import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from projmetric.errors import (
    DegenerateConfiguration,
    DegeneratePosition,
    DegenerateRatio,
    InvalidLine,
    NotCollinear,
    SingularSystem,
)
from projmetric.projective import (
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

coord = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
param = st.floats(-4, 4, allow_nan=False, allow_infinity=False)


def _on_line(P, u, t):
    return np.asarray(P, float) + t * np.asarray(u, float)


# --- affine ratio ----------------------------------------------------------


def test_affine_ratio_midpoint():
    assert affine_ratio((0, 0), (2, 0), (1, 0)) == pytest.approx(-1.0)


def test_affine_ratio_hand_value():
    # r (C - B) = C - A with C - B = -2, C - A = 1
    assert affine_ratio((0, 0), (3, 0), (1, 0)) == pytest.approx(-0.5)


def test_affine_ratio_coincident_a_b():
    assert affine_ratio((0, 0), (0, 0), (1, 1)) == pytest.approx(1.0)


def test_affine_ratio_vertical_line_uses_dominant_axis():
    assert affine_ratio((2, 0), (2, 3), (2, 1)) == pytest.approx(-0.5)


def test_affine_ratio_errors():
    with pytest.raises(NotCollinear):
        affine_ratio((0, 0), (1, 0), (0, 1))
    with pytest.raises(DegenerateRatio):
        affine_ratio((0, 0), (1, 0), (1, 0))


# --- cross ratio -----------------------------------------------------------


def test_cross_ratio_harmonic_quadruple():
    assert cross_ratio((0, 0), (3, 0), (1, 0), (-3, 0)) == pytest.approx(-1.0)


def test_cross_ratio_is_quotient_of_affine_ratios():
    A, B, C, D = (0, 0), (1, 1), (3, 3), (-2, -2)
    expected = affine_ratio(A, B, C) / affine_ratio(A, B, D)
    assert cross_ratio(A, B, C, D) == pytest.approx(expected, rel=1e-12)


def test_cross_ratio_with_ideal_point_is_affine_ratio():
    A, B, C = (0, 0), (3, 0), (1, 0)
    inf = HomogeneousPoint(1, 0, 0)
    assert cross_ratio(A, B, C, inf) == pytest.approx(affine_ratio(A, B, C), rel=1e-12)


def test_cross_ratio_errors():
    with pytest.raises(NotCollinear):
        cross_ratio((0, 0), (1, 0), (2, 0), (0, 1))
    with pytest.raises(DegenerateConfiguration):
        cross_ratio((0, 0), (1, 0), (1, 0), (2, 0))
    with pytest.raises(NotCollinear):
        cross_ratio((0, 0), (1, 0), (2, 0), HomogeneousPoint(0, 1, 0))
    with pytest.raises(DegenerateConfiguration):
        cross_ratio((0, 0), (1, 0), HomogeneousPoint(1, 0, 0), HomogeneousPoint(-1, 0, 0))


@settings(max_examples=200, deadline=None)
@given(
    st.lists(param, min_size=4, max_size=4, unique=True),
    st.floats(0, math.pi),
    st.integers(0, 2**31),
)
def test_cross_ratio_projective_invariance(ts, angle, seed):
    ts = sorted(ts)
    assume(min(np.diff(ts)) > 1e-2)
    u = (math.cos(angle), math.sin(angle))
    pts = [_on_line((0.3, -0.2), u, t) for t in ts]
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(3, 3))
    assume(abs(np.linalg.det(m)) > 1e-2)
    f = Projectivity(m)
    images = [f(HomogeneousPoint(*p)) for p in pts]
    assume(sum(img.is_ideal for img in images) <= 1)
    # images far away along the line lose digits to rounding
    assume(all(img.is_ideal or np.max(np.abs(img.affine())) < 1e4 for img in images))
    before = cross_ratio(*pts)
    after = cross_ratio(*images)
    assert after == pytest.approx(before, rel=1e-9, abs=1e-12)


# --- harmonic conjugate ----------------------------------------------------


def test_harmonic_conjugate_hand_value():
    P = harmonic_conjugate((0, 0), (3, 0), (1, 0))
    assert not P.is_ideal
    np.testing.assert_allclose(P.affine(), (-3, 0), atol=1e-12)


def test_harmonic_conjugate_of_midpoint_is_ideal():
    P = harmonic_conjugate((-1, 0), (1, 0), (0, 0))
    assert P.is_ideal
    assert P == HomogeneousPoint(1, 0, 0)


def test_harmonic_conjugate_cross_ratio_is_minus_one():
    A, B, O = (0.2, -1.0), (1.4, 2.0), (0.6, 0.0)
    P = harmonic_conjugate(A, B, O)
    assert cross_ratio(A, B, O, P) == pytest.approx(-1.0, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(param, param, param, st.floats(0, math.pi))
def test_harmonic_conjugate_involution(a, b, o, angle):
    assume(min(abs(a - b), abs(o - a), abs(o - b)) > 1e-2)
    assume(abs(2 * o - a - b) > 1e-2)
    u = (math.cos(angle), math.sin(angle))
    A, B, O = (_on_line((1, 1), u, t) for t in (a, b, o))
    P = harmonic_conjugate(A, B, O)
    back = harmonic_conjugate(A, B, P.affine())
    np.testing.assert_allclose(back.affine(), O, atol=1e-7 * (1 + np.max(np.abs(P.affine()))))


def test_harmonic_conjugate_errors():
    with pytest.raises(NotCollinear):
        harmonic_conjugate((0, 0), (1, 0), (0, 1))
    with pytest.raises(DegenerateConfiguration):
        harmonic_conjugate((0, 0), (1, 0), (1, 0))


# --- affine point reflection -----------------------------------------------


def test_affine_reflection_examples():
    np.testing.assert_allclose(affine_point_reflection((0, 0))((3, 4)), (-3, -4))
    np.testing.assert_allclose(affine_point_reflection((1, 2))((1, 2)), (1, 2))
    X = np.array([0.0, 0.0])
    RX = affine_point_reflection((1, 0))(X)
    np.testing.assert_allclose(RX, (2, 0))
    assert affine_ratio(X, RX, (1, 0)) == pytest.approx(-1.0)


def test_affine_reflection_involution(rng):
    for O in rng.uniform(-3, 3, size=(10, 2)):
        rho = affine_point_reflection(O)
        X = rng.uniform(-10, 10, size=(100, 2))
        np.testing.assert_allclose(rho(rho(X)), X, atol=1e-12)


# --- correspondence --------------------------------------------------------

FRAME = [HomogeneousPoint(1, 0, 0), HomogeneousPoint(0, 1, 0), HomogeneousPoint(0, 0, 1), HomogeneousPoint(1, 1, 1)]


def test_correspondence_identity():
    f = projectivity_from_correspondence(FRAME, FRAME)
    assert f.distance_to(Projectivity.identity()) < 1e-12


def test_correspondence_swap():
    dst = [FRAME[1], FRAME[0], FRAME[2], FRAME[3]]
    f = projectivity_from_correspondence(FRAME, dst)
    for s, d in zip(FRAME, dst):
        assert f(s) == d


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=8, max_size=8))
def test_correspondence_round_trip(pts):
    src, dst = pts[:4], pts[4:]
    # keep to well-conditioned frames: every triple spans a sizeable triangle
    for quad in (src, dst):
        for i, j, k in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
            u = np.subtract(quad[j], quad[i])
            v = np.subtract(quad[k], quad[i])
            assume(abs(u[0] * v[1] - u[1] * v[0]) > 0.5)
    try:
        f = projectivity_from_correspondence(src, dst)
    except DegeneratePosition:
        return
    for s, d in zip(src, dst):
        img = f(HomogeneousPoint(*s))
        assume(not img.is_ideal)
        np.testing.assert_allclose(img.affine(), d, atol=1e-6)
    g = projectivity_from_correspondence(dst, src)
    assert (g @ f).distance_to(Projectivity.identity()) < 1e-6


def test_correspondence_collinear_triple():
    with pytest.raises(DegeneratePosition):
        projectivity_from_correspondence([(0, 0), (1, 0), (2, 0), (0, 1)], FRAME)


# --- line to infinity --------------------------------------------------------


def test_line_to_infinity_ideal_line_is_identity():
    assert line_to_infinity(LineCoeffs.ideal()).distance_to(Projectivity.identity()) < 1e-15


def test_line_to_infinity_sends_line_to_ideal():
    f = line_to_infinity(LineCoeffs(1, 0, -2))
    for y in (-3.0, 0.0, 5.0):
        assert f(HomogeneousPoint(2, y)).is_ideal
    g = line_to_infinity(LineCoeffs(1, 1, -5))
    assert g(HomogeneousPoint(5, 0)).is_ideal
    assert g(HomogeneousPoint(0, 5)).is_ideal


@settings(max_examples=200, deadline=None)
@given(coord, coord, coord, coord, coord)
def test_line_to_infinity_keeps_other_points_affine(a, b, c, x, y):
    assume(math.hypot(a, b) > 1e-3)
    line = LineCoeffs(a, b, c)
    assume(abs(line.evaluate((x, y))) > 1e-6)
    assert not line_to_infinity(line)(HomogeneousPoint(x, y)).is_ideal


def test_line_to_infinity_rejects_non_line():
    with pytest.raises(InvalidLine):
        line_to_infinity((1, 0, 0))


# --- projectivity plumbing ---------------------------------------------------


def test_projectivity_singular():
    with pytest.raises(SingularSystem):
        Projectivity(np.ones((3, 3)))


def test_projectivity_point_to_infinity_raises():
    f = line_to_infinity(LineCoeffs(1, 0, -2))
    with pytest.raises(DegenerateConfiguration):
        f((2.0, 1.0))


def test_homogeneous_equality_up_to_scale():
    assert HomogeneousPoint(2, 4, 2) == HomogeneousPoint(-1, -2, -1)
    np.testing.assert_allclose(HomogeneousPoint(2, 4, 2).affine(), (1, 2))
