import math

import pytest
import numpy as np
from hypothesis import given, settings, strategies as st

from zetabranch.moebius import (
    Moebius, HPoint, Geodesic, BoundaryInterval, Kind, INFINITY, circularContains, arcContains,
    imageInterval, toImaginaryAxis, geodesicMeets, applyBoundaryArray, stackEntries, hyperbolicDistance
)
from zetabranch.errors import (
    PoleError, AmbiguousClassification, IdentityHasNoFixedPointSet, NotHyperbolic, CoincidentGeodesics,
    InvalidPoint, BadDeterminant
)

from conftest import hecke, S

reals = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)
heights = st.floats(min_value=0.05, max_value=20, allow_nan=False, allow_infinity=False)

@st.composite
def elements(draw):
    a = draw(st.floats(min_value=0.3, max_value=4, allow_nan=False, allow_infinity=False))
    b = draw(st.floats(min_value=-5, max_value=5, allow_nan=False, allow_infinity=False))
    c = draw(st.floats(min_value=-5, max_value=5, allow_nan=False, allow_infinity=False))
    # d from ad - bc = 1
    return Moebius.fromEntries(a, b, c, (1.0 + b * c) / a)

def test_apply_infinity_and_pole():
    g = Moebius.fromEntries(2.0, 1.0, 1.0, 1.0)
    assert g.applyBoundary(INFINITY) == pytest.approx(2.0)
    assert math.isinf(g.applyBoundary(-1.0))
    assert Moebius.translation(3.0).applyBoundary(INFINITY) == INFINITY

def test_interior_action_of_involution():
    w = S.applyInterior(HPoint(0.0, 2.0))
    assert w.x == pytest.approx(0.0)
    assert w.y == pytest.approx(0.5)

def test_derivative_at_pole_raises():
    g = Moebius.fromEntries(2.0, 1.0, 1.0, 1.0)
    with pytest.raises(PoleError):
        g.derivMag(-1.0)
    with pytest.raises(InvalidPoint):
        g.derivMag(INFINITY)

def test_classify_kinds():
    assert Moebius.identity().classify().kind is Kind.IDENTITY
    assert Moebius.translation(1.0).classify().kind is Kind.PARABOLIC
    assert hecke().classify().kind is Kind.HYPERBOLIC
    elliptic = S.classify()
    assert elliptic.kind is Kind.ELLIPTIC
    assert elliptic.order == 2
    order_three = Moebius.fromEntries(0.0, -1.0, 1.0, 1.0).classify()
    assert order_three.kind is Kind.ELLIPTIC and order_three.order == 3

def test_classify_ambiguous_near_two():
    t = 1e-4
    g = Moebius.fromEntries(1.0 + t, 0.0, 0.0, 1.0 / (1.0 + t))
    with pytest.raises(AmbiguousClassification) as caught:
        g.classify(eps=1e-5)
    assert 'Parabolic' in caught.value.candidates
    assert 'Hyperbolic' in caught.value.candidates

def test_fixed_points_of_hecke_generator():
    f_plus, f_minus = hecke().fixedPoints()
    assert f_plus == pytest.approx(1.0)
    assert f_minus == pytest.approx(-1.0)
    assert hecke().translationLength() == pytest.approx(math.log(2.0))

def test_fixed_points_errors():
    with pytest.raises(IdentityHasNoFixedPointSet):
        Moebius.identity().fixedPoints()
    with pytest.raises(NotHyperbolic):
        S.translationLength()

def test_canonical_sign_identifies_negatives():
    g = Moebius.fromEntries(-3.0, -8.0, -1.0, -3.0)
    assert g == Moebius.fromEntries(3.0, 8.0, 1.0, 3.0)
    assert g.key() == Moebius.fromEntries(3.0, 8.0, 1.0, 3.0).key()
    with pytest.raises(TypeError):
        hash(g)

def test_equality_across_rounding_boundary():
    g = Moebius(1.0, 0.1234567895, 0.0, 1.0)
    h = Moebius(1.0, 0.1234567895 + 2e-11, 0.0, 1.0)
    assert g == h
    assert g.isClose(h)

def test_from_entries_normalises_determinant():
    g = Moebius.fromEntries(3.0, 1.0, 1.0, 3.0)
    assert g.isClose(hecke())
    assert g.translationLength() == pytest.approx(math.log(2.0))
    assert g.derivMag(HPoint(0.0, 1.0)) == pytest.approx(0.8)
    assert Moebius.fromEntries(2.0, 0.0, 0.0, 2.0).isClose(Moebius.identity())

def test_from_entries_rejects_nonpositive_determinant():
    with pytest.raises(BadDeterminant):
        Moebius.fromEntries(0.0, 1.0, 1.0, 0.0)
    with pytest.raises(BadDeterminant):
        Moebius.fromEntries(1.0, 0.0, 0.0, 0.0)

@settings(max_examples=60, deadline=None)
@given(elements())
def test_canonical_sign_unique(g):
    negated = Moebius.fromEntries(*(-x for x in g))
    assert tuple(negated) == tuple(g)

@settings(max_examples=60, deadline=None)
@given(elements(), elements(), reals, heights)
def test_chain_rule(g, h, x, y):
    z = HPoint(x, y)
    lhs = g.compose(h).derivMag(z)
    rhs = g.derivMag(h.applyInterior(z)) * h.derivMag(z)
    assert lhs == pytest.approx(rhs, rel=1e-8)

@settings(max_examples=60, deadline=None)
@given(elements(), reals, heights)
def test_interior_stays_in_upper_half_plane(g, x, y):
    assert g.applyInterior(HPoint(x, y)).y > 0

@settings(max_examples=60, deadline=None)
@given(elements(), reals, heights, reals, heights)
def test_isometry(g, x1, y1, x2, y2):
    z, w = HPoint(x1, y1), HPoint(x2, y2)
    d0 = hyperbolicDistance(z, w)
    d1 = hyperbolicDistance(g.applyInterior(z), g.applyInterior(w))
    assert d1 == pytest.approx(d0, rel=1e-6, abs=1e-6)

def test_circular_contains_through_infinity():
    arc = BoundaryInterval(1.0, -1.0)
    assert circularContains(arc, 5.0)
    assert circularContains(arc, -5.0)
    assert circularContains(arc, INFINITY)
    assert not circularContains(arc, 0.0)
    right = BoundaryInterval(0.0, INFINITY)
    assert circularContains(right, 3.0)
    assert not circularContains(right, INFINITY)
    assert not circularContains(right, -3.0)

@settings(max_examples=80, deadline=None)
@given(reals, reals, reals)
def test_circular_contains_complement(left, right, p):
    if len({ round(left, 6), round(right, 6), round(p, 6) }) < 3:
        return
    arc = BoundaryInterval(left, right)
    assert circularContains(arc, p) != circularContains(arc.complement(), p)

def test_arc_contains_image():
    h = hecke()
    outer = BoundaryInterval(0.0, INFINITY)
    assert arcContains(outer, imageInterval(h, outer))
    assert not arcContains(imageInterval(h, outer), outer)

def test_to_imaginary_axis():
    M = toImaginaryAxis(-1.0, 1.0)
    assert M.applyBoundary(-1.0) == pytest.approx(0.0)
    assert math.isinf(M.applyBoundary(1.0))
    assert M.determinant() == pytest.approx(1.0)

def test_geodesic_meets():
    point = geodesicMeets(Geodesic(-1.0, 1.0), Geodesic(0.0, INFINITY))
    assert point.x == pytest.approx(0.0)
    assert point.y == pytest.approx(1.0)
    assert geodesicMeets(Geodesic(-1.0, 1.0), Geodesic(2.0, 3.0)) is None
    assert geodesicMeets(Geodesic(-1.0, 1.0), Geodesic(1.0, 3.0)) is None
    with pytest.raises(CoincidentGeodesics):
        geodesicMeets(Geodesic(-1.0, 1.0), Geodesic(1.0, -1.0))

def test_apply_boundary_array_matches_scalar():
    elements = [hecke(), S, Moebius.translation(2.0), hecke().inverse()]
    entries = stackEntries(elements)
    for x in (0.0, 1.5, -3.0, INFINITY):
        values = applyBoundaryArray(entries, x)
        for g, v in zip(elements, values):
            expected = g.applyBoundary(x)
            if math.isinf(expected):
                assert math.isinf(v)
            else:
                assert v == pytest.approx(expected)

def test_invalid_points():
    with pytest.raises(InvalidPoint):
        HPoint.of(0.0, -1.0)
    with pytest.raises(InvalidPoint):
        BoundaryInterval.of(2.0, 2.0)
    with pytest.raises(InvalidPoint):
        circularContains(BoundaryInterval(0.0, 1.0), float('nan'))
