import math

import pytest
import numpy as np

from zetabranch.moebius import Moebius
from zetabranch.group import GroupPresentation, enumerateBall, formatWord
from zetabranch.geometry.spheres import sphereOf
from zetabranch.geometry.ford import (
    upperEnvelope, relevantSet, vertexCycles, checkConditionA, checkThirdSphere, spotcheckFundamental
)
from zetabranch.errors import EmptyInput, NoSpheres

from conftest import ROOT2, hecke, S

@pytest.fixture(scope='module')
def hecke_relevant(hecke_ball):
    return relevantSet(hecke_ball)

def test_relevant_spheres(hecke_relevant):
    spheres = sorted(hecke_relevant.spheres, key=lambda s: s.center)
    assert [s.center for s in spheres] == pytest.approx([-3.0, 0.0, 3.0])
    assert [s.radius for s in spheres] == pytest.approx([2.0 * ROOT2, 1.0, 2.0 * ROOT2])
    assert { formatWord(s.word) for s in spheres } == { 'h', 's', 'h^-1' }
    assert hecke_relevant.stable

def test_envelope_vertices(hecke_relevant):
    domain = hecke_relevant.domain
    assert domain.alpha == pytest.approx(-3.0 - 2.0 * ROOT2)
    assert domain.beta == pytest.approx(3.0 + 2.0 * ROOT2)
    assert [v.point.x for v in domain.vertices] == pytest.approx([-1.0 / 3.0, 1.0 / 3.0])
    # iso(s) meets iso(h^-1) at a right angle
    assert [v.angle for v in domain.vertices] == pytest.approx([math.pi / 2, math.pi / 2])
    assert domain.realEndpoints() == pytest.approx([domain.alpha, domain.beta])
    assert not domain.gaps

def test_vertex_cycle_closes(hecke_ball, hecke_relevant):
    cycles = vertexCycles(hecke_relevant.domain, hecke_ball)
    assert len(cycles) == 1
    cycle = cycles[0]
    assert len(cycle.vertices) == 2
    assert cycle.omega == 2
    assert cycle.angleSum == pytest.approx(math.pi)
    assert cycle.height_discrepancy < 1e-9

def test_condition_a_and_third_sphere(hecke_relevant):
    assert checkConditionA(hecke_relevant.domain)['passed']
    third = checkThirdSphere(hecke_relevant.domain, cyclic=False)
    assert third['passed'] and third['applicable']
    assert third['witness'] == 's'

def test_cyclic_envelope_has_a_gap(cyclic_ball):
    relevant = relevantSet(cyclic_ball)
    domain = relevant.domain
    assert len(domain.sides) == 2
    assert not domain.vertices
    assert len(domain.gaps) == 1
    gap = domain.gaps[0]
    assert gap == pytest.approx((-(3.0 - 2.0 * ROOT2), 3.0 - 2.0 * ROOT2))
    assert vertexCycles(domain) == []
    assert not checkThirdSphere(domain, cyclic=True)['applicable']

def test_condition_a_fails_on_hidden_summit():
    # the summit (1.5, 1) of the small sphere lies under the big one
    big = Moebius.fromEntries(0.0, -2.0, 0.5, 0.0)
    small = Moebius.fromEntries(0.0, -1.0, 1.0, -1.5)
    domain = upperEnvelope([sphereOf(big), sphereOf(small)])
    assert len(domain.relevantSpheres()) == 2
    assert domain.vertices[0].point.x == pytest.approx(1.75)
    assert not checkConditionA(domain)['passed']

def test_empty_inputs():
    with pytest.raises(EmptyInput):
        upperEnvelope([])
    translations = GroupPresentation.of([('t', Moebius.translation(1.0))])
    with pytest.raises(NoSpheres):
        relevantSet(enumerateBall(translations, 2))

def test_spotcheck_fundamental(hecke_ball, hecke_relevant):
    report = spotcheckFundamental(hecke_relevant.domain, hecke_ball, samples=100)
    assert report['interior_equivalences']['passed']
    assert report['coverage']['covered_fraction'] > 0.8

def test_spotcheck_translates_of_given_points(hecke_ball, hecke_relevant):
    from zetabranch.moebius import HPoint
    report = spotcheckFundamental(hecke_relevant.domain, hecke_ball, points=[HPoint(0.0, 2.0), HPoint(0.0, 0.5)])
    # i/2 is s.(2i)
    assert report['coverage']['translates'] == ['id', 's^-1']

def test_spotcheck_cyclic_domain(cyclic_group, cyclic_ball):
    domain = relevantSet(cyclic_ball).domain
    report = spotcheckFundamental(domain, enumerateBall(cyclic_group, 6), samples=200)
    assert report['interior_equivalences']['passed']

def test_stability_compares_with_the_shorter_ball(hecke_group, hecke_ball, hecke_relevant):
    # the 0-ball is the identity alone, so the 1-ball has nothing to agree with
    assert not relevantSet(enumerateBall(hecke_group, 1)).stable
    shorter = relevantSet(hecke_ball.restrict(5))
    assert hecke_relevant.stable
    assert sorted(s.center for s in shorter.spheres) == pytest.approx(sorted(s.center for s in hecke_relevant.spheres))
