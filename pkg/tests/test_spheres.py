import math

import pytest
import numpy as np

from zetabranch.moebius import Moebius
from zetabranch.geometry.spheres import sphereOf, summit, shadow, spheresOf, checkIsoIdentities
from zetabranch.errors import StabilizesInfinity

from conftest import hecke, S, ROOT2

def test_sphere_of_generators():
    iso_h = sphereOf(hecke())
    assert iso_h.center == pytest.approx(-3.0)
    assert iso_h.radius == pytest.approx(2.0 * ROOT2)
    iso_h_inv = sphereOf(hecke().inverse())
    assert iso_h_inv.center == pytest.approx(3.0)
    iso_s = sphereOf(S)
    assert iso_s.center == pytest.approx(0.0)
    assert iso_s.radius == pytest.approx(1.0)

def test_summit_and_shadow():
    iso_s = sphereOf(S)
    top = summit(iso_s)
    assert (top.x, top.y) == pytest.approx((0.0, 1.0))
    interval = shadow(iso_s)
    assert (interval.left, interval.right) == pytest.approx((-1.0, 1.0))
    assert iso_s.heightAt([0.0, 2.0]) == pytest.approx([1.0, 0.0])
    point = iso_s.pointAt(math.pi / 2)
    assert point.y == pytest.approx(1.0)

def test_stabilizer_has_no_sphere():
    with pytest.raises(StabilizesInfinity):
        sphereOf(Moebius.translation(2.0))

def test_derivative_is_one_on_sphere():
    g = Moebius.fromEntries(3.0, 8.0, 1.0, 3.0)
    sphere = sphereOf(g)
    for angle in (0.3, 1.0, 2.5):
        assert g.derivMag(sphere.pointAt(angle)) == pytest.approx(1.0)

def test_spheres_of_ball_are_distinct(hecke_ball):
    spheres = spheresOf(hecke_ball)
    keys = { (round(s.center, 7), round(s.radius, 7)) for s in spheres }
    assert len(keys) == len(spheres)
    # only the identity fixes oo
    assert len(spheres) == len(hecke_ball) - 1

def test_iso_identities(hecke_ball):
    report = checkIsoIdentities(hecke_ball, samples=20, t_lambda=Moebius.translation(2.0))
    for name in ('iso1_mapping', 'iso2_height', 'unit_derivative', 'chain_rule', 'interior_mapping',
                 'concentric', 'iso5_translation'):
        assert report[name]['passed'], name
    assert report['shadows_meet_limit_set']['limit_points'] == 2

def test_iso_identities_on_schottky(schottky_group):
    from zetabranch.group import enumerateBall
    report = checkIsoIdentities(enumerateBall(schottky_group, 3), samples=10)
    assert report['iso1_mapping']['passed']
    assert report['unit_derivative']['passed']
    assert 'iso5_translation' not in report
    assert report['spheres'] == 52
