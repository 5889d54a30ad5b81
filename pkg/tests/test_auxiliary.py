import pytest

from zetabranch.moebius import Moebius
from zetabranch.group import GroupPresentation, enumerateBall
from zetabranch.geometry.auxiliary import buildAuxiliary, verifyAuxiliary, boundsAlphaBeta, cuspHeight
from zetabranch.errors import ParabolicDetected, ConditionStarFails

from conftest import ROOT2, BETA_PRIME_2, hecke

@pytest.fixture(scope='module')
def hecke_aux(hecke_group, hecke_ball):
    return buildAuxiliary(hecke_group, hecke_ball)

def test_default_strip(hecke_aux):
    assert hecke_aux.alpha == pytest.approx(-3.0 - 2.0 * ROOT2)
    assert hecke_aux.beta == pytest.approx(3.0 + 2.0 * ROOT2)
    assert hecke_aux.alpha_prime == pytest.approx(-BETA_PRIME_2)
    assert hecke_aux.beta_prime == pytest.approx(BETA_PRIME_2)
    assert hecke_aux.lam == pytest.approx(6.0 + 6.0 * ROOT2)
    assert hecke_aux.t_lambda.applyBoundary(hecke_aux.alpha_prime) == pytest.approx(hecke_aux.beta_prime)
    assert hecke_aux.presentation_W.labels() == ['h', 's', 't']
    assert hecke_aux.domain_W.strip == pytest.approx((-BETA_PRIME_2, BETA_PRIME_2))
    assert cuspHeight(hecke_aux) == pytest.approx(2.0 * ROOT2)
    assert boundsAlphaBeta(hecke_aux.domain) == pytest.approx((hecke_aux.alpha, hecke_aux.beta))

def test_explicit_strip(hecke_group, hecke_ball):
    aux = buildAuxiliary(hecke_group, hecke_ball, alpha_prime=-8.0, beta_prime=7.0)
    assert aux.lam == pytest.approx(15.0)
    with pytest.raises(ConditionStarFails):
        buildAuxiliary(hecke_group, hecke_ball, alpha_prime=-5.0, beta_prime=7.0)

def test_auxiliary_checks(hecke_aux, hecke_ball):
    report = verifyAuxiliary(hecke_aux, cutoff=4, samples=100, base_ball=hecke_ball)
    for name in ('stabilizer', 'rel_preservation', 'ford_type', 'condition_A', 'cusp_cycle', 'contains_base',
                 'strip_tiling'):
        assert report[name]['passed'], name
    assert report['vertex_cycles']['omegas'] == [2]
    # the outermost shadows each hold one of the limit points -1 and 1
    assert [e['hyperbolic_points'] for e in report['extremal_shadows']] == [1, 1]

def test_cyclic_auxiliary_checks(cyclic_group, cyclic_ball):
    aux = buildAuxiliary(cyclic_group, cyclic_ball)
    report = verifyAuxiliary(aux, base_ball=cyclic_ball)
    for name in ('stabilizer', 'rel_preservation', 'ford_type', 'condition_A'):
        assert report[name]['passed'], name

def test_parabolic_group_rejected():
    group = GroupPresentation.of([('p', Moebius.fromEntries(1.0, 0.0, 1.0, 1.0)), ('h', hecke())])
    with pytest.raises(ParabolicDetected):
        buildAuxiliary(group, enumerateBall(group, 2))

def test_stabilizer_of_infinity_rejected():
    group = GroupPresentation.of([('d', Moebius.fromEntries(2.0, 0.0, 0.0, 0.5))])
    with pytest.raises(ConditionStarFails):
        buildAuxiliary(group, enumerateBall(group, 2))
